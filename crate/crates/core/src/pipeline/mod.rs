//! Mutant generation, deduplication, equivalence marks and compile filtering.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frontend::{parse, SyntaxError};
use crate::operators::{enumerate_all, Context, MutationPoint, Operator};

mod compile;
mod workspace;

pub use compile::{compile_filter, mark_all_pending, CompileAdapter, DEFAULT_COMPILE_TIMEOUT};
pub use workspace::{
    copy_project, materialize_mutant, materialize_original, mutant_dir, original_dir, Catalog,
    CatalogEntry, MutantRecord,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}:{line}:{col}: {msg}", line = .error.line(), col = .error.col(), msg = strip_position(.error))]
    Syntax { path: String, error: SyntaxError },
    #[error(transparent)]
    SpanMismatch(#[from] SpanMismatch),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("compile adapter failed: {0}")]
    Adapter(String),
    #[error("original project does not compile (adapter exit {code})")]
    OriginalDoesNotCompile { code: i32 },
    #[error("mutant `{0}` not found in catalog sources")]
    UnknownSource(String),
    #[error("malformed catalog: {0}")]
    Catalog(String),
}

/// The message part of a syntax error, without its `line:col:` prefix.
fn strip_position(e: &SyntaxError) -> String {
    let full = e.to_string();
    let prefix = format!("{}:{}: ", e.line(), e.col());
    full.strip_prefix(&prefix).map(str::to_string).unwrap_or(full)
}

impl PipelineError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("span {start}..{end} holds {found:?}, expected {expected:?}")]
pub struct SpanMismatch {
    pub start: usize,
    pub end: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutantStatus {
    Generated,
    CompileFailed,
    EquivalentMarked,
    Pending,
    Killed,
    Survived,
}

impl MutantStatus {
    fn stage(self) -> u8 {
        match self {
            MutantStatus::Generated => 0,
            MutantStatus::CompileFailed | MutantStatus::EquivalentMarked | MutantStatus::Pending => 1,
            MutantStatus::Killed | MutantStatus::Survived => 2,
        }
    }

    /// Only forward moves are legal, and stage-two statuses must come from
    /// `pending`.
    pub fn can_become(self, next: MutantStatus) -> bool {
        match (self.stage(), next.stage()) {
            (0, 1) => true,
            (1, 2) => self == MutantStatus::Pending,
            _ => false,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MutantStatus::Generated => "generated",
            MutantStatus::CompileFailed => "compile_failed",
            MutantStatus::EquivalentMarked => "equivalent_marked",
            MutantStatus::Pending => "pending",
            MutantStatus::Killed => "killed",
            MutantStatus::Survived => "survived",
        }
    }
}

impl fmt::Display for MutantStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("mutant {id}: illegal status change {from} -> {to}")]
pub struct InvalidTransition {
    pub id: String,
    pub from: MutantStatus,
    pub to: MutantStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: String,
    pub point: MutationPoint,
    pub source_path: String,
    pub mutated_source: String,
    pub status: MutantStatus,
}

impl Mutant {
    pub fn set_status(&mut self, next: MutantStatus) -> Result<(), InvalidTransition> {
        if !self.status.can_become(next) {
            return Err(InvalidTransition {
                id: self.id.clone(),
                from: self.status,
                to: next,
            });
        }
        self.status = next;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantSet {
    pub original_sources: BTreeMap<String, String>,
    pub mutants: Vec<Mutant>,
    pub seed: u64,
    pub enabled_operators: Vec<Operator>,
    /// Points dropped because an earlier point produced the same text,
    /// keyed by the dropped point's operator code.
    pub duplicates_removed: BTreeMap<String, usize>,
}

impl MutantSet {
    pub fn get(&self, id: &str) -> Option<&Mutant> {
        self.mutants.iter().find(|m| m.id == id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut Mutant> {
        self.mutants.iter_mut().find(|m| m.id == id)
    }

    pub fn count_with(&self, status: MutantStatus) -> usize {
        self.mutants.iter().filter(|m| m.status == status).count()
    }

    pub fn duplicate_count(&self) -> usize {
        self.duplicates_removed.values().sum()
    }
}

/// Replace `point.target_span` in `source` with the replacement text.
pub fn apply_edit(source: &str, point: &MutationPoint) -> Result<String, SpanMismatch> {
    let (start, end) = (point.target_span.start_byte, point.target_span.end_byte);
    let found = source.get(start..end);
    if found != Some(point.original_text.as_str()) {
        return Err(SpanMismatch {
            start,
            end,
            expected: point.original_text.clone(),
            found: found.unwrap_or("<out of range>").to_string(),
        });
    }
    let mut out = String::with_capacity(source.len() - (end - start) + point.replacement_text.len());
    out.push_str(&source[..start]);
    out.push_str(&point.replacement_text);
    out.push_str(&source[end..]);
    Ok(out)
}

/// First 8 hex digits of SHA-256 over `path`, a NUL byte and the text.
pub fn content_digest(path: &str, mutated_source: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(path.as_bytes());
    hasher.update([0u8]);
    hasher.update(mutated_source.as_bytes());
    hex::encode(&hasher.finalize()[..4])
}

/// Enumerate, apply and deduplicate mutants for every source file.
///
/// `sources` maps relative paths to file text. All files are parsed before
/// any mutant is produced, so a syntax error aborts the whole run.
pub fn generate_mutants(
    sources: &BTreeMap<String, String>,
    enabled_operators: &[Operator],
    seed: u64,
) -> Result<MutantSet, PipelineError> {
    let mut ops = enabled_operators.to_vec();
    ops.sort();
    ops.dedup();

    let mut units = Vec::with_capacity(sources.len());
    for (path, text) in sources {
        let unit = parse(text).map_err(|error| PipelineError::Syntax {
            path: path.clone(),
            error,
        })?;
        units.push((path, text, unit));
    }

    let mut mutants = Vec::new();
    let mut duplicates_removed = BTreeMap::new();
    let mut ordinals: BTreeMap<Operator, usize> = BTreeMap::new();
    for (path, text, unit) in &units {
        let cx = Context::new(unit, text).with_seed(seed);
        let mut points = enumerate_all(&ops, &cx);
        points.sort_by(|a, b| {
            (
                a.target_span.start_byte,
                a.operator.code(),
                a.target_span.end_byte,
                &a.replacement_text,
            )
                .cmp(&(
                    b.target_span.start_byte,
                    b.operator.code(),
                    b.target_span.end_byte,
                    &b.replacement_text,
                ))
        });
        let mut seen = HashSet::new();
        for point in points {
            let mutated = apply_edit(text, &point)?;
            if mutated == **text || !seen.insert(mutated.clone()) {
                *duplicates_removed.entry(point.operator.code().to_string()).or_insert(0) += 1;
                continue;
            }
            let ordinal = ordinals.entry(point.operator).or_insert(0);
            *ordinal += 1;
            let id = format!("{}-{}-{}", point.operator.code(), ordinal, content_digest(path, &mutated));
            mutants.push(Mutant {
                id,
                point,
                source_path: path.to_string(),
                mutated_source: mutated,
                status: MutantStatus::Generated,
            });
        }
    }

    Ok(MutantSet {
        original_sources: sources.clone(),
        mutants,
        seed,
        enabled_operators: ops,
        duplicates_removed,
    })
}

/// Ids listed in a marks file: one per line, `#` starts a comment.
pub fn parse_marks(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(str::to_string)
        .collect()
}

/// Mark listed mutants as equivalent. Returns one warning per id that is
/// unknown or no longer in the `generated` state.
pub fn apply_equivalence_marks(set: &mut MutantSet, ids: &[String]) -> Vec<String> {
    let mut warnings = Vec::new();
    for id in ids {
        match set.get_mut(id) {
            None => warnings.push(format!("equivalence mark for unknown mutant `{id}`")),
            Some(m) if m.status == MutantStatus::EquivalentMarked => {}
            Some(m) => {
                if let Err(e) = m.set_status(MutantStatus::EquivalentMarked) {
                    warnings.push(e.to_string());
                }
            }
        }
    }
    warnings
}

pub fn load_equivalence_marks(set: &mut MutantSet, marks_file: &Path) -> Result<Vec<String>, PipelineError> {
    let text = std::fs::read_to_string(marks_file).map_err(|e| PipelineError::io(marks_file, e))?;
    Ok(apply_equivalence_marks(set, &parse_marks(&text)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::span::Span;

    fn point(start: usize, end: usize, original: &str, replacement: &str) -> MutationPoint {
        MutationPoint {
            operator: Operator::Aorb,
            target_span: Span {
                start_byte: start,
                end_byte: end,
                start_line: 1,
                start_col: start + 1,
            },
            original_text: original.into(),
            replacement_text: replacement.into(),
            node_path: vec![],
            description: String::new(),
        }
    }

    #[test]
    fn apply_edit_splices() {
        assert_eq!(apply_edit("ab+cd", &point(2, 3, "+", "-")).unwrap(), "ab-cd");
    }

    #[test]
    fn apply_edit_rejects_stale_point() {
        let err = apply_edit("ab*cd", &point(2, 3, "+", "-")).unwrap_err();
        assert_eq!(err.found, "*");
        assert!(apply_edit("ab", &point(2, 3, "+", "-")).is_err());
    }

    #[test]
    fn status_moves_forward_only() {
        use MutantStatus::*;
        assert!(Generated.can_become(Pending));
        assert!(Generated.can_become(CompileFailed));
        assert!(Pending.can_become(Killed));
        assert!(!CompileFailed.can_become(Killed));
        assert!(!Killed.can_become(Survived));
        assert!(!Pending.can_become(Generated));
        assert!(!Generated.can_become(Killed));
    }

    #[test]
    fn empty_contract_has_no_mutants() {
        let sources = BTreeMap::from([("c.sol".to_string(), "contract C {}".to_string())]);
        let set = generate_mutants(&sources, &Operator::ALL, 0).unwrap();
        assert!(set.mutants.is_empty());
    }

    #[test]
    fn ids_are_stable_and_well_formed() {
        let src = "contract C { function f(uint x) view returns (uint) { return x + 1; } }";
        let sources = BTreeMap::from([("c.sol".to_string(), src.to_string())]);
        let a = generate_mutants(&sources, &Operator::ALL, 0).unwrap();
        let b = generate_mutants(&sources, &Operator::ALL, 0).unwrap();
        assert_eq!(a, b);
        for m in &a.mutants {
            let parts: Vec<_> = m.id.split('-').collect();
            assert_eq!(parts.len(), 3);
            assert_eq!(parts[0], m.point.operator.code());
            assert_eq!(parts[2].len(), 8);
        }
        let fsc: Vec<_> = a.mutants.iter().filter(|m| m.point.operator == Operator::Fsc).collect();
        assert_eq!(fsc.len(), 1);
        assert!(fsc[0].mutated_source.contains("pure returns"));
    }

    #[test]
    fn cross_operator_duplicates_are_counted() {
        // ROR and CSC both rewrite `x > 1` to `true`/`false`; CSC wins the tie.
        let src = "contract C { function f(uint x) { if (x > 1) {} } }";
        let sources = BTreeMap::from([("c.sol".to_string(), src.to_string())]);
        let set = generate_mutants(&sources, &[Operator::Ror, Operator::Csc], 0).unwrap();
        assert_eq!(set.duplicates_removed.get("ROR"), Some(&2));
        assert_eq!(set.mutants.iter().filter(|m| m.point.operator == Operator::Csc).count(), 2);
        assert_eq!(set.mutants.len(), 7);
    }

    #[test]
    fn parse_failure_aborts() {
        let sources = BTreeMap::from([
            ("a.sol".to_string(), "contract A { function f() { a = 1 + 2; } }".to_string()),
            ("b.sol".to_string(), "contract B { function f() { assembly {} } }".to_string()),
        ]);
        let err = generate_mutants(&sources, &Operator::ALL, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("b.sol:1:29: "), "{msg}");
    }

    #[test]
    fn marks_parse_comments_and_warn_on_unknown() {
        assert_eq!(parse_marks("# header\nA-1-x  # why\n\n  B-2-y\n"), ["A-1-x", "B-2-y"]);
        let src = "contract C { function f() view {} }";
        let sources = BTreeMap::from([("c.sol".to_string(), src.to_string())]);
        let mut set = generate_mutants(&sources, &[Operator::Fsc], 0).unwrap();
        let id = set.mutants[0].id.clone();
        let warnings = apply_equivalence_marks(&mut set, &[id, "NOPE-1-00000000".into()]);
        assert_eq!(set.mutants[0].status, MutantStatus::EquivalentMarked);
        assert_eq!(warnings.len(), 1);
    }
}
