//! Mutation scores, per-operator statistics and report rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::KillMatrix;
use crate::operators::{Operator, OperatorGroup};
use crate::pipeline::{Catalog, MutantSet, MutantStatus};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("mutation score is undefined: no non-equivalent mutants")]
    NoMutants,
    #[error("mutant `{0}` is pending but has no kill-matrix row")]
    MissingRow(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed report: {message}")]
    Malformed { path: PathBuf, message: String },
}

/// `100 * part / whole` in tenths of a percent, rounded half up.
pub fn percent_tenths(part: u64, whole: u64) -> Option<u64> {
    if whole == 0 {
        return None;
    }
    Some((2000 * part + whole) / (2 * whole))
}

/// Percentage with one decimal, as a float for serialization.
pub fn percent_one_decimal(part: u64, whole: u64) -> Option<f64> {
    percent_tenths(part, whole).map(|t| t as f64 / 10.0)
}

/// `100 * (NonEquiv - Surviving) / NonEquiv`, rounded to one decimal.
pub fn score_from_counts(non_equivalent: u64, surviving: u64) -> Result<f64, ReportError> {
    let killed = non_equivalent.checked_sub(surviving).ok_or(ReportError::NoMutants)?;
    percent_one_decimal(killed, non_equivalent).ok_or(ReportError::NoMutants)
}

/// Score over the rows of `matrix`, which must exclude equivalent mutants.
pub fn mutation_score(matrix: &KillMatrix) -> Result<f64, ReportError> {
    score_from_counts(matrix.rows() as u64, matrix.surviving_count() as u64)
}

/// Score of one operator row: `killed / (killed + live)`, 0.0 when empty.
pub fn operator_score(killed: u64, live: u64) -> f64 {
    percent_one_decimal(killed, killed + live).unwrap_or(0.0)
}

pub fn format_score(score: f64) -> String {
    format!("{score:.1}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorStats {
    pub code: String,
    pub all: u64,
    pub equivalent: u64,
    pub compile_failed: u64,
    pub killed: u64,
    pub live: u64,
    pub score: f64,
}

impl OperatorStats {
    pub fn new(code: impl Into<String>, equivalent: u64, compile_failed: u64, killed: u64, live: u64) -> Self {
        OperatorStats {
            code: code.into(),
            all: equivalent + compile_failed + killed + live,
            equivalent,
            compile_failed,
            killed,
            live,
            score: operator_score(killed, live),
        }
    }

    fn empty(code: &str) -> Self {
        Self::new(code, 0, 0, 0, 0)
    }

    /// Sum of several rows under a new label.
    pub fn sum<'a>(code: &str, rows: impl IntoIterator<Item = &'a OperatorStats>) -> Self {
        let (mut e, mut c, mut k, mut l) = (0, 0, 0, 0);
        for r in rows {
            e += r.equivalent;
            c += r.compile_failed;
            k += r.killed;
            l += r.live;
        }
        Self::new(code, e, c, k, l)
    }
}

/// One row per enabled operator in report order, counting each mutant by its
/// status, or by its matrix row when it is still pending.
pub fn operator_stats(set: &MutantSet, matrix: Option<&KillMatrix>) -> Result<Vec<OperatorStats>, ReportError> {
    tally(
        &set.enabled_operators,
        set.mutants.iter().map(|m| (m.point.operator, m.id.as_str(), m.status)),
        matrix,
    )
}

/// [`operator_stats`] over a catalog, without re-reading sources.
pub fn catalog_stats(catalog: &Catalog, matrix: Option<&KillMatrix>) -> Result<Vec<OperatorStats>, ReportError> {
    tally(
        &catalog.enabled_operators,
        catalog.mutants.iter().map(|m| (m.operator, m.id.as_str(), m.status)),
        matrix,
    )
}

fn tally<'a>(
    enabled: &[Operator],
    mutants: impl IntoIterator<Item = (Operator, &'a str, MutantStatus)>,
    matrix: Option<&KillMatrix>,
) -> Result<Vec<OperatorStats>, ReportError> {
    let mut ops = enabled.to_vec();
    ops.sort();
    let mut rows: Vec<OperatorStats> = ops.iter().map(|op| OperatorStats::empty(op.code())).collect();
    for (operator, id, status) in mutants {
        let Some(idx) = ops.iter().position(|op| *op == operator) else {
            continue;
        };
        let status = match status {
            MutantStatus::Pending | MutantStatus::Generated => {
                let killed = matrix
                    .and_then(|mx| mx.row_of(id).map(|r| mx.is_killed(r)))
                    .ok_or_else(|| ReportError::MissingRow(id.to_string()))?;
                if killed {
                    MutantStatus::Killed
                } else {
                    MutantStatus::Survived
                }
            }
            s => s,
        };
        let r = &mut rows[idx];
        match status {
            MutantStatus::EquivalentMarked => r.equivalent += 1,
            MutantStatus::CompileFailed => r.compile_failed += 1,
            MutantStatus::Killed => r.killed += 1,
            _ => r.live += 1,
        }
    }
    Ok(rows
        .into_iter()
        .map(|r| OperatorStats::new(r.code, r.equivalent, r.compile_failed, r.killed, r.live))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTotals {
    pub general: OperatorStats,
    pub esc: OperatorStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationReport {
    pub tool_version: String,
    pub seed: u64,
    pub operators: Vec<OperatorStats>,
    pub totals: OperatorStats,
    pub groups: GroupTotals,
    pub matrix_digest: Option<String>,
    /// Whole-set score; absent when there are no non-equivalent mutants.
    pub mutation_score: Option<f64>,
    pub duplicates_removed: u64,
    pub no_mutants: bool,
    pub config: serde_json::Value,
}

fn group_of(code: &str) -> Option<OperatorGroup> {
    code.parse::<Operator>().ok().map(Operator::group)
}

impl MutationReport {
    pub fn build(
        set: &MutantSet,
        matrix: Option<&KillMatrix>,
        config: serde_json::Value,
    ) -> Result<Self, ReportError> {
        let no_mutants = set.mutants.is_empty();
        let operators = if no_mutants {
            Vec::new()
        } else {
            operator_stats(set, matrix)?
        };
        Ok(Self::from_rows(
            operators,
            set.seed,
            matrix.map(KillMatrix::digest),
            set.duplicate_count() as u64,
            config,
        ))
    }

    /// Report over a catalog's entries, resolving pending mutants through
    /// `matrix`.
    pub fn from_catalog(
        catalog: &Catalog,
        matrix: Option<&KillMatrix>,
        config: serde_json::Value,
    ) -> Result<Self, ReportError> {
        let operators = if catalog.mutants.is_empty() {
            Vec::new()
        } else {
            catalog_stats(catalog, matrix)?
        };
        Ok(Self::from_rows(
            operators,
            catalog.seed,
            matrix.map(KillMatrix::digest),
            catalog.duplicates_removed.values().sum::<usize>() as u64,
            config,
        ))
    }

    /// Assemble a report from precomputed rows.
    pub fn from_rows(
        operators: Vec<OperatorStats>,
        seed: u64,
        matrix_digest: Option<String>,
        duplicates_removed: u64,
        config: serde_json::Value,
    ) -> Self {
        let general = OperatorStats::sum(
            "general",
            operators.iter().filter(|r| group_of(&r.code) == Some(OperatorGroup::General)),
        );
        let esc = OperatorStats::sum(
            "esc",
            operators.iter().filter(|r| group_of(&r.code) == Some(OperatorGroup::Esc)),
        );
        let totals = OperatorStats::sum("total", &operators);
        let non_equivalent = totals.killed + totals.live;
        MutationReport {
            tool_version: crate::TOOL_VERSION.to_string(),
            seed,
            mutation_score: score_from_counts(non_equivalent, totals.live).ok(),
            no_mutants: operators.iter().all(|r| r.all == 0),
            operators,
            totals,
            groups: GroupTotals { general, esc },
            matrix_digest,
            duplicates_removed,
            config,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::new();
        md.push_str("# Mutation report\n\n");
        let _ = writeln!(md, "- tool version: {}", self.tool_version);
        let _ = writeln!(md, "- seed: {}", self.seed);
        match self.mutation_score {
            Some(s) => {
                let _ = writeln!(md, "- mutation score: {}", format_score(s));
            }
            None => md.push_str("- mutation score: undefined\n"),
        }
        let _ = writeln!(md, "- duplicate mutants removed: {}", self.duplicates_removed);
        if let Some(d) = &self.matrix_digest {
            let _ = writeln!(md, "- kill matrix digest: `{d}`");
        }
        md.push('\n');
        if self.no_mutants {
            md.push_str("No mutants.\n");
            return md;
        }
        md.push_str("| Operator | All | Equ. | Killed | Live | MS | Compile failed |\n");
        md.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
        let row = |md: &mut String, label: &str, r: &OperatorStats| {
            let _ = writeln!(
                md,
                "| {label} | {} | {} | {} | {} | {} | {} |",
                r.all,
                r.equivalent,
                r.killed,
                r.live,
                format_score(r.score),
                r.compile_failed
            );
        };
        for (group, subtotal) in [
            (OperatorGroup::General, &self.groups.general),
            (OperatorGroup::Esc, &self.groups.esc),
        ] {
            let members: Vec<_> = self
                .operators
                .iter()
                .filter(|r| group_of(&r.code) == Some(group))
                .collect();
            if members.is_empty() {
                continue;
            }
            for r in members {
                row(&mut md, &r.code, r);
            }
            row(&mut md, "Subtotal", subtotal);
        }
        row(&mut md, "**Total**", &self.totals);
        md
    }

    /// Write `report.json` and `report.md` into `out_dir`.
    pub fn emit(&self, out_dir: &Path) -> Result<(PathBuf, PathBuf), ReportError> {
        let json = out_dir.join("report.json");
        let md = out_dir.join("report.md");
        for (path, body) in [(&json, self.to_json()), (&md, self.to_markdown())] {
            fs::write(path, body).map_err(|source| ReportError::Io {
                path: path.clone(),
                source,
            })?;
        }
        Ok((json, md))
    }

    pub fn read(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| ReportError::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_up_rounding() {
        assert_eq!(percent_tenths(1, 8), Some(125)); // 12.5 exactly
        assert_eq!(percent_tenths(1, 3), Some(333));
        assert_eq!(percent_tenths(2, 3), Some(667));
        assert_eq!(percent_tenths(1, 16), Some(63)); // 6.25 -> 6.3
        assert_eq!(percent_tenths(0, 0), None);
    }

    #[test]
    fn score_undefined_without_mutants() {
        assert!(matches!(score_from_counts(0, 0), Err(ReportError::NoMutants)));
        assert_eq!(score_from_counts(4, 0).unwrap(), 100.0);
    }

    #[test]
    fn empty_operator_row_scores_zero() {
        assert_eq!(OperatorStats::new("FSC", 0, 0, 0, 4).score, 0.0);
        assert_eq!(OperatorStats::new("LOR", 0, 0, 0, 0).score, 0.0);
    }

    #[test]
    fn empty_report_is_flagged() {
        let r = MutationReport::from_rows(vec![], 0, None, 0, serde_json::Value::Null);
        assert!(r.no_mutants);
        assert!(r.mutation_score.is_none());
        assert!(r.to_markdown().contains("No mutants."));
    }
}
