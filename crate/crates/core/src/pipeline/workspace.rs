//! Per-mutant project copies and the mutant catalog.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::{apply_edit, Mutant, MutantSet, MutantStatus, PipelineError};
use crate::frontend::span::Span;
use crate::operators::{MutationPoint, Operator};

pub fn original_dir(out_dir: &Path) -> PathBuf {
    out_dir.join("original")
}

pub fn mutant_dir(out_dir: &Path, id: &str) -> PathBuf {
    out_dir.join("mutants").join(id)
}

/// Recursively copy `src` into a fresh `dest`, skipping `.git` and any
/// directory in `exclude`.
pub fn copy_project(src: &Path, dest: &Path, exclude: &[PathBuf]) -> Result<(), PipelineError> {
    if dest.exists() {
        fs::remove_dir_all(dest).map_err(|e| PipelineError::io(dest, e))?;
    }
    fs::create_dir_all(dest).map_err(|e| PipelineError::io(dest, e))?;
    let excluded: Vec<PathBuf> = exclude
        .iter()
        .filter_map(|p| p.canonicalize().ok())
        .chain(dest.canonicalize().ok())
        .collect();
    let walker = WalkDir::new(src).min_depth(1).into_iter().filter_entry(|entry| {
        if entry.file_name() == ".git" {
            return false;
        }
        match entry.path().canonicalize() {
            Ok(abs) => !excluded.iter().any(|ex| abs == *ex),
            Err(_) => true,
        }
    });
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| src.to_path_buf());
            PipelineError::io(path, e.into())
        })?;
        let rel = entry.path().strip_prefix(src).expect("walk stays under root");
        let target = dest.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&target).map_err(|e| PipelineError::io(&target, e))?;
        } else {
            fs::copy(entry.path(), &target).map_err(|e| PipelineError::io(entry.path(), e))?;
        }
    }
    Ok(())
}

/// Copy the unmodified project to `out/original/`.
pub fn materialize_original(project_root: &Path, out_dir: &Path) -> Result<PathBuf, PipelineError> {
    let dest = original_dir(out_dir);
    copy_project(project_root, &dest, &[out_dir.to_path_buf()])?;
    Ok(dest)
}

/// Copy the project to `out/mutants/<id>/`, splice in the mutant and write
/// `mutant.json` alongside.
pub fn materialize_mutant(project_root: &Path, out_dir: &Path, mutant: &Mutant) -> Result<PathBuf, PipelineError> {
    let dest = mutant_dir(out_dir, &mutant.id);
    copy_project(project_root, &dest, &[out_dir.to_path_buf()])?;
    let file = dest.join(&mutant.source_path);
    fs::write(&file, &mutant.mutated_source).map_err(|e| PipelineError::io(&file, e))?;
    MutantRecord::from(mutant).write(&dest)?;
    Ok(dest)
}

/// Contents of `mutant.json` inside a mutant workspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: String,
    pub operator: Operator,
    pub file: String,
    pub span: Span,
    pub original: String,
    pub replacement: String,
    pub status: MutantStatus,
}

impl From<&Mutant> for MutantRecord {
    fn from(m: &Mutant) -> Self {
        MutantRecord {
            id: m.id.clone(),
            operator: m.point.operator,
            file: m.source_path.clone(),
            span: m.point.target_span,
            original: m.point.original_text.clone(),
            replacement: m.point.replacement_text.clone(),
            status: m.status,
        }
    }
}

impl MutantRecord {
    pub fn write(&self, workspace: &Path) -> Result<(), PipelineError> {
        let path = workspace.join("mutant.json");
        let json = serde_json::to_string_pretty(self).expect("record serializes");
        fs::write(&path, json + "\n").map_err(|e| PipelineError::io(&path, e))
    }
}

/// One catalog row; the mutated text is rebuilt from the original file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub operator: Operator,
    pub file: String,
    pub span: Span,
    pub original: String,
    pub replacement: String,
    pub node_path: Vec<usize>,
    pub description: String,
    pub status: MutantStatus,
}

/// `out/mutants.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub tool_version: String,
    pub seed: u64,
    pub enabled_operators: Vec<Operator>,
    /// Relative source path to SHA-256 of its text at generation time.
    pub sources: BTreeMap<String, String>,
    pub duplicates_removed: BTreeMap<String, usize>,
    pub mutants: Vec<CatalogEntry>,
}

fn sha256_hex(text: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Catalog {
    pub fn from_set(set: &MutantSet) -> Self {
        Catalog {
            tool_version: crate::TOOL_VERSION.to_string(),
            seed: set.seed,
            enabled_operators: set.enabled_operators.clone(),
            sources: set
                .original_sources
                .iter()
                .map(|(path, text)| (path.clone(), sha256_hex(text)))
                .collect(),
            duplicates_removed: set.duplicates_removed.clone(),
            mutants: set
                .mutants
                .iter()
                .map(|m| CatalogEntry {
                    id: m.id.clone(),
                    operator: m.point.operator,
                    file: m.source_path.clone(),
                    span: m.point.target_span,
                    original: m.point.original_text.clone(),
                    replacement: m.point.replacement_text.clone(),
                    node_path: m.point.node_path.clone(),
                    description: m.point.description.clone(),
                    status: m.status,
                })
                .collect(),
        }
    }

    /// Rebuild the full set by re-reading sources under `project_root`.
    /// Fails if any source changed since the catalog was written.
    pub fn into_set(self, project_root: &Path) -> Result<MutantSet, PipelineError> {
        let mut original_sources = BTreeMap::new();
        for (path, digest) in &self.sources {
            let full = project_root.join(path);
            let text = fs::read_to_string(&full).map_err(|e| PipelineError::io(&full, e))?;
            if sha256_hex(&text) != *digest {
                return Err(PipelineError::Catalog(format!(
                    "{path} changed since the mutants were generated"
                )));
            }
            original_sources.insert(path.clone(), text);
        }
        let mut mutants = Vec::with_capacity(self.mutants.len());
        for entry in self.mutants {
            let source = original_sources
                .get(&entry.file)
                .ok_or_else(|| PipelineError::UnknownSource(entry.id.clone()))?;
            let point = MutationPoint {
                operator: entry.operator,
                target_span: entry.span,
                original_text: entry.original,
                replacement_text: entry.replacement,
                node_path: entry.node_path,
                description: entry.description,
            };
            let mutated_source = apply_edit(source, &point)?;
            mutants.push(Mutant {
                id: entry.id,
                point,
                source_path: entry.file,
                mutated_source,
                status: entry.status,
            });
        }
        Ok(MutantSet {
            original_sources,
            mutants,
            seed: self.seed,
            enabled_operators: self.enabled_operators,
            duplicates_removed: self.duplicates_removed,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes") + "\n"
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        fs::write(path, self.to_json()).map_err(|e| PipelineError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Catalog(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::generate_mutants;

    #[test]
    fn catalog_round_trips_through_project() {
        let dir = tempfile::tempdir().unwrap();
        let src = "contract C { function f(uint x) view returns (uint) { return x + 1; } }";
        fs::write(dir.path().join("c.sol"), src).unwrap();
        let sources = BTreeMap::from([("c.sol".to_string(), src.to_string())]);
        let set = generate_mutants(&sources, &Operator::ALL, 0).unwrap();
        let catalog = Catalog::from_set(&set);
        let back = Catalog::read_str(&catalog.to_json()).into_set(dir.path()).unwrap();
        assert_eq!(back, set);

        fs::write(dir.path().join("c.sol"), "contract D {}").unwrap();
        assert!(Catalog::from_set(&set).into_set(dir.path()).is_err());
    }

    #[test]
    fn materialize_skips_out_dir_and_git() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fs::create_dir_all(root.join(".git")).unwrap();
        fs::create_dir_all(root.join("contracts")).unwrap();
        fs::create_dir_all(root.join("out")).unwrap();
        fs::write(root.join(".git/HEAD"), "x").unwrap();
        fs::write(root.join("out/stale"), "x").unwrap();
        let src = "contract C { function f() view {} }";
        fs::write(root.join("contracts/c.sol"), src).unwrap();

        let sources = BTreeMap::from([("contracts/c.sol".to_string(), src.to_string())]);
        let set = generate_mutants(&sources, &[Operator::Fsc], 0).unwrap();
        let out = root.join("out");
        let ws = materialize_mutant(root, &out, &set.mutants[0]).unwrap();
        assert!(!ws.join(".git").exists());
        assert!(!ws.join("out").exists());
        assert_eq!(
            fs::read_to_string(ws.join("contracts/c.sol")).unwrap(),
            "contract C { function f() pure {} }"
        );
        let record: MutantRecord =
            serde_json::from_str(&fs::read_to_string(ws.join("mutant.json")).unwrap()).unwrap();
        assert_eq!(record.id, set.mutants[0].id);
        assert_eq!(fs::read_to_string(root.join("contracts/c.sol")).unwrap(), src);

        let orig = materialize_original(root, &out).unwrap();
        assert_eq!(fs::read_to_string(orig.join("contracts/c.sol")).unwrap(), src);
        assert!(!orig.join("out").exists());
    }

    impl Catalog {
        fn read_str(s: &str) -> Self {
            serde_json::from_str(s).unwrap()
        }
    }
}
