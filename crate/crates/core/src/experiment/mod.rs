//! Test-adequacy experiment: coverage-equivalent versus mutation-equivalent
//! test subsets, judged on held-out mutants.
//!
//! Each run splits the useful mutants into a calibration half M1 and a
//! verification half M2, builds TS_Cov (same line and branch coverage as the
//! full suite) and TS_MS1 (same kill count on M1), then scores all three
//! suites on M2.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::KillMatrix;
use crate::rng::{derive_seed, SplitMix64};

mod wilcoxon;

pub use wilcoxon::{midranks, wilcoxon_paired, Method, WilcoxonError, WilcoxonResult, EXACT_LIMIT, MIN_PAIRS};

pub const DEFAULT_RUNS: usize = 10;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment needs at least 2 useful mutants, found {0}")]
    Infeasible(usize),
    #[error("experiment needs at least 1 run")]
    NoRuns,
    #[error("coverage file has no entry for test `{0}`")]
    MissingCoverage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCoverage {
    pub id: String,
    #[serde(default)]
    pub lines: BTreeSet<String>,
    #[serde(default)]
    pub branches: BTreeSet<String>,
}

/// Coverage file: `{"tests": [{"id", "lines", "branches"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoverageMatrix {
    pub tests: Vec<TestCoverage>,
}

impl CoverageMatrix {
    pub fn read(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| ExperimentError::Input {
            path: path.to_path_buf(),
            message: format!("malformed coverage: {e}"),
        })
    }

    pub fn get(&self, id: &str) -> Option<&TestCoverage> {
        self.tests.iter().find(|t| t.id == id)
    }

    /// Union of line and branch sets over the given tests.
    pub fn union<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut lines = BTreeSet::new();
        let mut branches = BTreeSet::new();
        for id in ids {
            if let Some(t) = self.get(id) {
                lines.extend(t.lines.iter().cloned());
                branches.extend(t.branches.iter().cloned());
            }
        }
        (lines, branches)
    }

    /// Keep only `test_ids`, in that order.
    pub fn restricted_to(&self, test_ids: &[String]) -> Result<CoverageMatrix, ExperimentError> {
        let tests = test_ids
            .iter()
            .map(|id| self.get(id).cloned().ok_or_else(|| ExperimentError::MissingCoverage(id.clone())))
            .collect::<Result<_, _>>()?;
        Ok(CoverageMatrix { tests })
    }
}

/// Uniform random halves: `|M1| = floor(n/2)`. Both halves keep the input
/// order.
pub fn split_mutants(ids: &[String], seed: u64) -> Result<(Vec<String>, Vec<String>), ExperimentError> {
    if ids.len() < 2 {
        return Err(ExperimentError::Infeasible(ids.len()));
    }
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    SplitMix64::new(seed).shuffle(&mut idx);
    let mut in_m1 = vec![false; ids.len()];
    for &i in &idx[..ids.len() / 2] {
        in_m1[i] = true;
    }
    let (m1, m2): (Vec<_>, Vec<_>) = ids.iter().cloned().zip(in_m1).partition(|(_, m1)| *m1);
    Ok((
        m1.into_iter().map(|(id, _)| id).collect(),
        m2.into_iter().map(|(id, _)| id).collect(),
    ))
}

/// Randomized greedy subset with the full suite's line and branch coverage.
/// Tests are returned in selection order.
pub fn select_ts_cov(coverage: &CoverageMatrix, seed: u64) -> Vec<String> {
    let (all_lines, all_branches) = coverage.union(coverage.tests.iter().map(|t| t.id.as_str()));
    let mut order: Vec<&TestCoverage> = coverage.tests.iter().collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut lines = BTreeSet::new();
    let mut branches = BTreeSet::new();
    let mut chosen = Vec::new();
    for t in order {
        if lines.len() == all_lines.len() && branches.len() == all_branches.len() {
            break;
        }
        let adds = t.lines.iter().any(|l| !lines.contains(l)) || t.branches.iter().any(|b| !branches.contains(b));
        if adds {
            lines.extend(t.lines.iter().cloned());
            branches.extend(t.branches.iter().cloned());
            chosen.push(t.id.clone());
        }
    }
    chosen
}

/// Randomized greedy subset that kills as many `rows` mutants as the full
/// suite. Tests are returned in selection order.
pub fn select_ts_ms1(matrix: &KillMatrix, rows: &[usize], seed: u64) -> Vec<String> {
    let target = rows.iter().filter(|&&r| matrix.is_killed(r)).count();
    let mut order: Vec<usize> = (0..matrix.test_ids.len()).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut killed = vec![false; rows.len()];
    let mut count = 0;
    let mut chosen = Vec::new();
    for t in order {
        if count == target {
            break;
        }
        let mut adds = false;
        for (k, &r) in rows.iter().enumerate() {
            if !killed[k] && matrix.cells[r][t].kills() {
                killed[k] = true;
                count += 1;
                adds = true;
            }
        }
        if adds {
            chosen.push(matrix.test_ids[t].clone());
        }
    }
    chosen
}

/// Percentage of `rows` killed by the tests in `columns` (unrounded).
pub fn subset_score(matrix: &KillMatrix, rows: &[usize], columns: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let killed = rows
        .iter()
        .filter(|&&r| columns.iter().any(|&c| matrix.cells[r][c].kills()))
        .count();
    100.0 * killed as f64 / rows.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub runs: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            runs: DEFAULT_RUNS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteScores {
    pub ts: f64,
    pub ts_cov: f64,
    pub ts_ms1: f64,
}

impl SuiteScores {
    fn mean(items: &[SuiteScores]) -> SuiteScores {
        let n = items.len() as f64;
        SuiteScores {
            ts: items.iter().map(|s| s.ts).sum::<f64>() / n,
            ts_cov: items.iter().map(|s| s.ts_cov).sum::<f64>() / n,
            ts_ms1: items.iter().map(|s| s.ts_ms1).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub m1: Vec<String>,
    pub m2: Vec<String>,
    pub ts_cov: Vec<String>,
    pub ts_ms1: Vec<String>,
    pub ms1: SuiteScores,
    pub ms2: SuiteScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub ms1: SuiteScores,
    pub ms2: SuiteScores,
    pub ts_cov_size: f64,
    pub ts_ms1_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub seed: u64,
    pub runs: Vec<RunRecord>,
    pub averages: Averages,
    /// `avg MS2(TS_Cov) / avg MS2(TS)`; absent when the denominator is 0.
    pub detection_rate_cov: Option<f64>,
    /// `avg MS2(TS_MS1) / avg MS2(TS)`; absent when the denominator is 0.
    pub detection_rate_ms1: Option<f64>,
    /// Paired test over per-run MS2(TS_MS1) against MS2(TS_Cov).
    pub wilcoxon: Option<WilcoxonResult>,
    pub wilcoxon_p: Option<f64>,
    /// Why the test was not computed, when it was not.
    pub wilcoxon_note: Option<String>,
}

impl ExperimentResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes") + "\n"
    }
}

/// Run the experiment over every row of `matrix`. Run `r` uses the seed
/// `derive_seed(config.seed, r)`.
pub fn run_experiment(
    matrix: &KillMatrix,
    coverage: &CoverageMatrix,
    config: &ExperimentConfig,
) -> Result<ExperimentResult, ExperimentError> {
    if config.runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    if matrix.rows() < 2 {
        return Err(ExperimentError::Infeasible(matrix.rows()));
    }
    let coverage = coverage.restricted_to(&matrix.test_ids)?;
    let row_of: HashMap<&str, usize> = matrix.mutant_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let col_of: HashMap<&str, usize> = matrix.test_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let all_cols: Vec<usize> = (0..matrix.test_ids.len()).collect();
    let rows_for = |ids: &[String]| -> Vec<usize> { ids.iter().map(|id| row_of[id.as_str()]).collect() };
    let cols_for = |ids: &[String]| -> Vec<usize> { ids.iter().map(|id| col_of[id.as_str()]).collect() };

    let mut runs = Vec::with_capacity(config.runs);
    for r in 0..config.runs {
        let seed = derive_seed(config.seed, r as u64);
        let (m1, m2) = split_mutants(&matrix.mutant_ids, derive_seed(seed, 0))?;
        let (m1_rows, m2_rows) = (rows_for(&m1), rows_for(&m2));
        let ts_cov = select_ts_cov(&coverage, derive_seed(seed, 1));
        let ts_ms1 = select_ts_ms1(matrix, &m1_rows, derive_seed(seed, 2));
        let (cov_cols, ms1_cols) = (cols_for(&ts_cov), cols_for(&ts_ms1));
        let scores = |rows: &[usize]| SuiteScores {
            ts: subset_score(matrix, rows, &all_cols),
            ts_cov: subset_score(matrix, rows, &cov_cols),
            ts_ms1: subset_score(matrix, rows, &ms1_cols),
        };
        runs.push(RunRecord {
            run: r,
            seed,
            ms1: scores(&m1_rows),
            ms2: scores(&m2_rows),
            m1,
            m2,
            ts_cov,
            ts_ms1,
        });
    }

    let ms1: Vec<SuiteScores> = runs.iter().map(|r| r.ms1).collect();
    let ms2: Vec<SuiteScores> = runs.iter().map(|r| r.ms2).collect();
    let n = runs.len() as f64;
    let averages = Averages {
        ms1: SuiteScores::mean(&ms1),
        ms2: SuiteScores::mean(&ms2),
        ts_cov_size: runs.iter().map(|r| r.ts_cov.len() as f64).sum::<f64>() / n,
        ts_ms1_size: runs.iter().map(|r| r.ts_ms1.len() as f64).sum::<f64>() / n,
    };
    let rate = |x: f64| (averages.ms2.ts > 0.0).then(|| x / averages.ms2.ts);
    let ms1_side: Vec<f64> = ms2.iter().map(|s| s.ts_ms1).collect();
    let cov_side: Vec<f64> = ms2.iter().map(|s| s.ts_cov).collect();
    let (wilcoxon, wilcoxon_note) = match wilcoxon_paired(&ms1_side, &cov_side) {
        Ok(w) => (Some(w), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ExperimentResult {
        seed: config.seed,
        detection_rate_cov: rate(averages.ms2.ts_cov),
        detection_rate_ms1: rate(averages.ms2.ts_ms1),
        wilcoxon_p: wilcoxon.as_ref().map(|w| w.p_value),
        wilcoxon,
        wilcoxon_note,
        averages,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::TestStatus;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn cov(entries: &[(&str, &[&str], &[&str])]) -> CoverageMatrix {
        CoverageMatrix {
            tests: entries
                .iter()
                .map(|(id, l, b)| TestCoverage {
                    id: id.to_string(),
                    lines: l.iter().map(|s| s.to_string()).collect(),
                    branches: b.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn split_sizes() {
        let (a, b) = split_mutants(&ids("m", 4), 1).unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        let (a, b) = split_mutants(&ids("m", 7), 1).unwrap();
        assert_eq!((a.len(), b.len()), (3, 4));
        assert!(split_mutants(&ids("m", 1), 1).is_err());
    }

    #[test]
    fn split_depends_on_seed() {
        let all = ids("m", 7);
        let a = split_mutants(&all, 1).unwrap();
        let b = split_mutants(&all, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn identical_coverage_picks_one() {
        let c = cov(&[("a", &["l1"], &["b1"]), ("b", &["l1"], &["b1"])]);
        assert_eq!(select_ts_cov(&c, 3).len(), 1);
    }

    #[test]
    fn disjoint_coverage_picks_all() {
        let c = cov(&[("a", &["l1"], &[]), ("b", &["l2"], &[]), ("c", &[], &["b1"])]);
        assert_eq!(select_ts_cov(&c, 3).len(), 3);
    }

    #[test]
    fn ts_ms1_empty_when_nothing_killed() {
        let m = KillMatrix {
            mutant_ids: ids("m", 2),
            test_ids: ids("t", 2),
            cells: vec![vec![TestStatus::Pass; 2]; 2],
        };
        assert!(select_ts_ms1(&m, &[0, 1], 5).is_empty());
    }

    #[test]
    fn ts_ms1_single_killer() {
        use TestStatus::*;
        let m = KillMatrix {
            mutant_ids: ids("m", 3),
            test_ids: ids("t", 3),
            cells: vec![vec![Pass, Fail, Pass], vec![Pass, Fail, Pass], vec![Pass, Pass, Pass]],
        };
        assert_eq!(select_ts_ms1(&m, &[0, 1, 2], 9), ["t1"]);
    }

    #[test]
    fn all_kill_matrix_gives_unit_rates() {
        let m = KillMatrix {
            mutant_ids: ids("m", 6),
            test_ids: ids("t", 3),
            cells: vec![vec![TestStatus::Fail; 3]; 6],
        };
        let c = cov(&[("t0", &["l"], &[]), ("t1", &["l"], &[]), ("t2", &["l"], &[])]);
        let r = run_experiment(&m, &c, &ExperimentConfig { runs: 10, seed: 4 }).unwrap();
        assert_eq!(r.detection_rate_cov, Some(1.0));
        assert_eq!(r.detection_rate_ms1, Some(1.0));
        assert!(r.wilcoxon_p.is_none());
        assert!(r.wilcoxon_note.is_some());
    }

    #[test]
    fn no_kills_gives_undefined_rates() {
        let m = KillMatrix {
            mutant_ids: ids("m", 4),
            test_ids: ids("t", 2),
            cells: vec![vec![TestStatus::Pass; 2]; 4],
        };
        let c = cov(&[("t0", &["l"], &[]), ("t1", &["k"], &[])]);
        let r = run_experiment(&m, &c, &ExperimentConfig::default()).unwrap();
        assert_eq!(r.detection_rate_cov, None);
        assert_eq!(r.detection_rate_ms1, None);
    }

    #[test]
    fn missing_coverage_is_an_error() {
        let m = KillMatrix {
            mutant_ids: ids("m", 2),
            test_ids: ids("t", 2),
            cells: vec![vec![TestStatus::Pass; 2]; 2],
        };
        let c = cov(&[("t0", &["l"], &[])]);
        assert!(matches!(
            run_experiment(&m, &c, &ExperimentConfig::default()),
            Err(ExperimentError::MissingCoverage(_))
        ));
    }
}
