//! Runs the test suite against the original and each mutant and assembles
//! the kill matrix.
//!
//! Runner protocol: the test command prints `TESTRESULT <pass|fail> <id>`
//! lines on stdout; other lines are ignored. Exit 0 or 1 is a valid run,
//! anything else is an adapter error.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::pipeline::{MutantSet, MutantStatus};
use crate::process::{parallel_map, run_shell_until, Outcome};

pub const WORKSPACE_PLACEHOLDER: &str = "{workspace}";
pub const DEFAULT_PER_TEST_TIMEOUT_S: u64 = 300;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("test command must contain `{{workspace}}` exactly once, found {0} occurrences")]
    Placeholder(usize),
    #[error("baseline failed: {}", .failing.join(", "))]
    BaselineFailure { failing: Vec<String> },
    #[error("runner protocol violation: {0}")]
    Adapter(String),
    #[error("kill matrix row for `{mutant}` has {got} cells, expected {expected}")]
    DimensionMismatch {
        mutant: String,
        got: usize,
        expected: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestStatus {
    Pass,
    Fail,
    Timeout,
    Error,
}

impl TestStatus {
    /// Cells that count as detecting the mutant.
    pub fn kills(self) -> bool {
        matches!(self, TestStatus::Fail | TestStatus::Timeout)
    }
}

impl fmt::Display for TestStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestStatus::Pass => "pass",
            TestStatus::Fail => "fail",
            TestStatus::Timeout => "timeout",
            TestStatus::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_id: String,
    pub status: TestStatus,
    /// Absent for timeouts and for tests the runner never reported.
    pub duration_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunnerConfig {
    pub test_command: String,
    pub per_test_timeout_s: u64,
    pub parallel_workers: usize,
    pub prune_failing_baseline: bool,
    /// Stop a mutant's run at its first failing test. Off by default since
    /// the adequacy experiment needs complete rows.
    pub early_exit: bool,
}

impl RunnerConfig {
    pub fn new(test_command: impl Into<String>) -> Self {
        Self {
            test_command: test_command.into(),
            per_test_timeout_s: DEFAULT_PER_TEST_TIMEOUT_S,
            parallel_workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            prune_failing_baseline: false,
            early_exit: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        match self.test_command.matches(WORKSPACE_PLACEHOLDER).count() {
            1 => Ok(()),
            n => Err(HarnessError::Placeholder(n)),
        }
    }

    /// The shell command for one workspace, with the path quoted.
    pub fn command_for(&self, workspace: &Path) -> String {
        let path = workspace.to_string_lossy();
        let quoted = shlex::try_quote(&path).map_or_else(|_| path.to_string(), |q| q.into_owned());
        self.test_command.replacen(WORKSPACE_PLACEHOLDER, &quoted, 1)
    }
}

/// One `TESTRESULT` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolLine {
    pub passed: bool,
    pub test_id: String,
}

/// Parse a stdout line. `Ok(None)` for lines that are not results.
pub fn parse_protocol_line(line: &str) -> Result<Option<ProtocolLine>, HarnessError> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("TESTRESULT") {
        return Ok(None);
    }
    let passed = match parts.next() {
        Some("pass") => true,
        Some("fail") => false,
        _ => return Err(HarnessError::Adapter(format!("malformed result line {line:?}"))),
    };
    let test_id: Vec<&str> = parts.collect();
    if test_id.is_empty() {
        return Err(HarnessError::Adapter(format!("result line without test id {line:?}")));
    }
    Ok(Some(ProtocolLine {
        passed,
        test_id: test_id.join(" "),
    }))
}

/// Results in report order; the first report of an id wins.
fn collect_results(outcome: &Outcome) -> Result<Vec<TestResult>, HarnessError> {
    let mut results: Vec<TestResult> = Vec::new();
    let mut seen = HashMap::new();
    let mut last = Duration::ZERO;
    for (at, line) in &outcome.lines {
        let Some(parsed) = parse_protocol_line(line)? else { continue };
        let duration = at.saturating_sub(last);
        last = *at;
        if seen.contains_key(&parsed.test_id) {
            continue;
        }
        seen.insert(parsed.test_id.clone(), results.len());
        results.push(TestResult {
            test_id: parsed.test_id,
            status: if parsed.passed { TestStatus::Pass } else { TestStatus::Fail },
            duration_ms: Some(duration.as_millis() as u64),
        });
    }
    Ok(results)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Baseline {
    /// Everything the runner reported on the original.
    pub results: Vec<TestResult>,
    /// Tests used for mutant runs, in report order.
    pub test_ids: Vec<String>,
    /// Failing tests removed when pruning is on.
    pub pruned: Vec<String>,
}

/// Run the suite on the original project. No timeout applies here.
pub fn run_baseline(workspace: &Path, cfg: &RunnerConfig) -> Result<Baseline, HarnessError> {
    cfg.validate()?;
    let outcome = run_shell_until(&cfg.command_for(workspace), None, None, |_| false)
        .map_err(|e| HarnessError::Adapter(format!("cannot start test command: {e}")))?;
    match outcome.exit_code {
        Some(0 | 1) => {}
        code => {
            return Err(HarnessError::Adapter(format!(
                "baseline run exited with {}: {}",
                code.map_or("a signal".to_string(), |c| format!("status {c}")),
                outcome.stderr.trim()
            )))
        }
    }
    let results = collect_results(&outcome)?;
    if results.is_empty() {
        return Err(HarnessError::Adapter("baseline run reported no tests".into()));
    }
    let failing: Vec<String> = results
        .iter()
        .filter(|r| r.status != TestStatus::Pass)
        .map(|r| r.test_id.clone())
        .collect();
    if !failing.is_empty() && !cfg.prune_failing_baseline {
        return Err(HarnessError::BaselineFailure { failing });
    }
    let test_ids = results
        .iter()
        .filter(|r| r.status == TestStatus::Pass)
        .map(|r| r.test_id.clone())
        .collect();
    Ok(Baseline {
        results,
        test_ids,
        pruned: failing,
    })
}

/// Run the suite on one mutant workspace. Returns exactly one result per
/// entry of `test_ids`, in that order.
pub fn run_mutant(workspace: &Path, test_ids: &[String], cfg: &RunnerConfig) -> Result<Vec<TestResult>, HarnessError> {
    cfg.validate()?;
    let budget = Duration::from_secs(cfg.per_test_timeout_s.saturating_mul(test_ids.len().max(1) as u64));
    let early_exit = cfg.early_exit;
    let outcome = run_shell_until(&cfg.command_for(workspace), None, Some(budget), |line| {
        early_exit && line.split_whitespace().take(2).eq(["TESTRESULT", "fail"])
    })
    .map_err(|e| HarnessError::Adapter(format!("cannot start test command: {e}")))?;

    let reported: HashMap<String, TestResult> = collect_results(&outcome)?
        .into_iter()
        .map(|r| (r.test_id.clone(), r))
        .collect();
    let crashed = !outcome.timed_out && !matches!(outcome.exit_code, Some(0 | 1)) && !early_exit;
    if crashed {
        warn!(
            "runner on {} exited with {:?}; unreported tests recorded as error",
            workspace.display(),
            outcome.exit_code
        );
    }
    let missing = if outcome.timed_out {
        TestStatus::Timeout
    } else {
        TestStatus::Error
    };
    Ok(test_ids
        .iter()
        .map(|id| {
            reported.get(id).cloned().unwrap_or(TestResult {
                test_id: id.clone(),
                status: missing,
                duration_ms: None,
            })
        })
        .collect())
}

/// Run every `pending` mutant concurrently. Rows are keyed by mutant id.
pub fn run_pending(
    set: &MutantSet,
    workspace_of: impl Fn(&str) -> PathBuf + Sync,
    test_ids: &[String],
    cfg: &RunnerConfig,
) -> Result<BTreeMap<String, Vec<TestResult>>, HarnessError> {
    let pending: Vec<&str> = set
        .mutants
        .iter()
        .filter(|m| m.status == MutantStatus::Pending)
        .map(|m| m.id.as_str())
        .collect();
    let rows = parallel_map(&pending, cfg.parallel_workers, |id| {
        run_mutant(&workspace_of(id), test_ids, cfg)
    });
    let mut out = BTreeMap::new();
    for (id, row) in pending.into_iter().zip(rows) {
        out.insert(id.to_string(), row?);
    }
    Ok(out)
}

/// The q x n grid of mutant-by-test outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillMatrix {
    pub mutant_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub cells: Vec<Vec<TestStatus>>,
}

impl KillMatrix {
    pub fn rows(&self) -> usize {
        self.mutant_ids.len()
    }

    pub fn is_killed(&self, row: usize) -> bool {
        self.cells[row].iter().any(|c| c.kills())
    }

    pub fn killed_count(&self) -> usize {
        (0..self.rows()).filter(|&r| self.is_killed(r)).count()
    }

    pub fn surviving_count(&self) -> usize {
        self.rows() - self.killed_count()
    }

    pub fn row_of(&self, mutant_id: &str) -> Option<usize> {
        self.mutant_ids.iter().position(|id| id == mutant_id)
    }

    /// Matrix with one more test column.
    pub fn with_column(&self, test_id: impl Into<String>, column: &[TestStatus]) -> KillMatrix {
        assert_eq!(column.len(), self.rows(), "column length must match row count");
        let mut m = self.clone();
        m.test_ids.push(test_id.into());
        for (row, cell) in m.cells.iter_mut().zip(column) {
            row.push(*cell);
        }
        m
    }

    /// SHA-256 over the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("matrix serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes") + "\n"
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        write_file(path, self.to_json().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let m: KillMatrix = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Adapter(format!("{}: malformed matrix: {e}", path.display())))?;
        if m.cells.len() != m.mutant_ids.len() {
            return Err(HarnessError::Adapter(format!(
                "{}: {} rows for {} mutants",
                path.display(),
                m.cells.len(),
                m.mutant_ids.len()
            )));
        }
        for (id, row) in m.mutant_ids.iter().zip(&m.cells) {
            if row.len() != m.test_ids.len() {
                return Err(HarnessError::DimensionMismatch {
                    mutant: id.clone(),
                    got: row.len(),
                    expected: m.test_ids.len(),
                });
            }
        }
        Ok(m)
    }
}

/// Assemble the matrix in `mutant_ids` x `test_ids` order.
pub fn build_kill_matrix(
    mutant_ids: &[String],
    test_ids: &[String],
    rows: &BTreeMap<String, Vec<TestResult>>,
) -> Result<KillMatrix, HarnessError> {
    let mut cells = Vec::with_capacity(mutant_ids.len());
    for id in mutant_ids {
        let row = rows.get(id).map(Vec::as_slice).unwrap_or(&[]);
        let by_test: HashMap<&str, TestStatus> = row.iter().map(|r| (r.test_id.as_str(), r.status)).collect();
        let cells_row: Option<Vec<TestStatus>> = test_ids.iter().map(|t| by_test.get(t.as_str()).copied()).collect();
        match cells_row {
            Some(r) if row.len() == test_ids.len() => cells.push(r),
            _ => {
                return Err(HarnessError::DimensionMismatch {
                    mutant: id.clone(),
                    got: row.len(),
                    expected: test_ids.len(),
                })
            }
        }
    }
    Ok(KillMatrix {
        mutant_ids: mutant_ids.to_vec(),
        test_ids: test_ids.to_vec(),
        cells,
    })
}

/// Set `killed`/`survived` on every mutant that has a matrix row.
pub fn apply_kill_statuses(set: &mut MutantSet, matrix: &KillMatrix) {
    for (row, id) in matrix.mutant_ids.iter().enumerate() {
        if let Some(m) = set.get_mut(id) {
            let next = if matrix.is_killed(row) {
                MutantStatus::Killed
            } else {
                MutantStatus::Survived
            };
            if let Err(e) = m.set_status(next) {
                warn!("{e}");
            }
        }
    }
}

/// One line of `results.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub mutant_id: String,
    pub test_id: String,
    pub status: TestStatus,
    pub duration_ms: Option<u64>,
}

/// Write rows as JSON lines, mutants in `order`.
pub fn write_results_log(
    path: &Path,
    order: &[String],
    rows: &BTreeMap<String, Vec<TestResult>>,
) -> Result<(), HarnessError> {
    let mut buf = Vec::new();
    for id in order {
        for r in rows.get(id).into_iter().flatten() {
            let rec = ResultRecord {
                mutant_id: id.clone(),
                test_id: r.test_id.clone(),
                status: r.status,
                duration_ms: r.duration_ms,
            };
            serde_json::to_writer(&mut buf, &rec).expect("record serializes");
            buf.write_all(b"\n").expect("vec write");
        }
    }
    write_file(path, &buf)
}

pub fn read_results_log(path: &Path) -> Result<Vec<ResultRecord>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| HarnessError::Adapter(format!("results log: {e}"))))
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
