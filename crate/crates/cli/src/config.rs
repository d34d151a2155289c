//! Tool configuration: a JSON file whose keys can each be overridden by a
//! same-named command-line flag.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use serde::{Deserialize, Serialize};
use solmut::harness::{RunnerConfig, DEFAULT_PER_TEST_TIMEOUT_S};
use solmut::operators::Operator;
use solmut::pipeline::DEFAULT_COMPILE_TIMEOUT;

use crate::CliError;

pub const DEFAULT_OUTPUT_DIR: &str = "out";
pub const DEFAULT_SOURCES: &str = "**/*.sol";

/// Every key is optional; unset keys take the defaults below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub sources: Option<Vec<String>>,
    pub project_root: Option<PathBuf>,
    pub operators: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub compile_command: Option<String>,
    pub compile_timeout_s: Option<u64>,
    pub test_command: Option<String>,
    pub per_test_timeout_s: Option<u64>,
    pub parallel_workers: Option<usize>,
    pub prune_failing_baseline: Option<bool>,
    pub early_exit: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub equivalence_marks: Option<PathBuf>,
    pub coverage_file: Option<PathBuf>,
    pub experiment_runs: Option<usize>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated operator codes to enable.
    #[arg(long, global = true, value_name = "CODES")]
    pub operators: Option<String>,
    /// Output directory.
    #[arg(long = "out", visible_alias = "output-dir", global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Concurrent compile and test processes.
    #[arg(long = "jobs", visible_alias = "parallel-workers", global = true)]
    pub parallel_workers: Option<usize>,
    /// Source globs relative to the project root (repeatable).
    #[arg(long = "sources", global = true, value_name = "GLOB", value_delimiter = ',')]
    pub sources: Vec<String>,
    /// Directory holding the contracts (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub project_root: Option<PathBuf>,
    /// Compile adapter, invoked as `<command> <workspace-dir>`.
    #[arg(long, global = true, value_name = "CMD")]
    pub compile_command: Option<String>,
    /// Compile adapter timeout per mutant.
    #[arg(long, global = true, value_name = "SECS")]
    pub compile_timeout_s: Option<u64>,
    /// Test runner; must contain `{workspace}` once.
    #[arg(long, global = true, value_name = "CMD")]
    pub test_command: Option<String>,
    /// Per-test budget; a run may take this times the number of tests.
    #[arg(long, global = true, value_name = "SECS")]
    pub per_test_timeout_s: Option<u64>,
    /// Drop tests that fail on the original instead of aborting.
    #[arg(long, global = true)]
    pub prune_failing_baseline: bool,
    /// Stop a mutant's run at its first failing test.
    #[arg(long, global = true)]
    pub early_exit: bool,
    /// File of mutant ids to mark equivalent.
    #[arg(long, global = true, value_name = "PATH")]
    pub equivalence_marks: Option<PathBuf>,
    /// Per-test line and branch coverage (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub coverage_file: Option<PathBuf>,
    /// Repetitions of the subset experiment.
    #[arg(long, global = true, value_name = "N")]
    pub experiment_runs: Option<usize>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolConfig {
    pub sources: Vec<String>,
    pub project_root: PathBuf,
    pub operators: Vec<Operator>,
    pub seed: u64,
    pub compile_command: Option<String>,
    pub compile_timeout: Duration,
    pub test_command: Option<String>,
    pub per_test_timeout_s: u64,
    pub parallel_workers: usize,
    pub prune_failing_baseline: bool,
    pub early_exit: bool,
    pub output_dir: PathBuf,
    pub equivalence_marks: Option<PathBuf>,
    pub coverage_file: Option<PathBuf>,
    pub experiment_runs: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ToolConfig {
    /// Merge the config file (if any) with flags. Relative paths in the file
    /// resolve against the file's directory; flag paths against the current
    /// directory.
    pub fn load(args: &GlobalArgs) -> Result<Self, CliError> {
        let (file, base) = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
                let file: FileConfig =
                    serde_json::from_str(&text).map_err(|e| CliError::input(path, format!("invalid config: {e}")))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let rel = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let operators = match (&args.operators, &file.operators) {
            (Some(csv), _) => solmut::operators::parse_operator_list(csv)?,
            (None, Some(list)) => solmut::operators::parse_operator_list(&list.join(","))?,
            (None, None) => Operator::ALL.to_vec(),
        };
        let sources = if !args.sources.is_empty() {
            args.sources.clone()
        } else {
            file.sources.clone().unwrap_or_else(|| vec![DEFAULT_SOURCES.to_string()])
        };
        let project_root = args
            .project_root
            .clone()
            .or_else(|| file.project_root.clone().map(rel))
            .unwrap_or_else(|| PathBuf::from("."));
        let output_dir = args
            .output_dir
            .clone()
            .or_else(|| file.output_dir.clone().map(rel))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        let experiment_runs = args
            .experiment_runs
            .or(file.experiment_runs)
            .unwrap_or(solmut::experiment::DEFAULT_RUNS);
        if experiment_runs == 0 {
            return Err(CliError::Usage("experiment_runs must be at least 1".into()));
        }
        let parallel_workers = args
            .parallel_workers
            .or(file.parallel_workers)
            .unwrap_or_else(default_workers)
            .max(1);

        Ok(ToolConfig {
            sources,
            project_root,
            operators,
            seed: args.seed.or(file.seed).unwrap_or(0),
            compile_command: args.compile_command.clone().or(file.compile_command),
            compile_timeout: args
                .compile_timeout_s
                .or(file.compile_timeout_s)
                .map_or(DEFAULT_COMPILE_TIMEOUT, Duration::from_secs),
            test_command: args.test_command.clone().or(file.test_command),
            per_test_timeout_s: args
                .per_test_timeout_s
                .or(file.per_test_timeout_s)
                .unwrap_or(DEFAULT_PER_TEST_TIMEOUT_S),
            parallel_workers,
            prune_failing_baseline: args.prune_failing_baseline || file.prune_failing_baseline.unwrap_or(false),
            early_exit: args.early_exit || file.early_exit.unwrap_or(false),
            output_dir,
            equivalence_marks: args.equivalence_marks.clone().or_else(|| file.equivalence_marks.map(rel)),
            coverage_file: args.coverage_file.clone().or_else(|| file.coverage_file.map(rel)),
            experiment_runs,
        })
    }

    pub fn runner(&self) -> Result<RunnerConfig, CliError> {
        let command = self
            .test_command
            .clone()
            .ok_or_else(|| CliError::Usage("test_command is not configured".into()))?;
        let mut cfg = RunnerConfig::new(command);
        cfg.per_test_timeout_s = self.per_test_timeout_s;
        cfg.parallel_workers = self.parallel_workers;
        cfg.prune_failing_baseline = self.prune_failing_baseline;
        cfg.early_exit = self.early_exit;
        Ok(cfg)
    }

    /// Settings recorded in reports. Paths and commands are left out so the
    /// output does not depend on where the tool ran.
    pub fn summary(&self) -> serde_json::Value {
        let mut map = BTreeMap::new();
        map.insert("seed", serde_json::json!(self.seed));
        map.insert(
            "operators",
            serde_json::json!(self.operators.iter().map(|o| o.code()).collect::<Vec<_>>()),
        );
        map.insert("per_test_timeout_s", serde_json::json!(self.per_test_timeout_s));
        map.insert("prune_failing_baseline", serde_json::json!(self.prune_failing_baseline));
        map.insert("early_exit", serde_json::json!(self.early_exit));
        serde_json::json!(map)
    }
}
