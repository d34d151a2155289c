//! Mutation testing for Solidity contracts.
//!
//! The crate is organised as a pipeline: [`frontend`] parses sources into a
//! span-annotated tree, [`operators`] enumerate candidate edits,
//! [`pipeline`] turns them into deduplicated, compile-checked mutants,
//! [`harness`] runs a test suite against each one, [`report`] scores the
//! result and [`experiment`] compares coverage- and mutation-guided test
//! subsets.

pub mod experiment;
pub mod frontend;
pub mod harness;
pub mod operators;
pub mod pipeline;
pub mod process;
pub mod report;
pub mod rng;

pub use experiment::{run_experiment, wilcoxon_paired, CoverageMatrix, ExperimentConfig, ExperimentResult};
pub use frontend::{parse, tokenize, SourceUnit, Span, SyntaxError};
pub use harness::{build_kill_matrix, KillMatrix, RunnerConfig, TestResult, TestStatus};
pub use operators::{enumerate, enumerate_all, Context, MutationPoint, Operator};
pub use pipeline::{apply_edit, generate_mutants, Mutant, MutantSet, MutantStatus};
pub use report::{mutation_score, operator_stats, MutationReport, OperatorStats};

/// Version recorded in catalogs and reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
