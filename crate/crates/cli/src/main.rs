//! `solmut`: mutation testing for Solidity projects.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 failing baseline.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use solmut::experiment::ExperimentError;
use solmut::harness::HarnessError;
use solmut::operators::UnknownOperator;
use solmut::pipeline::PipelineError;
use solmut::report::ReportError;

mod commands;
mod config;

use config::{GlobalArgs, ToolConfig};

#[derive(Debug, Parser)]
#[command(name = "solmut", version, about = "Mutation testing for Solidity smart contracts")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse files and print node, contract and function counts.
    Parse {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Generate mutants, write workspaces and the catalog.
    Mutate,
    /// Run the test suite on the original and every pending mutant.
    Run,
    /// Print the mutation score and write the report.
    Score,
    /// Write the report and print the per-operator table.
    Report,
    /// Compare coverage- and mutation-guided test subsets.
    Experiment,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Operator(#[from] UnknownOperator),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0} file(s) failed to parse")]
    ParseFailures(usize),
}

impl CliError {
    pub fn input(path: &Path, message: impl Display) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Harness(HarnessError::BaselineFailure { .. }) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .parse_default_env()
        .init();

    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = ToolConfig::load(&cli.global)?;
    match cli.command {
        Command::Parse { paths } => commands::parse(&paths),
        Command::Mutate => commands::mutate(&config),
        Command::Run => commands::run(&config),
        Command::Score => commands::score(&config, false),
        Command::Report => commands::score(&config, true),
        Command::Experiment => commands::experiment(&config),
    }
}
