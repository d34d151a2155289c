//! Compile adapter invocation: `<command> <workspace-dir>`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use log::warn;

use super::{mutant_dir, original_dir, MutantSet, MutantStatus, PipelineError};
use crate::process::{parallel_map, run_shell};

pub const DEFAULT_COMPILE_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone)]
pub struct CompileAdapter {
    pub command: String,
    pub timeout: Duration,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Compiles,
    Fails,
    TimedOut,
}

impl CompileAdapter {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            timeout: DEFAULT_COMPILE_TIMEOUT,
            workers: 1,
        }
    }

    fn compile(&self, workspace: &Path) -> Result<Verdict, PipelineError> {
        let script = format!("{} \"$1\"", self.command);
        let out = run_shell(&script, &[workspace.as_os_str()], None, Some(self.timeout))
            .map_err(|e| PipelineError::Adapter(format!("cannot start `{}`: {e}", self.command)))?;
        if out.timed_out {
            return Ok(Verdict::TimedOut);
        }
        match out.exit_code {
            Some(0) => Ok(Verdict::Compiles),
            Some(1) => Ok(Verdict::Fails),
            code => Err(PipelineError::Adapter(format!(
                "`{}` on {} exited with {}: {}",
                self.command,
                workspace.display(),
                code.map_or("a signal".to_string(), |c| format!("status {c}")),
                out.stderr.trim()
            ))),
        }
    }
}

/// Move every `generated` mutant to `pending` without compiling.
pub fn mark_all_pending(set: &mut MutantSet) {
    for m in &mut set.mutants {
        if m.status == MutantStatus::Generated {
            m.status = MutantStatus::Pending;
        }
    }
}

/// Compile the original and every `generated` mutant in their workspaces
/// under `out_dir`. Mutants that compile become `pending`, the rest
/// `compile_failed`. Returns warnings for timed-out compiles.
pub fn compile_filter(
    set: &mut MutantSet,
    adapter: &CompileAdapter,
    out_dir: &Path,
) -> Result<Vec<String>, PipelineError> {
    match adapter.compile(&original_dir(out_dir))? {
        Verdict::Compiles => {}
        Verdict::Fails => return Err(PipelineError::OriginalDoesNotCompile { code: 1 }),
        Verdict::TimedOut => {
            return Err(PipelineError::Adapter(format!(
                "compiling the original timed out after {}s",
                adapter.timeout.as_secs()
            )))
        }
    }

    let todo: Vec<(usize, PathBuf)> = set
        .mutants
        .iter()
        .enumerate()
        .filter(|(_, m)| m.status == MutantStatus::Generated)
        .map(|(i, m)| (i, mutant_dir(out_dir, &m.id)))
        .collect();
    let verdicts = parallel_map(&todo, adapter.workers, |(_, ws)| adapter.compile(ws));

    let mut warnings = Vec::new();
    for ((i, _), verdict) in todo.iter().zip(verdicts) {
        let mutant = &mut set.mutants[*i];
        let next = match verdict? {
            Verdict::Compiles => MutantStatus::Pending,
            Verdict::Fails => MutantStatus::CompileFailed,
            Verdict::TimedOut => {
                let msg = format!(
                    "compile of {} timed out after {}s; treating as compile failure",
                    mutant.id,
                    adapter.timeout.as_secs()
                );
                warn!("{msg}");
                warnings.push(msg);
                MutantStatus::CompileFailed
            }
        };
        mutant.status = next;
    }
    Ok(warnings)
}
