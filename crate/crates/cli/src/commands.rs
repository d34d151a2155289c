//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use solmut::experiment::{run_experiment, CoverageMatrix, ExperimentConfig};
use solmut::frontend::{parse as parse_source, traverse};
use solmut::harness::{
    apply_kill_statuses, build_kill_matrix, run_baseline, run_pending, write_results_log, KillMatrix,
};
use solmut::pipeline::{
    compile_filter, generate_mutants, load_equivalence_marks, mark_all_pending, materialize_mutant,
    materialize_original, mutant_dir, original_dir, Catalog, CompileAdapter, MutantRecord, MutantSet, MutantStatus,
    PipelineError,
};
use solmut::report::{format_score, mutation_score, MutationReport};

use crate::config::ToolConfig;
use crate::CliError;

const CATALOG: &str = "mutants.json";
const MATRIX: &str = "matrix.json";
const BASELINE: &str = "baseline.json";
const RESULTS: &str = "results.jsonl";
const EXPERIMENT: &str = "experiment.json";

pub fn parse(paths: &[PathBuf]) -> Result<(), CliError> {
    let mut failures = 0;
    for path in paths {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failures += 1;
                continue;
            }
        };
        match parse_source(&text) {
            Ok(unit) => {
                let trace = traverse(&unit);
                let functions = trace.iter().filter(|t| t.kind == "FunctionDefinition").count();
                println!(
                    "{}: {} nodes, {} contracts, {} functions",
                    path.display(),
                    trace.len(),
                    unit.contracts.len(),
                    functions
                );
            }
            Err(error) => {
                let diag = PipelineError::Syntax {
                    path: path.display().to_string(),
                    error,
                };
                eprintln!("{diag}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        return Err(CliError::ParseFailures(failures));
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(dir, e))
}

/// Source files matching the configured globs, keyed by their path relative
/// to the project root. Files under the output directory are skipped.
fn collect_sources(cfg: &ToolConfig) -> Result<BTreeMap<String, String>, CliError> {
    let root = cfg
        .project_root
        .canonicalize()
        .map_err(|e| CliError::input(&cfg.project_root, e))?;
    let out = cfg.output_dir.canonicalize().ok();
    let mut sources = BTreeMap::new();
    for pattern in &cfg.sources {
        let full = root.join(pattern);
        let matches = glob::glob(&full.to_string_lossy())
            .map_err(|e| CliError::Usage(format!("bad source glob `{pattern}`: {e}")))?;
        let mut any = false;
        for entry in matches {
            let path = entry.map_err(|e| CliError::input(e.path(), e.error()))?;
            if !path.is_file() {
                continue;
            }
            let abs = path.canonicalize().map_err(|e| CliError::input(&path, e))?;
            if out.as_ref().is_some_and(|o| abs.starts_with(o)) {
                continue;
            }
            let Ok(rel) = abs.strip_prefix(&root) else {
                continue;
            };
            let key = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            let text = fs::read_to_string(&abs).map_err(|e| CliError::input(&abs, e))?;
            sources.insert(key, text);
            any = true;
        }
        if !any {
            warn!("source glob `{pattern}` matched no files");
        }
    }
    if sources.is_empty() {
        return Err(CliError::Usage(format!(
            "no source files under {} match {}",
            cfg.project_root.display(),
            cfg.sources.join(", ")
        )));
    }
    Ok(sources)
}

fn write_records(set: &MutantSet, out: &Path) -> Result<(), CliError> {
    for m in &set.mutants {
        MutantRecord::from(m).write(&mutant_dir(out, &m.id))?;
    }
    Ok(())
}

pub fn mutate(cfg: &ToolConfig) -> Result<(), CliError> {
    let out = &cfg.output_dir;
    ensure_dir(out)?;
    let sources = collect_sources(cfg)?;
    let mut set = generate_mutants(&sources, &cfg.operators, cfg.seed)?;
    if let Some(marks) = &cfg.equivalence_marks {
        for w in load_equivalence_marks(&mut set, marks)? {
            eprintln!("warning: {w}");
        }
    }

    let mutants_root = out.join("mutants");
    if mutants_root.exists() {
        fs::remove_dir_all(&mutants_root).map_err(|e| CliError::input(&mutants_root, e))?;
    }
    materialize_original(&cfg.project_root, out)?;
    for m in &set.mutants {
        materialize_mutant(&cfg.project_root, out, m)?;
    }
    info!("materialized {} mutant workspaces", set.mutants.len());

    match &cfg.compile_command {
        Some(command) => {
            let mut adapter = CompileAdapter::new(command.clone());
            adapter.timeout = cfg.compile_timeout;
            adapter.workers = cfg.parallel_workers;
            compile_filter(&mut set, &adapter, out)?;
            write_records(&set, out)?;
        }
        None => {
            mark_all_pending(&mut set);
            write_records(&set, out)?;
        }
    }

    Catalog::from_set(&set).write(&out.join(CATALOG))?;

    for op in &set.enabled_operators {
        let n = set.mutants.iter().filter(|m| m.point.operator == *op).count();
        if n > 0 {
            println!("{:<5} {n}", op.code());
        }
    }
    println!(
        "{} mutants: {} pending, {} compile_failed, {} equivalent; {} duplicates removed",
        set.mutants.len(),
        set.count_with(MutantStatus::Pending),
        set.count_with(MutantStatus::CompileFailed),
        set.count_with(MutantStatus::EquivalentMarked),
        set.duplicate_count()
    );
    Ok(())
}

fn read_catalog(cfg: &ToolConfig) -> Result<Catalog, CliError> {
    let path = cfg.output_dir.join(CATALOG);
    if !path.exists() {
        return Err(CliError::input(&path, "no mutant catalog; run `solmut mutate` first"));
    }
    Ok(Catalog::read(&path)?)
}

fn read_matrix(cfg: &ToolConfig) -> Result<KillMatrix, CliError> {
    let path = cfg.output_dir.join(MATRIX);
    if !path.exists() {
        return Err(CliError::input(&path, "no kill matrix; run `solmut run` first"));
    }
    Ok(KillMatrix::read(&path)?)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(value).expect("value serializes") + "\n";
    fs::write(path, body).map_err(|e| CliError::input(path, e))
}

pub fn run(cfg: &ToolConfig) -> Result<(), CliError> {
    let out = &cfg.output_dir;
    let runner = cfg.runner()?;
    runner.validate()?;
    let mut set = read_catalog(cfg)?.into_set(&cfg.project_root)?;

    let original = original_dir(out);
    if !original.exists() {
        materialize_original(&cfg.project_root, out)?;
    }
    let pending: Vec<String> = set
        .mutants
        .iter()
        .filter(|m| m.status == MutantStatus::Pending)
        .map(|m| m.id.clone())
        .collect();
    for id in &pending {
        if !mutant_dir(out, id).exists() {
            let m = set.get(id).expect("pending id comes from the set");
            materialize_mutant(&cfg.project_root, out, m)?;
        }
    }

    let baseline = run_baseline(&original, &runner)?;
    write_json(&out.join(BASELINE), &baseline)?;
    for t in &baseline.pruned {
        eprintln!("warning: test `{t}` fails on the original and was dropped");
    }
    info!(
        "baseline: {} tests; running {} mutants",
        baseline.test_ids.len(),
        pending.len()
    );

    let rows = run_pending(&set, |id| mutant_dir(out, id), &baseline.test_ids, &runner)?;
    let matrix = build_kill_matrix(&pending, &baseline.test_ids, &rows)?;
    write_results_log(&out.join(RESULTS), &pending, &rows)?;
    matrix.write(&out.join(MATRIX))?;

    apply_kill_statuses(&mut set, &matrix);
    for id in &pending {
        let m = set.get(id).expect("pending id comes from the set");
        MutantRecord::from(m).write(&mutant_dir(out, id))?;
    }
    println!(
        "{} mutants x {} tests: {} killed, {} survived",
        matrix.rows(),
        matrix.test_ids.len(),
        matrix.killed_count(),
        matrix.surviving_count()
    );
    Ok(())
}

pub fn score(cfg: &ToolConfig, print_table: bool) -> Result<(), CliError> {
    let out = &cfg.output_dir;
    let matrix = read_matrix(cfg)?;
    let score = mutation_score(&matrix)?;
    let catalog_path = out.join(CATALOG);
    let mut report = if catalog_path.exists() {
        MutationReport::from_catalog(&Catalog::read(&catalog_path)?, Some(&matrix), cfg.summary())?
    } else {
        let mut r = MutationReport::from_rows(Vec::new(), cfg.seed, Some(matrix.digest()), 0, cfg.summary());
        r.no_mutants = false;
        r
    };
    report.mutation_score = Some(score);
    report.emit(out)?;
    if print_table {
        print!("{}", report.to_markdown());
    } else {
        println!("mutation score: {}", format_score(score));
    }
    Ok(())
}

pub fn experiment(cfg: &ToolConfig) -> Result<(), CliError> {
    let matrix = read_matrix(cfg)?;
    let coverage_path = cfg
        .coverage_file
        .as_ref()
        .ok_or_else(|| CliError::Usage("coverage_file is not configured".into()))?;
    let coverage = CoverageMatrix::read(coverage_path)?;
    let result = run_experiment(
        &matrix,
        &coverage,
        &ExperimentConfig {
            runs: cfg.experiment_runs,
            seed: cfg.seed,
        },
    )?;
    let path = cfg.output_dir.join(EXPERIMENT);
    fs::write(&path, result.to_json()).map_err(|e| CliError::input(&path, e))?;

    let avg = &result.averages.ms2;
    println!(
        "average MS2: TS {:.2}, TS_Cov {:.2}, TS_MS1 {:.2}",
        avg.ts, avg.ts_cov, avg.ts_ms1
    );
    let rate = |r: Option<f64>| r.map_or("undefined".to_string(), |v| format!("{:.4}", v));
    println!(
        "detection rate: TS_Cov {}, TS_MS1 {}",
        rate(result.detection_rate_cov),
        rate(result.detection_rate_ms1)
    );
    match (&result.wilcoxon_p, &result.wilcoxon_note) {
        (Some(p), _) => println!("wilcoxon p: {p:.6}"),
        (None, Some(note)) => println!("wilcoxon p: not computed ({note})"),
        (None, None) => println!("wilcoxon p: not computed"),
    }
    Ok(())
}
