//! Batch experiment runner for the eigenfilter simulator.
//!
//! Every experiment is planned into an ordered list of independent tasks,
//! executed on a worker pool, and streamed to the output in plan order:
//! results that finish early wait in a reorder buffer until every earlier
//! row has been written, so the file contents do not depend on scheduling.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use rayon::prelude::*;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat};
pub use error::{CliError, CliResult};
pub use output::{Record, ResultRow, RowWriter, RESULT_HEADER};

use experiments::Task;

/// Relative output paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "EIGENFILTER_OUTPUT_DIR";

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ALL_ABORTED: i32 = 2;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    /// Worker threads; `None` uses one per available core.
    pub workers: Option<usize>,
    /// Added to every configured seed.
    pub seed_offset: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSummary {
    pub rows: usize,
    pub successes: usize,
    /// `None` when the rows went to standard output.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunSummary {
    /// 0 when at least one run succeeded, 2 when none did (including an
    /// empty run).
    pub fn exit_code(&self) -> i32 {
        if self.successes > 0 {
            EXIT_SUCCESS
        } else {
            EXIT_ALL_ABORTED
        }
    }
}

fn resolve_output(config: &ExperimentConfig, options: &RunOptions) -> Option<PathBuf> {
    let path = options.out.clone().or_else(|| config.output.clone())?;
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            return Some(Path::new(&dir).join(path));
        }
    }
    Some(path)
}

fn resolve_format(
    config: &ExperimentConfig,
    options: &RunOptions,
    path: Option<&Path>,
) -> OutputFormat {
    options.format.or(config.format).unwrap_or_else(|| {
        match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => OutputFormat::Jsonl,
            _ => OutputFormat::Csv,
        }
    })
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write + Send>> {
    match path {
        None => Ok(Box::new(io::stdout())),
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| {
                    CliError::output(format!("cannot create {}: {e}", parent.display()))
                })?;
            }
            let file = File::create(p)
                .map_err(|e| CliError::output(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

fn worker_pool(workers: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::config("--workers must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))
}

/// Runs `tasks` on `pool` and writes their rows in task order as soon as
/// every earlier row is available. Returns `(rows, successes)`; on a task
/// error the rows before it are kept and the first error in task order is
/// returned.
pub fn execute<R, W>(
    tasks: Vec<Task<R>>,
    pool: &rayon::ThreadPool,
    writer: &mut RowWriter<W>,
) -> CliResult<(usize, usize)>
where
    R: Record + Send,
    W: Write,
{
    let (tx, rx) = mpsc::channel::<(usize, CliResult<R>)>();
    std::thread::scope(|scope| {
        let tasks = &tasks;
        scope.spawn(move || {
            pool.install(|| {
                (0..tasks.len()).into_par_iter().for_each_with(tx, |tx, i| {
                    // The receiver only disappears after a write error.
                    let _ = tx.send((i, tasks[i]()));
                });
            })
        });
        let mut pending: BTreeMap<usize, CliResult<R>> = BTreeMap::new();
        let mut next = 0;
        let (mut rows, mut successes) = (0, 0);
        for (i, result) in rx {
            pending.insert(i, result);
            while let Some(result) = pending.remove(&next) {
                next += 1;
                let row = result?;
                writer.write(&row)?;
                rows += 1;
                successes += usize::from(row.success());
            }
        }
        Ok((rows, successes))
    })
}

fn run_plan<R: Record + Send>(
    tasks: Vec<Task<R>>,
    config: &ExperimentConfig,
    options: &RunOptions,
) -> CliResult<RunSummary> {
    let path = resolve_output(config, options);
    let format = resolve_format(config, options, path.as_deref());
    let pool = worker_pool(options.workers)?;
    let mut writer = RowWriter::new::<R>(open_output(path.as_deref())?, format)?;
    let (rows, successes) = execute(tasks, &pool, &mut writer)?;
    Ok(RunSummary {
        rows,
        successes,
        output: path,
        format,
    })
}

/// Validates the configuration for `kind`, runs every task and writes the
/// rows. Config and capacity problems are reported before any output file is
/// created.
pub fn run_experiment(
    kind: ExperimentKind,
    config: &ExperimentConfig,
    options: &RunOptions,
) -> CliResult<RunSummary> {
    config.check_kind(kind)?;
    let seeds = config.seeds.expand(options.seed_offset);
    match kind {
        ExperimentKind::Filter => {
            run_plan(experiments::plan_filter(config, &seeds)?, config, options)
        }
        ExperimentKind::Sweep => {
            run_plan(experiments::plan_sweep(config, &seeds)?, config, options)
        }
        ExperimentKind::Thermal => {
            run_plan(experiments::plan_thermal(config, &seeds)?, config, options)
        }
        ExperimentKind::Qma => run_plan(experiments::plan_qma(config, &seeds)?, config, options),
        ExperimentKind::Naive => {
            run_plan(experiments::plan_naive(config, &seeds)?, config, options)
        }
        ExperimentKind::Jordan => {
            run_plan(experiments::plan_jordan(config, &seeds)?, config, options)
        }
        ExperimentKind::Bounds => {
            run_plan(experiments::plan_bounds(config, &seeds)?, config, options)
        }
    }
}

/// Loads the config at `path` and runs it; returns the process exit code
/// and reports errors on standard error.
pub fn run_from_path(kind: ExperimentKind, path: &Path, options: &RunOptions) -> i32 {
    let outcome = ExperimentConfig::load(path).and_then(|c| run_experiment(kind, &c, options));
    match outcome {
        Ok(summary) => {
            let target = summary
                .output
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "stdout".into());
            eprintln!(
                "{kind}: {} rows, {} successful, written to {target}",
                summary.rows, summary.successes
            );
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
