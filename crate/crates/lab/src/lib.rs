//! Experiment runner for short-interval statistics of divisor-bounded
//! multiplicative functions.
//!
//! [`execute`] is the whole CLI minus argument parsing: it builds the
//! runner, dispatches the experiment and writes `results.json`, the tables,
//! `plot.csv` and `manifest.json` into the output directory.

pub mod cache;
pub mod config;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod report;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{Experiment, ExperimentConfig};
pub use error::{LabError, LabResult};
pub use parallel::Parallel;

use cache::SegmentCache;
use report::{CheckStatus, RunManifest, Status};

/// Settings that may come from the command line; each overrides the
/// matching config key.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub strict: bool,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
    pub passed: usize,
    pub recorded: usize,
    pub failed: usize,
}

impl RunSummary {
    /// 0, or 3 when `strict` and some bound check failed.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if strict && self.failed > 0 {
            3
        } else {
            0
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn execute(experiment: Experiment, cfg: &ExperimentConfig, opts: &RunOptions) -> LabResult<RunSummary> {
    let started = unix_now();
    let threads = opts.threads.or(cfg.threads).unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(error::usage("threads must be at least 1"));
    }
    let mut runner = Parallel::new(threads)?;
    if let Some(s) = cfg.segment_size {
        runner = runner.with_segment_size(s);
    }
    if let Some(dir) = opts.cache_dir.clone().or_else(|| cfg.cache_dir.clone()) {
        runner = runner.with_cache(SegmentCache::new(dir)?);
    }
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));

    let outcome = experiments::run(experiment, cfg, &runner)?;
    let files = report::write_outcome(&outcome, experiment.name(), &out_dir)?;
    let (passed, recorded, failed) = outcome.statuses();
    let (hits, misses, rebuilt) = runner.stats.snapshot();
    let manifest = RunManifest {
        experiment: experiment.name().into(),
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION").into(),
        started_unix: started,
        finished_unix: unix_now(),
        threads,
        cache_hits: hits,
        cache_misses: misses,
        cache_rebuilt: rebuilt,
        checks: outcome
            .checks
            .iter()
            .map(|c| CheckStatus {
                lemma: c.lemma.clone(),
                status: c.status,
            })
            .collect(),
        files,
    };
    report::write_manifest(&manifest, &out_dir)?;
    Ok(RunSummary {
        out_dir,
        manifest,
        passed,
        recorded,
        failed,
    })
}

/// Runs and maps the result to a process exit code, printing a one-line
/// summary or the error.
pub fn execute_to_exit_code(experiment: Experiment, cfg: &ExperimentConfig, opts: &RunOptions) -> i32 {
    match execute(experiment, cfg, opts) {
        Ok(s) => {
            println!(
                "{}: {} pass, {} recorded, {} fail -> {}",
                experiment.name(),
                s.passed,
                s.recorded,
                s.failed,
                s.out_dir.display()
            );
            for c in s.manifest.checks.iter().filter(|c| c.status == Status::Fail) {
                eprintln!("check {} failed its envelope", c.lemma);
            }
            s.exit_code(opts.strict)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
