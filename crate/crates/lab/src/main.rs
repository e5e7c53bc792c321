use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use shortint::{execute_to_exit_code, Experiment, ExperimentConfig, RunOptions};

#[derive(Parser, Debug)]
#[command(
    name = "shortint",
    version,
    about = "Short-interval experiments for d_k-bounded multiplicative functions"
)]
struct Cli {
    experiment: Experiment,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Exit with status 3 when a bound check exceeds its envelope.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for sieve segment caches.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let opts = RunOptions {
        strict: cli.strict,
        threads: cli.threads,
        cache_dir: cli.cache,
        out_dir: cli.out,
    };
    ExitCode::from(execute_to_exit_code(cli.experiment, &cfg, &opts) as u8)
}
