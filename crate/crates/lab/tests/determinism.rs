//! Output files must not depend on the thread count.

use std::fs;
use std::path::Path;

use shortint::{execute, Experiment, ExperimentConfig, RunOptions};

fn run(e: Experiment, cfg: &ExperimentConfig, threads: usize, out: &Path) -> Vec<String> {
    let opts = RunOptions {
        threads: Some(threads),
        out_dir: Some(out.to_path_buf()),
        ..Default::default()
    };
    execute(e, cfg, &opts).unwrap().manifest.files
}

#[test]
fn one_and_eight_threads_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (Experiment::Sieve, "x = 200000\nsegment_size = 8192"),
        (Experiment::Scan, "x = 50000\nh_grid = [3, 17]\nsegment_size = 4096"),
        (Experiment::Variance, "x = 50000\nsegment_size = 4096"),
        (Experiment::Exceptional, "x = 50000\nk = 3\nsegment_size = 4096"),
        (Experiment::Threshold, "x = 50000\nsegment_size = 4096"),
        (Experiment::Asymptotics, "x = 20000\nsegment_size = 4096"),
        (Experiment::Ramare, "x = 10000\nsegment_size = 2048"),
        (
            Experiment::Dirichlet,
            "x = 20000\nt0_mode = \"zero\"\nperron_t_max = [100.0]\nsegment_size = 4096",
        ),
    ];
    for (e, text) in cases {
        let cfg = ExperimentConfig::parse(text).unwrap();
        let a = dir.path().join(format!("{}-1", e.name()));
        let b = dir.path().join(format!("{}-8", e.name()));
        let files = run(e, &cfg, 1, &a);
        assert_eq!(files, run(e, &cfg, 8, &b));
        for f in &files {
            assert_eq!(
                fs::read(a.join(f)).unwrap(),
                fs::read(b.join(f)).unwrap(),
                "{} differs for {}",
                f,
                e.name()
            );
        }
    }
}
