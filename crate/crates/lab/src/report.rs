//! Bound-check rows, CSV tables, result files and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::LabResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Ratio within its envelope.
    Pass,
    /// A finite-X observation of an asymptotic claim; never pass/fail.
    Recorded,
    /// Ratio outside its envelope.
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub lemma: String,
    pub params: Map<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub envelope: f64,
    pub status: Status,
}

impl CheckRow {
    /// A `≪` bound: passes when `ratio ≤ envelope`.
    pub fn bound(lemma: &str, params: Value, lhs: f64, rhs: f64, ratio: f64, envelope: f64) -> Self {
        let status = if ratio <= envelope { Status::Pass } else { Status::Fail };
        Self {
            lemma: lemma.to_string(),
            params: into_map(params),
            lhs,
            rhs,
            ratio,
            envelope,
            status,
        }
    }

    /// A trend or o(·) observation.
    pub fn recorded(lemma: &str, params: Value, lhs: f64, rhs: f64, ratio: f64, envelope: f64) -> Self {
        Self {
            status: Status::Recorded,
            ..Self::bound(lemma, params, lhs, rhs, ratio, envelope)
        }
    }
}

fn into_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        Value::Null => Map::new(),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip formatting; non-finite values as `nan`, `inf`, `-inf`.
pub fn num(v: f64) -> String {
    let mut s = String::new();
    if v.is_nan() {
        s.push_str("nan");
    } else {
        write!(s, "{v}").unwrap();
    }
    s
}

/// Everything an experiment produces, before it is written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub checks: Vec<CheckRow>,
    pub tables: Vec<Table>,
    /// Tidy rows for external plotting.
    pub plot: Table,
}

impl Outcome {
    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(v).expect("result serializes"));
    }

    pub fn statuses(&self) -> (usize, usize, usize) {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        (count(Status::Pass), count(Status::Recorded), count(Status::Fail))
    }
}

/// `plot.csv`: one row per `(X, h, statistic)` with whatever columns the
/// experiment declared. With no rows it is just the header.
pub fn emit_plot_data(outcome: &Outcome, dir: &Path) -> LabResult<PathBuf> {
    let path = dir.join("plot.csv");
    fs::write(&path, outcome.plot.to_csv())?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckStatus {
    pub lemma: String,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config_hash: String,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub threads: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub cache_rebuilt: u64,
    pub checks: Vec<CheckStatus>,
    pub files: Vec<String>,
}

/// Writes `results.json`, the tables and `plot.csv` into `dir`, returning
/// the file names. The manifest is written separately since it carries
/// timestamps.
pub fn write_outcome(outcome: &Outcome, experiment: &str, dir: &Path) -> LabResult<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut doc = Map::new();
    doc.insert("experiment".into(), Value::String(experiment.into()));
    doc.insert("results".into(), Value::Object(outcome.results.clone()));
    doc.insert("checks".into(), serde_json::to_value(&outcome.checks)?);
    fs::write(
        dir.join("results.json"),
        serde_json::to_string_pretty(&Value::Object(doc))? + "\n",
    )?;
    files.push("results.json".to_string());
    for t in &outcome.tables {
        let name = format!("{}.csv", t.name);
        fs::write(dir.join(&name), t.to_csv())?;
        files.push(name);
    }
    emit_plot_data(outcome, dir)?;
    files.push("plot.csv".to_string());
    Ok(files)
}

pub fn write_manifest(m: &RunManifest, dir: &Path) -> LabResult<()> {
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(m)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn statuses_follow_envelope() {
        assert_eq!(
            CheckRow::bound("4.1", json!({}), 1.0, 1.0, 2.0, 10.0).status,
            Status::Pass
        );
        assert_eq!(
            CheckRow::bound("4.1", json!({}), 1.0, 1.0, 20.0, 10.0).status,
            Status::Fail
        );
        assert_eq!(
            CheckRow::bound("4.1", json!({}), 1.0, 1.0, f64::NAN, 10.0).status,
            Status::Fail
        );
        assert_eq!(
            CheckRow::recorded("2.4", json!({}), 1.0, 1.0, 20.0, 10.0).status,
            Status::Recorded
        );
        let s = serde_json::to_string(&CheckRow::recorded("2.4", json!({"x": 1}), 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(s.contains("\"status\":\"recorded\"") && s.contains("\"lemma\":\"2.4\""));
    }

    #[test]
    fn empty_plot_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let mut o = Outcome::default();
        o.plot = Table::new("plot", &["X", "h", "l2", "h_times_l2"]);
        let p = emit_plot_data(&o, dir.path()).unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "X,h,l2,h_times_l2\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1e-300, 6.0 / std::f64::consts::PI.powi(2), -3.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::NAN), "nan");
    }
}
