//! Flat TOML experiment configuration.
//!
//! Every key is optional; experiments fill in their own defaults. Values can
//! be overridden by environment variables `SHORTINT_<KEY>` (the value is
//! parsed as a TOML value, falling back to a plain string), and the CLI
//! flags override both.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{usage, LabResult};

pub const ENV_PREFIX: &str = "SHORTINT_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Sieve,
    Scan,
    Variance,
    Exceptional,
    Asymptotics,
    Halasz,
    Dirichlet,
    Ramare,
    Threshold,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sieve => "sieve",
            Experiment::Scan => "scan",
            Experiment::Variance => "variance",
            Experiment::Exceptional => "exceptional",
            Experiment::Asymptotics => "asymptotics",
            Experiment::Halasz => "halasz",
            Experiment::Dirichlet => "dirichlet",
            Experiment::Ramare => "ramare",
            Experiment::Threshold => "threshold",
        }
    }
}

/// `t₀` selection: `"auto"`, `"zero"` or `"fixed:<t>"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum T0Mode {
    Auto,
    Zero,
    Fixed(f64),
}

impl TryFrom<String> for T0Mode {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        match s.as_str() {
            "auto" => Ok(T0Mode::Auto),
            "zero" => Ok(T0Mode::Zero),
            _ => s
                .strip_prefix("fixed:")
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|t| t.is_finite())
                .map(T0Mode::Fixed)
                .ok_or_else(|| format!("t0_mode must be auto, zero or fixed:<t>, got {s:?}")),
        }
    }
}

impl From<T0Mode> for String {
    fn from(m: T0Mode) -> String {
        match m {
            T0Mode::Auto => "auto".into(),
            T0Mode::Zero => "zero".into(),
            T0Mode::Fixed(t) => format!("fixed:{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenteringMode {
    Plain,
    Twisted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizerMode {
    /// `log^{k-1} X`.
    Log,
    /// `P_f(X)`.
    Pf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub x: Option<u64>,
    pub k: Option<u32>,
    /// Registry name such as `dk:2`; defaults to `dk:<k>`.
    pub spec: Option<String>,
    /// Custom prime-power rule file, used instead of `spec`.
    pub rule_file: Option<PathBuf>,
    pub h_grid: Option<Vec<u64>>,
    pub exponents: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub eps0: Option<f64>,
    pub eps_prime: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub eta_grid: Option<Vec<f64>>,
    pub t0_mode: Option<T0Mode>,
    pub centering: Option<CenteringMode>,
    pub normalizer: Option<NormalizerMode>,
    pub keep_delta: Option<bool>,
    /// Default envelope constant for every bound check.
    pub envelope: Option<f64>,
    /// Per-check envelope constants keyed by lemma tag.
    pub envelopes: Option<BTreeMap<String, f64>>,
    pub t_max: Option<f64>,
    pub quad_step: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub ramare_h: Option<f64>,
    pub t_points: Option<Vec<f64>>,
    /// Support of the decomposed coefficients: `"ab"` for `A ∩ B_{ε/2}`
    /// (default) or `"all"`.
    pub restriction: Option<String>,
    pub shiu_y: Option<Vec<u64>>,
    pub henriot_y: Option<u64>,
    pub henriot_k: Option<u64>,
    pub r1: Option<u64>,
    pub r2: Option<u64>,
    pub theta: Option<f64>,
    pub large_p: Option<f64>,
    pub large_t: Option<f64>,
    pub large_v: Option<f64>,
    pub y1: Option<u64>,
    pub y2: Option<u64>,
    pub amp_x: Option<u64>,
    pub amp_t: Option<f64>,
    pub perron_x: Option<f64>,
    pub perron_h: Option<f64>,
    pub perron_t_max: Option<Vec<f64>>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub segment_size: Option<u64>,
}

fn env_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl ExperimentConfig {
    /// Parses TOML text and applies `overrides` (lowercase key, raw value).
    pub fn parse_with_overrides<'a>(
        text: &str,
        overrides: impl IntoIterator<Item = (String, &'a str)>,
    ) -> LabResult<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| usage(format!("config: {e}")))?;
        for (key, raw) in overrides {
            table.insert(key, env_value(raw));
        }
        let cfg: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> LabResult<Self> {
        Self::parse_with_overrides(text, std::iter::empty())
    }

    /// Reads `path` and applies `SHORTINT_*` variables from the environment.
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let vars: Vec<(String, String)> = std::env::vars()
            .filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|rest| (rest.to_lowercase(), v)))
            .collect();
        Self::parse_with_overrides(&text, vars.iter().map(|(k, v)| (k.clone(), v.as_str())))
    }

    pub fn validate(&self) -> LabResult<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(v) if !(v > 0.0 && v.is_finite()) => Err(usage(format!("{name} must be positive and finite"))),
            _ => Ok(()),
        };
        if let Some(k) = self.k {
            if !(1..=16).contains(&k) {
                return Err(usage("k must lie in 1..=16"));
            }
        }
        if let Some(x) = self.x {
            if x < 16 {
                return Err(usage("x must be at least 16"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(usage("alpha must lie in (0, 1]"));
            }
        }
        if let Some(e) = self.eps0 {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(usage("eps0 must be non-negative"));
            }
        }
        if let Some(e) = self.eps_prime {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(usage("eps_prime must be non-negative"));
            }
        }
        for (name, v) in [
            ("eps", self.eps),
            ("delta", self.delta),
            ("eta", self.eta),
            ("envelope", self.envelope),
            ("t_max", self.t_max),
            ("quad_step", self.quad_step),
            ("theta", self.theta),
        ] {
            positive(name, v)?;
        }
        for v in self.envelopes.iter().flat_map(|m| m.values()) {
            positive("envelopes entry", Some(*v))?;
        }
        for v in self.eta_grid.iter().flatten() {
            positive("eta_grid entry", Some(*v))?;
        }
        if self.exponents.iter().flatten().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(usage("exponents must be finite and non-negative"));
        }
        if let Some(r) = &self.restriction {
            if r != "ab" && r != "all" {
                return Err(usage("restriction must be \"ab\" or \"all\""));
            }
        }
        if self.threads == Some(0) {
            return Err(usage("threads must be at least 1"));
        }
        if self.segment_size == Some(0) {
            return Err(usage("segment_size must be at least 1"));
        }
        if self.spec.is_some() && self.rule_file.is_some() {
            return Err(usage("give either spec or rule_file, not both"));
        }
        Ok(())
    }

    pub fn envelope_for(&self, tag: &str) -> f64 {
        self.envelopes
            .as_ref()
            .and_then(|m| m.get(tag).copied())
            .or(self.envelope)
            .unwrap_or(100.0)
    }

    /// SHA-256 of the settings that determine the numbers, i.e. everything
    /// except threads, cache and output locations.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.threads = None;
        c.cache_dir = None;
        c.out_dir = None;
        let json = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let c = ExperimentConfig::parse("x = 1000\nk = 3\nh_grid = [1, 2]\nt0_mode = \"fixed:2.5\"\n").unwrap();
        assert_eq!(c.x, Some(1000));
        assert_eq!(c.t0_mode, Some(T0Mode::Fixed(2.5)));
        assert!(ExperimentConfig::parse("xx = 1").is_err());
        assert!(ExperimentConfig::parse("t0_mode = \"sometimes\"").is_err());
        assert!(ExperimentConfig::parse("k = 0").is_err());
        assert!(ExperimentConfig::parse("alpha = 1.5").is_err());
    }

    #[test]
    fn overrides_win() {
        let c = ExperimentConfig::parse_with_overrides(
            "x = 1000\nspec = \"dk:2\"",
            [
                ("x".to_string(), "5000"),
                ("spec".to_string(), "dk:3"),
                ("centering".to_string(), "twisted"),
            ],
        )
        .unwrap();
        assert_eq!(c.x, Some(5000));
        assert_eq!(c.spec.as_deref(), Some("dk:3"));
        assert_eq!(c.centering, Some(CenteringMode::Twisted));
        assert!(ExperimentConfig::parse_with_overrides("", [("bogus".to_string(), "1")]).is_err());
    }

    #[test]
    fn hash_ignores_threads_and_paths() {
        let a = ExperimentConfig::parse("x = 1000\nthreads = 1").unwrap();
        let b = ExperimentConfig::parse("x = 1000\nthreads = 8\nout_dir = \"/tmp/o\"").unwrap();
        let c = ExperimentConfig::parse("x = 1001").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.envelope_for("4.1"), 100.0);
    }
}
