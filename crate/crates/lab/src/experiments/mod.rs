//! One function per CLI experiment. Each takes the resolved configuration
//! and a runner and returns an [`Outcome`]; nothing here touches the file
//! system except reading a rule file.

use shortint_core::multfun::{find_t0, mertens_product, MultiplicativeFunction, T0Options};
use shortint_core::PrimeTable;

use crate::config::{Experiment, ExperimentConfig, T0Mode};
use crate::error::{usage, LabResult};
use crate::parallel::Parallel;
use crate::report::Outcome;

mod asymptotics;
mod dirichlet;
mod halasz;
mod sieve;
mod windows;

pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub runner: &'a Parallel,
    pub f: MultiplicativeFunction,
    pub k: u32,
}

impl Ctx<'_> {
    pub fn x_or(&self, default: u64) -> u64 {
        self.cfg.x.unwrap_or(default)
    }

    pub fn eps(&self) -> f64 {
        self.cfg.eps.unwrap_or(0.1)
    }

    pub fn alpha(&self) -> f64 {
        self.cfg.alpha.unwrap_or(1.0)
    }

    pub fn envelope(&self, tag: &str) -> f64 {
        self.cfg.envelope_for(tag)
    }

    /// A per-tag envelope if configured, else `default`; for checks whose
    /// scale is fixed and should not follow the global `envelope`.
    pub fn envelopes_or(&self, tag: &str, default: f64) -> f64 {
        self.cfg
            .envelopes
            .as_ref()
            .and_then(|m| m.get(tag).copied())
            .unwrap_or(default)
    }

    /// `P_f(X)` from primes up to `X`.
    pub fn pf(&self, table: &PrimeTable, x: f64) -> LabResult<f64> {
        Ok(mertens_product(&self.f, table, x)?)
    }

    /// `t₀` per `t0_mode`, with `default` when the mode is not configured.
    pub fn t0(&self, x: f64, default: T0Mode) -> LabResult<f64> {
        match self.cfg.t0_mode.unwrap_or(default) {
            T0Mode::Zero => Ok(0.0),
            T0Mode::Fixed(t) => Ok(t),
            T0Mode::Auto => {
                let table = PrimeTable::up_to(x as u64)?;
                Ok(find_t0(&self.f, &table, x, &T0Options::default(), self.runner)?.t0)
            }
        }
    }
}

/// The function named by `rule_file`, `spec`, or `dk:<k>`.
pub fn resolve_function(cfg: &ExperimentConfig) -> LabResult<MultiplicativeFunction> {
    let f = if let Some(path) = &cfg.rule_file {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        MultiplicativeFunction::from_rule_text(&text)?
    } else {
        let name = cfg.spec.clone().unwrap_or_else(|| format!("dk:{}", cfg.k.unwrap_or(2)));
        MultiplicativeFunction::from_name(&name)?
    };
    if let Some(k) = cfg.k {
        if k != f.bound_k {
            return Err(usage(format!(
                "k = {k} but {} is declared d_{}-bounded",
                f.name, f.bound_k
            )));
        }
    }
    Ok(f)
}

pub fn run(experiment: Experiment, cfg: &ExperimentConfig, runner: &Parallel) -> LabResult<Outcome> {
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(usage(format!(
                "config is for `{}` but `{}` was requested",
                e.name(),
                experiment.name()
            )));
        }
    }
    let f = resolve_function(cfg)?;
    let ctx = Ctx {
        cfg,
        runner,
        k: f.bound_k,
        f,
    };
    let mut out = match experiment {
        Experiment::Sieve => sieve::run(&ctx),
        Experiment::Scan => windows::scan(&ctx),
        Experiment::Variance => windows::variance(&ctx),
        Experiment::Exceptional => windows::exceptional(&ctx),
        Experiment::Threshold => windows::threshold(&ctx),
        Experiment::Asymptotics => asymptotics::run(&ctx),
        Experiment::Halasz => halasz::run(&ctx),
        Experiment::Dirichlet => dirichlet::run(&ctx),
        Experiment::Ramare => dirichlet::ramare(&ctx),
    }?;
    out.set("function", &ctx.f.name);
    out.set("k", ctx.k);
    Ok(out)
}
