//! Full-range sieve with exact oracle comparisons.

use serde_json::json;
use shortint_core::accumulate::{RangeAccumulator, SegmentRunner};
use shortint_core::multfun::{DkBoundAudit, MultiplicativeFunction};
use shortint_core::sieve::{divisor_sum_hyperbola, dk_value, squarefree_harmonic_oracle};
use shortint_core::{Error, Result, SieveSegment};

use super::Ctx;
use crate::error::{LabError, LabResult};
use crate::report::{CheckRow, Outcome, Table};

/// Every `stride`-th integer is refactored by trial division.
const TRIAL_STRIDE: usize = 997;

struct Stats<'a> {
    k: u32,
    divisor_sum: u128,
    two_pow_omega: u128,
    trial_mismatch: Option<u64>,
    // count and Σ k^Ω per ω
    hist: Vec<(u64, u128)>,
    audit: DkBoundAudit<'a>,
}

impl<'a> Stats<'a> {
    fn new(f: &'a MultiplicativeFunction, k: u32) -> Self {
        Self {
            k,
            divisor_sum: 0,
            two_pow_omega: 0,
            trial_mismatch: None,
            hist: Vec::new(),
            audit: DkBoundAudit::new(f),
        }
    }
}

impl RangeAccumulator for Stats<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let w = seg.small_omega_at(i) as usize;
            self.divisor_sum += dk_value(seg.view_at(i), 2)? as u128;
            self.two_pow_omega += 1u128 << w;
            if self.hist.len() <= w {
                self.hist.resize(w + 1, (0, 0));
            }
            let weight = (self.k as u128)
                .checked_pow(seg.big_omega_at(i) as u32)
                .ok_or(Error::Overflow("k^Ω in u128"))?;
            self.hist[w].0 += 1;
            self.hist[w].1 += weight;
        }
        self.trial_mismatch = self
            .trial_mismatch
            .or_else(|| seg.first_trial_division_mismatch(TRIAL_STRIDE));
        self.audit.absorb(seg)
    }

    fn merge(&mut self, later: Self) {
        self.divisor_sum += later.divisor_sum;
        self.two_pow_omega += later.two_pow_omega;
        self.trial_mismatch = self.trial_mismatch.or(later.trial_mismatch);
        if self.hist.len() < later.hist.len() {
            self.hist.resize(later.hist.len(), (0, 0));
        }
        for (a, b) in self.hist.iter_mut().zip(later.hist) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self.audit.merge(later.audit);
    }
}

pub fn run(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(10_000_000);
    let s = ctx.runner.run(1, x + 1, || Stats::new(&ctx.f, ctx.k))?;
    let mut out = Outcome::default();

    let hyperbola = divisor_sum_hyperbola(x);
    let squarefree = squarefree_harmonic_oracle(x);
    out.set("x", x);
    out.set("divisor_sum", s.divisor_sum.to_string());
    out.set("divisor_sum_hyperbola", hyperbola.to_string());
    out.set("two_pow_omega_sum", s.two_pow_omega.to_string());
    out.set("squarefree_oracle", squarefree.to_string());
    out.set("trial_division_stride", TRIAL_STRIDE);
    out.set("trial_division_mismatch", s.trial_mismatch);
    out.set("dk_bound_checked", s.audit.checked);
    out.set("dk_bound_violations", s.audit.violations.len());
    out.set(
        "dk_bound_first_violations",
        &s.audit.violations[..s.audit.violations.len().min(20)],
    );

    for (tag, lhs, rhs) in [
        ("oracle.hyperbola", s.divisor_sum, hyperbola),
        ("oracle.squarefree", s.two_pow_omega, squarefree),
    ] {
        out.checks.push(CheckRow::bound(
            tag,
            json!({ "x": x }),
            lhs as f64,
            rhs as f64,
            if lhs == rhs { 0.0 } else { f64::INFINITY },
            0.0,
        ));
    }

    let mut hist = Table::new("omega_histogram", &["omega", "count", "weighted_count"]);
    let mut plot = Table::new("plot", &["X", "omega", "count"]);
    for (w, (c, wc)) in s.hist.iter().enumerate() {
        hist.push(vec![w.to_string(), c.to_string(), wc.to_string()]);
        plot.push(vec![x.to_string(), w.to_string(), c.to_string()]);
    }
    out.tables.push(hist);
    out.plot = plot;
    out.set("log_log_x", (x as f64).ln().ln());

    if s.divisor_sum != hyperbola {
        return Err(LabError::Verification(format!(
            "Σ d(n) up to {x}: sieve {} vs hyperbola {hyperbola}",
            s.divisor_sum
        )));
    }
    if s.two_pow_omega != squarefree {
        return Err(LabError::Verification(format!(
            "Σ 2^ω(n) up to {x}: sieve {} vs squarefree oracle {squarefree}",
            s.two_pow_omega
        )));
    }
    if let Some(n) = s.trial_mismatch {
        return Err(LabError::Verification(format!(
            "sieve factorization of {n} disagrees with trial division"
        )));
    }
    Ok(out)
}
