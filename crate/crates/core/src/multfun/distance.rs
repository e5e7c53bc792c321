//! Prime sums attached to a multiplicative function: the Mertens-type product
//! `P_f`, the short-interval threshold `H(f, X, ε)`, the pretentious distance
//! to `n^{it}` and its minimizer `t₀`, and the non-vanishing audit.

use alloc::format;
use alloc::vec::Vec;

use super::MultiplicativeFunction;
use crate::dirichlet::grid::{GridEvaluator, Term, UniformGrid};
use crate::error::{param_err, Error, Result};
use crate::math::{exp, ln, ln1p, KahanSum};
use crate::primes::PrimeTable;

/// `Σ_{p ≤ X, f(p) ∉ ℝ} |f(p)|/p`, the finite proxy for almost
/// real-valuedness.
pub fn non_real_mass(f: &MultiplicativeFunction, primes: &[u32]) -> f64 {
    primes
        .iter()
        .filter_map(|&p| {
            let v = f.prime_power(p as u64, 1);
            (v.im != 0.0).then(|| v.norm() / p as f64)
        })
        .collect::<KahanSum>()
        .value()
}

/// `log P_f(x) = Σ_{p ≤ x} log(1 + (|f(p)| - 1)/p)`.
pub fn log_mertens_product(f: &MultiplicativeFunction, table: &PrimeTable, x: f64) -> Result<f64> {
    let mut acc = KahanSum::new();
    for &p in table.up_to_slice(x)? {
        let p = p as f64;
        let u = (f.abs_at_prime(p as u64) - 1.0) / p;
        if u <= -1.0 {
            return Err(Error::Domain(format!(
                "local factor of the Mertens product is not positive at p = {p}"
            )));
        }
        acc.add(ln1p(u));
    }
    Ok(acc.value())
}

/// `P_f(x) = ∏_{p ≤ x} (1 + (|f(p)| - 1)/p)`.
pub fn mertens_product(f: &MultiplicativeFunction, table: &PrimeTable, x: f64) -> Result<f64> {
    Ok(exp(log_mertens_product(f, table, x)?))
}

/// `H(f, X, ε) = (P_f(X) log X)^{(1+ε) log k} / P_f(X)`.
pub fn h_threshold(k: u32, pf_x: f64, x: f64, eps: f64) -> Result<f64> {
    if x <= core::f64::consts::E {
        return Err(Error::Domain(format!("H(f, X, ε) needs X > e, got {x}")));
    }
    if pf_x <= 0.0 || k == 0 {
        return Err(param_err!("H(f, X, ε) needs P_f(X) > 0 and k >= 1"));
    }
    if k == 1 {
        return Ok(1.0 / pf_x);
    }
    let log_k = ln(k as f64);
    Ok(exp((1.0 + eps) * log_k * ln(pf_x * ln(x)) - ln(pf_x)))
}

/// `D(f, n^{it}; X)² = Σ_{p ≤ X} (|f(p)| - Re f(p) p^{-it}) / p` over the
/// given primes, each summand clamped at zero.
pub fn halasz_distance_sq(f: &MultiplicativeFunction, t: f64, primes: &[u32]) -> f64 {
    let shift = t - f.twist;
    let mut acc = KahanSum::new();
    for &p in primes {
        let base = f.rule.base(p as u64, 1);
        let abs = base.norm();
        if abs == 0.0 {
            continue;
        }
        let lp = ln(p as f64);
        let (s, c) = libm::sincos(-shift * lp);
        let re = base.re * c - base.im * s;
        acc.add((abs - re).max(0.0) / p as f64);
    }
    acc.value()
}

/// `D²` on a uniform grid of `t`, through the phase-rotation kernel.
pub fn halasz_distance_sq_grid<E: GridEvaluator>(
    f: &MultiplicativeFunction,
    primes: &[u32],
    t_grid: &UniformGrid,
    ev: &E,
) -> Vec<f64> {
    let (terms, abs_sum) = distance_terms(f, primes);
    let shifted = UniformGrid {
        t_min: t_grid.t_min - f.twist,
        ..*t_grid
    };
    ev.eval(&terms, &shifted)
        .into_iter()
        .map(|z| (abs_sum - z.re).max(0.0))
        .collect()
}

pub(crate) fn distance_terms(f: &MultiplicativeFunction, primes: &[u32]) -> (Vec<Term>, f64) {
    let mut abs_sum = KahanSum::new();
    let terms = primes
        .iter()
        .filter_map(|&p| {
            let base = f.rule.base(p as u64, 1);
            if base.norm() == 0.0 {
                return None;
            }
            abs_sum.add(base.norm() / p as f64);
            Some(Term {
                log_n: ln(p as f64),
                coef: base / p as f64,
            })
        })
        .collect();
    (terms, abs_sum.value())
}

/// Why `t₀` has the value it has.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum T0Reason {
    /// The function was declared almost real-valued.
    Declared,
    /// `Σ_{p ≤ X, f(p) ∉ ℝ} |f(p)|/p` fell below the threshold.
    AlmostReal { mass: f64 },
    /// Grid search followed by local refinement.
    Search,
}

#[derive(Debug, Clone, PartialEq)]
pub struct T0Options {
    /// Search window; defaults to `[-log³X, log³X] ∩ [-X, X]`.
    pub window: Option<(f64, f64)>,
    /// Coarse grid step; defaults to `1/(2 log X)`.
    pub coarse_step: Option<f64>,
    /// Rounds of 10× refinement around the coarse minimum.
    pub refinements: u32,
    /// Threshold for the almost-real proxy.
    pub real_threshold: f64,
}

impl Default for T0Options {
    fn default() -> Self {
        Self {
            window: None,
            coarse_step: None,
            refinements: 3,
            real_threshold: 1e-6,
        }
    }
}

/// Result of a `t₀` search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceProfile {
    pub x: f64,
    pub window: (f64, f64),
    pub t_grid: Vec<f64>,
    pub d2_values: Vec<f64>,
    pub t0: f64,
    pub d2_at_t0: f64,
    /// Spacing of the last refinement round.
    pub final_step: f64,
    /// The minimum sits on the edge of the window.
    pub boundary: bool,
    /// Coarse grid points whose value ties the minimum.
    pub ties: Vec<f64>,
    pub reason: T0Reason,
}

/// Minimizes `D(f, n^{it}; X)²` over a window of `t`.
pub fn find_t0<E: GridEvaluator>(
    f: &MultiplicativeFunction,
    table: &PrimeTable,
    x: f64,
    opts: &T0Options,
    ev: &E,
) -> Result<DistanceProfile> {
    let primes = table.up_to_slice(x)?;
    let log_x = ln(x);
    let (lo, hi) = opts.window.unwrap_or_else(|| {
        let w = (log_x * log_x * log_x).min(x);
        (-w, w)
    });
    if !(lo <= hi) || lo < -x || hi > x {
        return Err(param_err!("t₀ window [{lo}, {hi}] is empty or leaves [-X, X]"));
    }
    let real_answer = |reason| DistanceProfile {
        x,
        window: (lo, hi),
        t_grid: Vec::new(),
        d2_values: Vec::new(),
        t0: 0.0,
        d2_at_t0: halasz_distance_sq(f, 0.0, primes),
        final_step: 0.0,
        boundary: false,
        ties: Vec::new(),
        reason,
    };
    if f.real_flag {
        return Ok(real_answer(T0Reason::Declared));
    }
    let mass = non_real_mass(f, primes);
    if mass <= opts.real_threshold {
        return Ok(real_answer(T0Reason::AlmostReal { mass }));
    }

    let step = opts.coarse_step.unwrap_or(0.5 / log_x);
    if !(step > 0.0) {
        return Err(param_err!("coarse step must be positive"));
    }
    let g = UniformGrid::covering(lo, hi, step);
    let values = halasz_distance_sq_grid(f, primes, &g, ev);
    let (best_j, min) = values.iter().enumerate().fold(
        (0, f64::INFINITY),
        |(bj, bv), (j, &v)| if v < bv { (j, v) } else { (bj, bv) },
    );
    let ties: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|&(j, &v)| j != best_j && v - min <= 1e-12 * (1.0 + min))
        .map(|(j, _)| g.point(j))
        .collect();

    let mut t_best = g.point(best_j);
    let mut d_best = halasz_distance_sq(f, t_best, primes);
    let mut s = g.dt;
    for _ in 0..opts.refinements {
        let center = t_best;
        s /= 10.0;
        for i in -10i32..=10 {
            let t = (center + i as f64 * s).clamp(lo, hi);
            let d = halasz_distance_sq(f, t, primes);
            if d < d_best || (d == d_best && t < t_best) {
                t_best = t;
                d_best = d;
            }
        }
    }
    Ok(DistanceProfile {
        x,
        window: (lo, hi),
        t_grid: g.points(),
        d2_values: values,
        t0: t_best,
        d2_at_t0: d_best,
        final_step: s,
        boundary: t_best <= lo || t_best >= hi,
        ties,
        reason: T0Reason::Search,
    })
}

/// `D²(t) - ρ·min{log log X, 3 log(|t - t₀| log X + 1)}` for each `t`.
pub fn distance_lowerbound_profile(
    f: &MultiplicativeFunction,
    table: &PrimeTable,
    x: f64,
    t0: f64,
    rho: f64,
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    let primes = table.up_to_slice(x)?;
    let log_x = ln(x);
    let loglog = ln(log_x);
    Ok(t_grid
        .iter()
        .map(|&t| {
            let cap = (3.0 * ln1p((t - t0).abs() * log_x)).min(loglog);
            halasz_distance_sq(f, t, primes) - rho * cap
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonvanishingReport {
    /// Minimum of `[Σ_{w<p≤z} |f(p)|/p - kα Σ_{w<p≤z} 1/p]·log w`.
    pub worst_margin: f64,
    pub worst_pair: (f64, f64),
    pub pairs: usize,
}

/// Audits the `(α, Δ)` non-vanishing condition over `(w, z)` pairs.
pub fn nonvanishing_audit(
    f: &MultiplicativeFunction,
    table: &PrimeTable,
    alpha: f64,
    delta: f64,
    pairs: &[(f64, f64)],
) -> Result<NonvanishingReport> {
    if pairs.is_empty() {
        return Err(param_err!("non-vanishing audit needs at least one (w, z) pair"));
    }
    let primes = table.up_to_slice(delta)?;
    let ka = f.bound_k as f64 * alpha;
    // prefix[i] sums (|f(p)| - kα)/p over the first i primes
    let mut prefix = Vec::with_capacity(primes.len() + 1);
    let mut acc = KahanSum::new();
    prefix.push(0.0);
    for &p in primes {
        acc.add((f.abs_at_prime(p as u64) - ka) / p as f64);
        prefix.push(acc.value());
    }
    let idx = |x: f64| primes.partition_point(|&p| (p as f64) <= x);
    let mut worst = (f64::INFINITY, (0.0, 0.0));
    for &(w, z) in pairs {
        if !(2.0 <= w && w <= z && z <= delta) {
            return Err(param_err!(
                "pair (w, z) = ({w}, {z}) violates 2 <= w <= z <= Δ = {delta}"
            ));
        }
        let (a, b) = (idx(w), idx(z));
        let margin = (prefix[b] - prefix[a]) * ln(w);
        if margin < worst.0 {
            worst = (margin, (w, z));
        }
    }
    Ok(NonvanishingReport {
        worst_margin: worst.0,
        worst_pair: worst.1,
        pairs: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::grid::Serial;

    fn table(n: u64) -> PrimeTable {
        PrimeTable::up_to(n).unwrap()
    }

    #[test]
    fn mertens_examples() {
        let t = table(1000);
        let one = MultiplicativeFunction::dk(1).unwrap();
        assert_eq!(mertens_product(&one, &t, 1000.0).unwrap(), 1.0);
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let want = 1.5 * (4.0 / 3.0) * 1.2 * (8.0 / 7.0);
        assert!((mertens_product(&d2, &t, 10.0).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn h_threshold_examples() {
        let h = h_threshold(2, 3.0, exp(20.0), 0.1).unwrap();
        assert!((h - 7.56).abs() < 0.01, "{h}");
        assert_eq!(h_threshold(1, 2.5, 1e6, 0.3).unwrap(), 1.0 / 2.5);
        assert!(h_threshold(2, 1.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn distance_examples() {
        let t = table(10_000);
        let primes = t.up_to_slice(10_000.0).unwrap();
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        assert_eq!(halasz_distance_sq(&d2, 0.0, primes), 0.0);
        let neg = MultiplicativeFunction::from_rule_text("k 1\n* 1 -1 0\n").unwrap();
        let recip: f64 = primes.iter().map(|&p| 1.0 / p as f64).sum();
        assert!((halasz_distance_sq(&neg, 0.0, primes) - 2.0 * recip).abs() < 1e-12);
    }

    #[test]
    fn grid_matches_direct() {
        let t = table(20_000);
        let primes = t.up_to_slice(20_000.0).unwrap();
        let f = MultiplicativeFunction::dk_twist(2, 1.7).unwrap();
        let g = UniformGrid::covering(-5.0, 5.0, 0.05);
        let vals = halasz_distance_sq_grid(&f, primes, &g, &Serial);
        for j in (0..g.len).step_by(13) {
            let direct = halasz_distance_sq(&f, g.point(j), primes);
            assert!((vals[j] - direct).abs() < 1e-10, "{} vs {direct}", vals[j]);
        }
    }

    #[test]
    fn t0_for_real_functions_is_zero() {
        let t = table(10_000);
        let p = find_t0(
            &MultiplicativeFunction::dk(3).unwrap(),
            &t,
            1e4,
            &T0Options::default(),
            &Serial,
        )
        .unwrap();
        assert_eq!((p.t0, p.reason), (0.0, T0Reason::Declared));
        let mut undeclared = MultiplicativeFunction::dk(2).unwrap();
        undeclared.real_flag = false;
        let p = find_t0(&undeclared, &t, 1e4, &T0Options::default(), &Serial).unwrap();
        assert_eq!((p.t0, p.reason), (0.0, T0Reason::AlmostReal { mass: 0.0 }));
    }

    #[test]
    fn t0_recovers_twist() {
        let t = table(100_000);
        let f = MultiplicativeFunction::dk_twist(2, 3.0).unwrap();
        let opts = T0Options {
            window: Some((-10.0, 10.0)),
            ..T0Options::default()
        };
        let p = find_t0(&f, &t, 1e5, &opts, &Serial).unwrap();
        assert!((p.t0 - 3.0).abs() <= p.final_step, "t0 = {}", p.t0);
        assert!(!p.boundary);
        let opts = T0Options {
            window: Some((5.0, 10.0)),
            ..T0Options::default()
        };
        // D² is not monotone in |t - 3|: the far end of the window wins here
        let p = find_t0(&f, &t, 1e5, &opts, &Serial).unwrap();
        assert!(p.boundary);
        assert!(p.t0 == 5.0 || p.t0 == 10.0);
        assert!(find_t0(
            &f,
            &t,
            1e5,
            &T0Options {
                window: Some((1.0, 0.0)),
                ..opts
            },
            &Serial
        )
        .is_err());
    }

    #[test]
    fn nonvanishing_examples() {
        let t = table(10_000);
        let pairs: Vec<(f64, f64)> = [2.0, 10.0, 100.0, 1000.0]
            .iter()
            .flat_map(|&w| [w, 2.0 * w, 10.0 * w].into_iter().map(move |z| (w, z)))
            .collect();
        let d3 = MultiplicativeFunction::dk(3).unwrap();
        assert!(nonvanishing_audit(&d3, &t, 1.0, 1e4, &pairs).unwrap().worst_margin >= 0.0);
        let zero = MultiplicativeFunction::from_rule_text("k 1\n").unwrap();
        let r = nonvanishing_audit(&zero, &t, 1.0, 1e4, &pairs).unwrap();
        assert!(r.worst_margin < -1.0);
        assert!(nonvanishing_audit(&d3, &t, 1.0, 1e4, &[]).is_err());
    }

    #[test]
    fn lowerbound_profile_at_t0() {
        let t = table(10_000);
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let m = distance_lowerbound_profile(&d2, &t, 1e4, 0.0, 0.2, &[0.0, 1.0]).unwrap();
        assert_eq!(m[0], 0.0);
        let m0 = distance_lowerbound_profile(&d2, &t, 1e4, 0.0, 0.0, &[1.0]).unwrap();
        assert!(m0[0] >= 0.0);
    }
}
