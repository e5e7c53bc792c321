//! Splitting `Σ_{X<n≤2X} a_n n^{-s}` along a prime factor in `[P, Q]`, and
//! sums over integers free of such factors.
//!
//! With `ω(n)` the number of distinct primes of `n` in `[P, Q]`, every `n`
//! with `ω(n) ≥ 1` satisfies `a_n = Σ_{p|n} a_n/ω(n)`. Writing `n = pm`, the
//! pairs `(p, m)` are grouped by `v` with `e^{v/H} < p ≤ e^{(v+1)/H}` and by
//! `Xe^{-v/H} < m ≤ 2Xe^{-v/H}`, which gives `Σ_v Q_v R_v`. Everything this
//! grouping gets wrong is collected in four explicit remainders:
//!
//! * `B₂`: pairs with `X < pm ≤ 2X` whose `m` falls outside its bin,
//! * `B₃`: minus the binned pairs with `pm` outside `(X, 2X]`,
//! * `B₄`: `Σ_{p|n} (a_n/ω(n) - c_p b_m/(ω(m)+1))`, which vanishes when
//!   `p ∤ m` and `a_{pm} = b_m c_p`,
//! * `B₅`: the `n` with `ω(n) = 0`.
//!
//! The five pieces add up to the left side exactly, so the residual measures
//! rounding only.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::grid::{eval_point, GridEvaluator, Term, UniformGrid};
use crate::accumulate::{RangeAccumulator, SegmentRunner};
use crate::error::{param_err, Error, Result};
use crate::math::{ceil, cis, exp, floor, ln, powf, ComplexSum, KahanSum};
use crate::multfun::{mertens_product, MultiplicativeFunction};
use crate::primes::PrimeTable;
use crate::sieve::{FactorView, SieveSegment};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamareParams {
    pub x: u64,
    pub p: f64,
    pub q: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamareRow {
    pub t: f64,
    pub lhs: Complex64,
    /// `B₁ … B₅` at `s = 1 + it`.
    pub pieces: [Complex64; 5],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamareDecomposition {
    pub params: RamareParams,
    pub rows: Vec<RamareRow>,
    /// `Σ_{X<n≤2X} |a_n|/n`.
    pub abs_mass: f64,
    pub tolerance: f64,
    /// Values of `v` with at least one prime.
    pub bins: Vec<i64>,
    /// Integers of `(X, 2X]` where `B₄` has a non-zero coefficient.
    pub defects: usize,
}

/// `f(n)`, membership in the restriction, and `ω(n)` for primes in `[P, Q]`.
struct Columns<'a, S> {
    f: &'a MultiplicativeFunction,
    keep: &'a S,
    p: f64,
    q: f64,
    values: Vec<Complex64>,
    omega: Vec<u8>,
}

fn omega_in(fv: FactorView<'_>, p: f64, q: f64) -> u8 {
    fv.primes().iter().filter(|&&r| p <= r as f64 && r as f64 <= q).count() as u8
}

impl<S: Fn(FactorView<'_>) -> bool> RangeAccumulator for Columns<'_, S> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let fv = seg.view_at(i);
            let v = if (self.keep)(fv) {
                self.f.eval(fv)?
            } else {
                Complex64::new(0.0, 0.0)
            };
            self.values.push(v);
            self.omega.push(omega_in(fv, self.p, self.q));
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.values.extend(later.values);
        self.omega.extend(later.omega);
    }
}

fn sparse_terms(start: u64, coeffs: &[Complex64]) -> Vec<Term> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(i, &c)| Term::new(start + i as u64, c, 1.0))
        .collect()
}

/// Decomposes `Σ_{X<n≤2X} a_n n^{-s}` with `a_n = b_n = f(n) 1_S(n)` and
/// `c_p = f(p)` at each `s = 1 + it`.
pub fn ramare_decompose<R, S>(
    f: &MultiplicativeFunction,
    params: &RamareParams,
    keep: &S,
    t_points: &[f64],
    runner: &R,
) -> Result<RamareDecomposition>
where
    R: SegmentRunner,
    S: Fn(FactorView<'_>) -> bool + Sync,
{
    let RamareParams { x, p, q, h } = *params;
    if !(2.0 <= p && p <= q) || !(h >= 1.0) || x == 0 {
        return Err(param_err!("need 2 <= P <= Q, H >= 1 and X >= 1"));
    }
    let xf = x as f64;
    let n_max = floor(2.0 * xf * exp(1.0 / h)) as u64 + 1;
    let cols = runner.run(1, n_max + 1, || Columns {
        f,
        keep,
        p,
        q,
        values: Vec::new(),
        omega: Vec::new(),
    })?;
    let a = |n: u64| cols.values[(n - 1) as usize];
    let w = |n: u64| cols.omega[(n - 1) as usize];

    let primes: Vec<u64> = PrimeTable::up_to(floor(q) as u64)?
        .primes()
        .iter()
        .map(|&r| r as u64)
        .filter(|&r| p <= r as f64)
        .collect();
    let bin_of = |r: u64| ceil(h * ln(r as f64)) as i64 - 1;
    let bin_range = |v: i64| {
        let scale = exp(-(v as f64) / h);
        (floor(xf * scale) as u64, floor(2.0 * xf * scale) as u64)
    };

    // coefficients of the target and of B₂, B₄, B₅ live on (X, 2X]; B₃ on (2X, n_max]
    let width = x as usize;
    let zero = Complex64::new(0.0, 0.0);
    let target: Vec<Complex64> = (x + 1..=2 * x).map(a).collect();
    let mut b2 = vec![zero; width];
    let mut b3 = vec![zero; (n_max - 2 * x) as usize];
    let mut b4 = vec![zero; width];
    let b5: Vec<Complex64> = (x + 1..=2 * x).map(|n| if w(n) == 0 { a(n) } else { zero }).collect();

    let mut bins: Vec<i64> = Vec::new();
    for &r in &primes {
        let v = bin_of(r);
        if bins.last() != Some(&v) {
            bins.push(v);
        }
        let c = f.prime_power(r, 1);
        let (lo, hi) = bin_range(v);
        let (t_lo, t_hi) = (x / r, 2 * x / r);
        for m in lo.min(t_lo) + 1..=hi.max(t_hi) {
            let n = m * r;
            let in_target = x < n && n <= 2 * x;
            let in_bin = lo < m && m <= hi;
            if in_target == in_bin {
                continue;
            }
            let pair = c * a(m) / (w(m) as f64 + 1.0);
            if in_target {
                b2[(n - x - 1) as usize] += pair;
            } else {
                if n > n_max {
                    return Err(Error::Invariant(alloc::format!("binned product {n} beyond the sieve")));
                }
                b3[(n - 2 * x - 1) as usize] -= pair;
            }
        }
        // B₄ over multiples of r in (X, 2X]
        let mut n = (x / r + 1) * r;
        while n <= 2 * x {
            let m = n / r;
            let i = (n - x - 1) as usize;
            b4[i] += target[i] / w(n) as f64 - c * a(m) / (w(m) as f64 + 1.0);
            n += r;
        }
    }

    // B₁ = Σ_v Q_v R_v
    let mut binned: Vec<(Vec<Term>, Vec<Term>)> = Vec::with_capacity(bins.len());
    for &v in &bins {
        let qv: Vec<Term> = primes
            .iter()
            .filter(|&&r| bin_of(r) == v)
            .map(|&r| Term::new(r, f.prime_power(r, 1), 1.0))
            .collect();
        let (lo, hi) = bin_range(v);
        let rv: Vec<Term> = (lo + 1..=hi)
            .filter(|&m| a(m) != zero)
            .map(|m| Term::new(m, a(m) / (w(m) as f64 + 1.0), 1.0))
            .collect();
        binned.push((qv, rv));
    }

    let terms_target = sparse_terms(x + 1, &target);
    let terms_b2 = sparse_terms(x + 1, &b2);
    let terms_b3 = sparse_terms(2 * x + 1, &b3);
    let terms_b4 = sparse_terms(x + 1, &b4);
    let terms_b5 = sparse_terms(x + 1, &b5);
    let abs_mass = terms_target.iter().map(|t| t.coef.norm()).collect::<KahanSum>().value();
    let tolerance = 1e-9 * (1.0 + abs_mass);

    let mut rows = Vec::with_capacity(t_points.len());
    for &t in t_points {
        let lhs = eval_point(&terms_target, t);
        let b1 = binned
            .iter()
            .map(|(qv, rv)| eval_point(qv, t) * eval_point(rv, t))
            .collect::<ComplexSum>()
            .value();
        let pieces = [
            b1,
            eval_point(&terms_b2, t),
            eval_point(&terms_b3, t),
            eval_point(&terms_b4, t),
            eval_point(&terms_b5, t),
        ];
        let total = pieces.iter().copied().collect::<ComplexSum>().value();
        let residual = (lhs - total).norm();
        if !(residual <= tolerance) {
            return Err(Error::Identity { residual, tolerance });
        }
        rows.push(RamareRow {
            t,
            lhs,
            pieces,
            residual,
        });
    }
    Ok(RamareDecomposition {
        params: *params,
        rows,
        abs_mass,
        tolerance,
        bins,
        defects: terms_b4.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoughParams {
    pub x: u64,
    pub p: f64,
    pub q: f64,
    pub t0: f64,
    pub rho: f64,
    pub sigma0: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoughRestricted {
    pub grid: UniformGrid,
    /// `Σ_{X<n≤2X, ω(n)=0} f(n) n^{-1-it₀-it}`.
    pub sums: Vec<Complex64>,
    /// `Σ_{X<n≤2X} f(n) n^{-1-it₀-it} / (ω(n)+1)`.
    pub r_values: Vec<Complex64>,
    pub sup_sum: f64,
    pub sup_r: f64,
    /// `(Z^{-1/2} + L^{2k} log log X/(log X)^ρ) P_f(X)` with `L = log Q/log P`
    /// and `Z` the smallest `|t|` of the grid, kept in `[1, log X]`.
    pub bound_rough: f64,
    /// `L^k ((log X)^{-σ₀/2} + L^{2k} log log X/(log X)^ρ) P_f(X)`.
    pub bound_r: f64,
    pub pf_x: f64,
}

impl RoughRestricted {
    pub fn rough_ratio(&self) -> f64 {
        self.sup_sum / self.bound_rough
    }

    pub fn r_ratio(&self) -> f64 {
        self.sup_r / self.bound_r
    }
}

/// Sums over `[P, Q]`-rough integers and the weighted sum `R` on a grid.
pub fn rough_restricted_sum<R: SegmentRunner, E: GridEvaluator>(
    f: &MultiplicativeFunction,
    params: &RoughParams,
    grid: &UniformGrid,
    runner: &R,
    ev: &E,
) -> Result<RoughRestricted> {
    let RoughParams {
        x,
        p,
        q,
        t0,
        rho,
        sigma0,
    } = *params;
    if x < 16 {
        return Err(param_err!("X must be at least 16"));
    }
    let keep_all = |_: FactorView<'_>| true;
    let cols = runner.run(x + 1, 2 * x + 1, || Columns {
        f,
        keep: &keep_all,
        p,
        q,
        values: Vec::new(),
        omega: Vec::new(),
    })?;
    let mut rough = Vec::new();
    let mut weighted = Vec::new();
    for (i, (&v, &w)) in cols.values.iter().zip(&cols.omega).enumerate() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let n = x + 1 + i as u64;
        let term = Term::new(n, v * cis(-t0 * ln(n as f64)), 1.0);
        if w == 0 {
            rough.push(term);
        }
        weighted.push(Term {
            coef: term.coef / (w as f64 + 1.0),
            ..term
        });
    }
    let sums = ev.eval(&rough, grid);
    let r_values = ev.eval(&weighted, grid);
    let sup = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let xf = x as f64;
    let log_x = ln(xf);
    let ll = ln(log_x);
    let pf_x = mertens_product(f, &PrimeTable::up_to(x)?, xf)?;
    let ratio = if q > p { ln(q) / ln(p) } else { 1.0 };
    let k = f.bound_k as f64;
    let decay = powf(ratio, 2.0 * k) * ll / powf(log_x, rho);
    let z_min = (0..grid.len).map(|j| grid.point(j).abs()).fold(f64::INFINITY, f64::min);
    let z = z_min.clamp(1.0, log_x);
    Ok(RoughRestricted {
        grid: *grid,
        sup_sum: sup(&sums),
        sup_r: sup(&r_values),
        sums,
        r_values,
        bound_rough: (1.0 / crate::math::sqrt(z) + decay) * pf_x,
        bound_r: powf(ratio, k) * (powf(log_x, -sigma0 / 2.0) + decay) * pf_x,
        pf_x,
    })
}
