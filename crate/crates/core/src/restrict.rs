//! Restriction sets and the counting estimates behind them.
//!
//! `A` holds the integers with a prime factor in each of `[P₁, Q₁]` and
//! `[P₂, Q₂]`; `B_ε` holds those with `Ω(n) ≤ (1+ε) log(P_f(X) log X)`.
//! The remaining functions measure tail sums over the complements, sums of
//! `k^{ω(n)}` and `k^{Ω(n)}`, and the concentration of `ω(n)` near
//! `k log log x`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::accumulate::{RangeAccumulator, SegmentRunner};
use crate::error::{param_err, Error, Result};
use crate::math::{exp, exp_integral_e1, ln, ln1p, powf, sin, sqrt, KahanSum};
use crate::multfun::{mertens_product, MultiplicativeFunction};
use crate::primes::PrimeTable;
use crate::sieve::{FactorView, SieveSegment};
use num_complex::Complex64;

/// Which thresholds were moved to make the sets decidable at small `X`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClampFlags {
    /// `Q₁` raised to `P₁²`.
    pub q1_raised: bool,
    /// `Q₂` lowered to `X^{1/10}`.
    pub q2_lowered: bool,
    /// `Q₂` raised to `P₂²` after lowering.
    pub q2_raised: bool,
}

impl ClampFlags {
    pub fn any(&self) -> bool {
        self.q1_raised || self.q2_lowered || self.q2_raised
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RestrictionParams {
    pub x: f64,
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
    pub eps0: f64,
    pub clamped: ClampFlags,
}

/// `ε₀ = (αε/3) log k`.
pub fn default_eps0(k: u32, alpha: f64, eps: f64) -> f64 {
    alpha * eps / 3.0 * ln(k as f64)
}

/// `P₁ = exp(√(log log X))`, `Q₁ = (log X)^{ε₀}`, `P₂ = exp((log log X)²)`,
/// `Q₂ = exp((log log X)^{100})`, followed by the clamps
/// `Q₂ ← min(Q₂, X^{1/10})`, `Q₂ ← max(Q₂, P₂²)` and `Q₁ ← max(Q₁, P₁²)`.
pub fn default_params(x: f64, eps0: f64) -> Result<RestrictionParams> {
    if !(x >= 16.0) {
        return Err(param_err!("restriction thresholds need X >= 16, got {x}"));
    }
    if !(eps0 >= 0.0 && eps0.is_finite()) {
        return Err(param_err!("ε₀ must be finite and non-negative, got {eps0}"));
    }
    let log_x = ln(x);
    let ll = ln(log_x);
    let p1 = exp(sqrt(ll));
    let p2 = exp(ll * ll);
    let mut clamped = ClampFlags::default();
    let mut q1 = powf(log_x, eps0);
    if q1 < p1 * p1 {
        q1 = p1 * p1;
        clamped.q1_raised = true;
    }
    // log Q₂ = (log log X)^{100} overflows quickly, so compare logs
    let log_q2 = powf(ll, 100.0);
    let mut q2_log = log_q2;
    if q2_log > log_x / 10.0 {
        q2_log = log_x / 10.0;
        clamped.q2_lowered = true;
    }
    let mut q2 = exp(q2_log);
    if q2 < p2 * p2 {
        q2 = p2 * p2;
        clamped.q2_raised = true;
    }
    Ok(RestrictionParams {
        x,
        p1,
        q1,
        p2,
        q2,
        eps0,
        clamped,
    })
}

/// Whether `n` has a prime in `[P₁, Q₁]` and a prime in `[P₂, Q₂]`.
pub fn in_a(fv: FactorView<'_>, params: &RestrictionParams) -> bool {
    let hit = |lo: f64, hi: f64| fv.primes().iter().any(|&p| lo <= p as f64 && p as f64 <= hi);
    hit(params.p1, params.q1) && hit(params.p2, params.q2)
}

/// `(1+ε) log(P_f(X) log X)`.
pub fn b_threshold(eps: f64, pf_x: f64, x: f64) -> f64 {
    (1.0 + eps) * ln(pf_x * ln(x))
}

/// Whether `Ω(n) ≤ (1+ε) log(P_f(X) log X)`.
pub fn in_b(fv: FactorView<'_>, eps: f64, pf_x: f64, x: f64) -> bool {
    crate::sieve::big_omega(fv) as f64 <= b_threshold(eps, pf_x, x)
}

/// The set `A ∩ B_ε` as a predicate on factorizations.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RestrictionSet {
    pub params: RestrictionParams,
    /// Largest `Ω(n)` allowed.
    pub omega_cap: f64,
}

impl RestrictionSet {
    pub fn new(params: RestrictionParams, eps: f64, pf_x: f64) -> Self {
        Self {
            omega_cap: b_threshold(eps, pf_x, params.x),
            params,
        }
    }

    pub fn contains(&self, fv: FactorView<'_>) -> bool {
        crate::sieve::big_omega(fv) as f64 <= self.omega_cap && in_a(fv, &self.params)
    }
}

fn prime_table_to(x: f64) -> Result<PrimeTable> {
    PrimeTable::up_to(crate::math::ceil(x) as u64)
}

fn abs_value(f: &MultiplicativeFunction, fv: FactorView<'_>) -> Result<f64> {
    Ok(f.eval(fv)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailB {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub pf_x: f64,
    /// `Σ |f(n)| (1+δ)^{Ω(n) - θ}` over the same range.
    pub rankin_rhs: f64,
    /// Integers where `1_{Ω(n) > θ} |f(n)| ≤ |f(n)| (1+δ)^{Ω(n)-θ}` failed.
    pub rankin_violations: u64,
}

struct TailBAcc<'a> {
    f: &'a MultiplicativeFunction,
    theta: f64,
    log_base: f64,
    lhs: KahanSum,
    rankin: KahanSum,
    violations: u64,
}

impl RangeAccumulator for TailBAcc<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let a = abs_value(self.f, seg.view_at(i))?;
            let om = seg.big_omega_at(i) as f64;
            let weight = a * exp(self.log_base * (om - self.theta));
            let outside = if om > self.theta { a } else { 0.0 };
            if outside > weight {
                self.violations += 1;
            }
            self.lhs.add(outside);
            self.rankin.add(weight);
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.lhs.merge(&later.lhs);
        self.rankin.merge(&later.rankin);
        self.violations += later.violations;
    }
}

/// `Σ_{X<n≤3X, n∉B_ε} |f(n)|` against
/// `X P_f(X) (P_f(X) log X)^{-(1+ε) log(1+δ) + δ}`.
pub fn tail_sum_b<R: SegmentRunner>(
    f: &MultiplicativeFunction,
    x: u64,
    eps: f64,
    delta: f64,
    runner: &R,
) -> Result<TailB> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param_err!("δ must lie in (0, 1), got {delta}"));
    }
    let xf = x as f64;
    let pf_x = mertens_product(f, &prime_table_to(xf)?, xf)?;
    let theta = b_threshold(eps, pf_x, xf);
    let log_base = ln1p(delta);
    let acc = runner.run(x + 1, 3 * x + 1, || TailBAcc {
        f,
        theta,
        log_base,
        lhs: KahanSum::new(),
        rankin: KahanSum::new(),
        violations: 0,
    })?;
    let rhs = xf * pf_x * powf(pf_x * ln(xf), -(1.0 + eps) * log_base + delta);
    let lhs = acc.lhs.value();
    Ok(TailB {
        lhs,
        rhs,
        ratio: lhs / rhs,
        threshold: theta,
        pf_x,
        rankin_rhs: acc.rankin.value(),
        rankin_violations: acc.violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailA {
    pub lhs: f64,
    pub rhs_factor: f64,
    pub ratio: f64,
    /// Share of `(X, 2X]` lying in `A`.
    pub density_a: f64,
    /// `∏_{p∈[P_j,Q_j]} (1 - |f(p)|/p)` for `j = 1, 2`.
    pub products: [f64; 2],
}

struct TailAAcc<'a> {
    f: &'a MultiplicativeFunction,
    params: &'a RestrictionParams,
    lhs: KahanSum,
    in_a: u64,
}

impl RangeAccumulator for TailAAcc<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let fv = seg.view_at(i);
            if in_a(fv, self.params) {
                self.in_a += 1;
            } else {
                self.lhs.add(abs_value(self.f, fv)?);
            }
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.lhs.merge(&later.lhs);
        self.in_a += later.in_a;
    }
}

/// `∏_{p∈[lo,hi]} (1 - |f(p)|/p)`.
fn sieve_product(f: &MultiplicativeFunction, table: &PrimeTable, lo: f64, hi: f64) -> Result<f64> {
    let mut log = KahanSum::new();
    for &p in table.primes() {
        let pf = p as f64;
        if pf < lo {
            continue;
        }
        if pf > hi {
            break;
        }
        let u = f.abs_at_prime(p as u64) / pf;
        if u >= 1.0 {
            return Err(Error::Domain(format!(
                "|f({p})| >= {p}, the factor 1 - |f(p)|/p is not positive"
            )));
        }
        log.add(ln1p(-u));
    }
    Ok(exp(log.value()))
}

/// `Σ_{X<n≤2X, n∉A} |f(n)|` against `X P_f(2X) Σ_j ∏_{p∈[P_j,Q_j]}(1 - |f(p)|/p)`.
pub fn tail_sum_a<R: SegmentRunner>(
    f: &MultiplicativeFunction,
    x: u64,
    params: &RestrictionParams,
    runner: &R,
) -> Result<TailA> {
    let xf = x as f64;
    let table = prime_table_to((2.0 * xf).max(params.q2))?;
    let products = [
        sieve_product(f, &table, params.p1, params.q1)?,
        sieve_product(f, &table, params.p2, params.q2)?,
    ];
    let pf_2x = mertens_product(f, &table, 2.0 * xf)?;
    let acc = runner.run(x + 1, 2 * x + 1, || TailAAcc {
        f,
        params,
        lhs: KahanSum::new(),
        in_a: 0,
    })?;
    let rhs_factor = xf * pf_2x * (products[0] + products[1]);
    let lhs = acc.lhs.value();
    Ok(TailA {
        lhs,
        rhs_factor,
        ratio: lhs / rhs_factor,
        density_a: acc.in_a as f64 / xf,
        products,
    })
}

/// Largest relative error accepted for the constant `c_k`.
pub const CK_TOLERANCE: f64 = 1e-6;

/// `c_k = (1/(k-1)!) ∏_p (1-1/p)^k (1 + k/(p-1))` and its estimated relative
/// error. Primes beyond the table are folded in through
/// `log factor ≈ -k(k-1)/(2p²)` and `Σ_{p>L} p^{-2} ≈ E1(log L)`.
pub fn c_k(k: u32, table: &PrimeTable) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(param_err!("k must be at least 1"));
    }
    if k == 1 {
        return Ok((1.0, 0.0));
    }
    let kf = k as f64;
    let mut log = KahanSum::new();
    for &p in table.primes() {
        let pf = p as f64;
        log.add(kf * ln1p(-1.0 / pf) + ln1p(kf / (pf - 1.0)));
    }
    let l = table.limit().max(2) as f64;
    let inv_sq_tail = exp_integral_e1(Complex64::new(ln(l), 0.0)).re;
    log.add(-kf * (kf - 1.0) / 2.0 * inv_sq_tail);
    // unaccounted: the error of E1 as a prime sum and the p^{-3} terms
    let err = kf * (kf - 1.0) / 2.0 * inv_sq_tail / ln(l) + kf * kf * kf / (l * l);
    if err > CK_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "c_{k} tail above {} is uncertain by {err:.2e}; extend the prime table",
            table.limit()
        )));
    }
    let log_fact: f64 = (2..k).map(|j| ln(j as f64)).sum();
    Ok((exp(log.value() - log_fact), err))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KpowSum {
    pub x: u64,
    pub k: u32,
    /// `Σ_{n≤x} k^{ω(n)}`.
    pub sum: u128,
    pub c_k: f64,
    pub c_k_error: f64,
    /// `sum / (x log^{k-1} x)`.
    pub normalized: f64,
}

fn kpow(k: u32, e: u32) -> Result<u128> {
    (k as u128).checked_pow(e).ok_or(Error::Overflow("k^ω in u128"))
}

/// Exact `Σ_{n≤x} k^{ω(n)}` with the constant of its main term.
pub fn kpow_omega_sum<R: SegmentRunner>(x: u64, k: u32, runner: &R) -> Result<KpowSum> {
    if k == 0 || x == 0 {
        return Err(param_err!("need k >= 1 and x >= 1"));
    }
    let acc = runner.run(1, x + 1, || {
        crate::accumulate::IntSum::new(move |seg: &SieveSegment, i| kpow(k, seg.small_omega_at(i) as u32))
    })?;
    let (ck, err) = c_k(k, &PrimeTable::up_to(2_000_000)?)?;
    let xf = x as f64;
    Ok(KpowSum {
        x,
        k,
        sum: acc.total,
        c_k: ck,
        c_k_error: err,
        normalized: acc.total as f64 / (xf * powf(ln(xf), k as f64 - 1.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcentratedTail {
    pub x: u64,
    pub k: u32,
    pub eps: f64,
    /// `Σ k^{Ω(n)}` over `n ≤ x` with `|ω(n) - k log log x| ≥ ε log log x`.
    pub lhs: u128,
    /// The part of `lhs` with `ω(n)` below the band.
    pub lower: u128,
    pub normalized: f64,
    /// `Σ_{n≤x} k^{Ω(n)} A^{ω(n) - (k-ε) log log x}` with `A = (k-ε)/k`,
    /// when `ε < k`.
    pub rankin_rhs: Option<f64>,
    pub rankin_violations: u64,
}

struct ConcentratedAcc {
    k: u32,
    lo: f64,
    hi: f64,
    log_a: Option<f64>,
    lhs: u128,
    lower: u128,
    rankin: KahanSum,
    violations: u64,
}

impl RangeAccumulator for ConcentratedAcc {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let w = seg.small_omega_at(i) as f64;
            let weight = kpow(self.k, seg.big_omega_at(i) as u32)?;
            let below = w <= self.lo;
            if below || w >= self.hi {
                self.lhs += weight;
            }
            if let Some(la) = self.log_a {
                let r = weight as f64 * exp(la * (w - self.lo));
                if below {
                    self.lower += weight;
                    if weight as f64 > r {
                        self.violations += 1;
                    }
                }
                self.rankin.add(r);
            } else if below {
                self.lower += weight;
            }
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.lhs += later.lhs;
        self.lower += later.lower;
        self.rankin.merge(&later.rankin);
        self.violations += later.violations;
    }
}

/// `Σ k^{Ω(n)}` over `n ≤ x` whose `ω(n)` is at least `ε log log x` away
/// from `k log log x`.
pub fn concentrated_dk_tail<R: SegmentRunner>(x: u64, k: u32, eps: f64, runner: &R) -> Result<ConcentratedTail> {
    if k == 0 || x < 16 || !(eps >= 0.0) {
        return Err(param_err!("need k >= 1, x >= 16 and ε >= 0"));
    }
    let xf = x as f64;
    let ll = ln(ln(xf));
    let kf = k as f64;
    let log_a = (eps < kf).then(|| ln((kf - eps) / kf));
    let acc = runner.run(1, x + 1, || ConcentratedAcc {
        k,
        lo: (kf - eps) * ll,
        hi: (kf + eps) * ll,
        log_a,
        lhs: 0,
        lower: 0,
        rankin: KahanSum::new(),
        violations: 0,
    })?;
    Ok(ConcentratedTail {
        x,
        k,
        eps,
        lhs: acc.lhs,
        lower: acc.lower,
        normalized: acc.lhs as f64 / (xf * powf(ln(xf), kf - 1.0)),
        rankin_rhs: log_a.map(|_| acc.rankin.value()),
        rankin_violations: acc.violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistogramRow {
    pub omega: u32,
    pub count: u64,
    /// `Σ k^{Ω(n)}` over the same integers.
    pub weighted_count: u128,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcentrationReport {
    pub x: u64,
    pub k: u32,
    pub eps: f64,
    /// `#{n ≤ x : |ω(n) - k log log x| ≤ ε log log x}`.
    pub typical: u64,
    pub deviant: u64,
    pub weighted_typical: u128,
    pub weighted_deviant: u128,
    /// `x / (log x)^{(k+ε)log k - k + 1}`.
    pub lower_bound: f64,
    /// `x / (log x)^{(k-ε)log k - k + 1}`.
    pub upper_bound: f64,
    pub histogram: Vec<HistogramRow>,
}

impl ConcentrationReport {
    pub fn lower_ratio(&self) -> f64 {
        self.typical as f64 / self.lower_bound
    }

    pub fn upper_ratio(&self) -> f64 {
        self.typical as f64 / self.upper_bound
    }
}

struct OmegaHistogram {
    k: u32,
    counts: Vec<u64>,
    weighted: Vec<u128>,
}

impl RangeAccumulator for OmegaHistogram {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let w = seg.small_omega_at(i) as usize;
            if w >= self.counts.len() {
                self.counts.resize(w + 1, 0);
                self.weighted.resize(w + 1, 0);
            }
            self.counts[w] += 1;
            self.weighted[w] += kpow(self.k, seg.big_omega_at(i) as u32)?;
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        let len = self.counts.len().max(later.counts.len());
        self.counts.resize(len, 0);
        self.weighted.resize(len, 0);
        for (i, (c, w)) in later.counts.into_iter().zip(later.weighted).enumerate() {
            self.counts[i] += c;
            self.weighted[i] += w;
        }
    }
}

/// Counts of `n ≤ x` by `ω(n)`, split at the band around `k log log x`.
pub fn omega_concentration_counts<R: SegmentRunner>(
    x: u64,
    k: u32,
    eps_prime: f64,
    runner: &R,
) -> Result<ConcentrationReport> {
    if k == 0 || x < 16 || !(eps_prime >= 0.0) {
        return Err(param_err!("need k >= 1, x >= 16 and ε′ >= 0"));
    }
    let xf = x as f64;
    let log_x = ln(xf);
    let ll = ln(log_x);
    let kf = k as f64;
    let hist = runner.run(1, x + 1, || OmegaHistogram {
        k,
        counts: vec![],
        weighted: vec![],
    })?;
    let (lo, hi) = ((kf - eps_prime) * ll, (kf + eps_prime) * ll);
    let mut report = ConcentrationReport {
        x,
        k,
        eps: eps_prime,
        typical: 0,
        deviant: 0,
        weighted_typical: 0,
        weighted_deviant: 0,
        lower_bound: xf / powf(log_x, (kf + eps_prime) * ln(kf) - kf + 1.0),
        upper_bound: xf / powf(log_x, (kf - eps_prime) * ln(kf) - kf + 1.0),
        histogram: Vec::with_capacity(hist.counts.len()),
    };
    for (w, (&c, &wt)) in hist.counts.iter().zip(&hist.weighted).enumerate() {
        let wf = w as f64;
        if lo <= wf && wf <= hi {
            report.typical += c;
            report.weighted_typical += wt;
        } else {
            report.deviant += c;
            report.weighted_deviant += wt;
        }
        report.histogram.push(HistogramRow {
            omega: w as u32,
            count: c,
            weighted_count: wt,
        });
    }
    Ok(report)
}

struct AbsSum<'a> {
    f: &'a MultiplicativeFunction,
    total: KahanSum,
}

impl RangeAccumulator for AbsSum<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            self.total.add(abs_value(self.f, seg.view_at(i))?);
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.total.merge(&later.total);
    }
}

/// `Σ_{Y-y<n≤Y} |f(n)| / (y P_f(X))`.
pub fn shiu_ratio<R: SegmentRunner>(
    f: &MultiplicativeFunction,
    x: u64,
    big_y: u64,
    y: u64,
    delta: f64,
    runner: &R,
) -> Result<f64> {
    let yf = big_y as f64;
    if !((big_y as f64) > sqrt(x as f64) && big_y <= x) {
        return Err(param_err!("Y = {big_y} must satisfy √X < Y ≤ X with X = {x}"));
    }
    if (y as f64) < powf(yf, delta) || y > big_y {
        return Err(param_err!("y = {y} must lie in [Y^δ, Y] with δ = {delta}"));
    }
    let pf_x = mertens_product(f, &prime_table_to(x as f64)?, x as f64)?;
    let acc = runner.run(big_y - y + 1, big_y + 1, || AbsSum {
        f,
        total: KahanSum::new(),
    })?;
    Ok(acc.total.value() / (y as f64 * pf_x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RhoSigma {
    pub rho: f64,
    pub sigma: f64,
}

/// `ρ = kα/3 - (2k/3π) sin(πα/2)` and `σ = min(1, ρ)/4`.
pub fn rho_sigma(k: u32, alpha: f64) -> Result<RhoSigma> {
    if k == 0 || !(alpha > 0.0 && alpha <= 1.0) {
        return Err(param_err!("need k >= 1 and 0 < α <= 1, got k = {k}, α = {alpha}"));
    }
    let pi = core::f64::consts::PI;
    // factor k out so that ρ is exactly linear in k
    let unit = alpha / 3.0 - 2.0 / (3.0 * pi) * sin(pi * alpha / 2.0);
    let rho = k as f64 * unit;
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ρ = {rho:e} is not positive at α = {alpha}")));
    }
    Ok(RhoSigma {
        rho,
        sigma: rho.min(1.0) / 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulate::Sequential;
    use crate::sieve::{squarefree_harmonic_oracle, trial_division, FactorVector};

    const SEQ: Sequential = Sequential { segment_size: 1 << 16 };

    #[test]
    fn params_at_1e8() {
        let p = default_params(1e8, default_eps0(2, 1.0, 0.1)).unwrap();
        assert!((p.p1 - exp(sqrt(ln(ln(1e8))))).abs() < 1e-12);
        assert!((p.p1 - 5.5).abs() < 0.1);
        assert!((p.p2 / 4870.0 - 1.0).abs() < 0.01, "{}", p.p2);
        assert!(p.clamped.q2_lowered && p.clamped.q1_raised);
        assert!(2.0 <= p.p1 && p.p1 <= p.q1 && p.p2 <= p.q2);
        let small = default_params(1e4, 0.0).unwrap();
        assert!(small.clamped.q2_lowered);
        assert!(default_params(10.0, 0.1).is_err());
    }

    #[test]
    fn membership_examples() {
        let p = default_params(1e8, 0.0).unwrap();
        let n = FactorVector::new(&[(7, 1), (5003, 1)]).unwrap();
        assert!(in_a(n.view(), &p));
        let two = FactorVector::new(&[(2, 20)]).unwrap();
        assert!(!in_a(two.view(), &p));
        assert!(in_b(FactorVector::one().view(), 0.1, 1.0, 1e8));
        let pf = ln(1e8);
        assert!(!in_b(FactorVector::new(&[(2, 64)]).unwrap().view(), 0.1, pf, 1e8));
        assert!(in_b(FactorVector::new(&[(2, 64)]).unwrap().view(), 1e9, pf, 1e8));
    }

    #[test]
    fn c2_telescopes() {
        let (c2, err) = c_k(2, &PrimeTable::up_to(2_000_000).unwrap()).unwrap();
        let want = 6.0 / (core::f64::consts::PI * core::f64::consts::PI);
        assert!((c2 - want).abs() < 1e-8, "{c2} vs {want}, est {err}");
        assert_eq!(c_k(1, &PrimeTable::up_to(10).unwrap()).unwrap().0, 1.0);
        assert!(c_k(3, &PrimeTable::up_to(100).unwrap()).is_err());
    }

    #[test]
    fn kpow_small_cases() {
        assert_eq!(kpow_omega_sum(4, 2, &SEQ).unwrap().sum, 7);
        assert_eq!(kpow_omega_sum(1000, 1, &SEQ).unwrap().sum, 1000);
        for x in [1u64, 10, 997, 30_000] {
            assert_eq!(kpow_omega_sum(x, 2, &SEQ).unwrap().sum, squarefree_harmonic_oracle(x));
        }
    }

    #[test]
    fn tail_b_examples() {
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let t = tail_sum_b(&d2, 10_000, 1e6, 0.3, &SEQ).unwrap();
        assert_eq!(t.lhs, 0.0);
        let t = tail_sum_b(&d2, 10_000, 0.5, 0.5 / 3.0, &SEQ).unwrap();
        assert_eq!(t.rankin_violations, 0);
        assert!(t.lhs <= t.rankin_rhs);
        assert!(tail_sum_b(&d2, 10_000, 0.5, 1.0, &SEQ).is_err());
    }

    #[test]
    fn tail_a_monotone_in_q1() {
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let base = default_params(1e5, 0.0).unwrap();
        let mut wider = base;
        wider.q1 *= 4.0;
        let a = tail_sum_a(&d2, 100_000, &base, &SEQ).unwrap();
        let b = tail_sum_a(&d2, 100_000, &wider, &SEQ).unwrap();
        assert!(b.lhs <= a.lhs);
        let mut empty = base;
        empty.p1 = 24.0;
        empty.q1 = 28.0;
        let e = tail_sum_a(&d2, 100_000, &empty, &SEQ).unwrap();
        let full: f64 = (100_001..=200_000u64)
            .step_by(1)
            .map(|n| {
                let fv = trial_division(n);
                crate::sieve::dk_value(fv.view(), 2).unwrap() as f64
            })
            .sum();
        assert_eq!(e.density_a, 0.0);
        assert!((e.lhs - full).abs() < 1e-6);
    }

    #[test]
    fn concentration_partition() {
        let r = omega_concentration_counts(100_000, 1, 0.5, &SEQ).unwrap();
        assert_eq!(r.typical + r.deviant, 100_000);
        assert!(r.typical > 50_000);
        let s: u64 = r.histogram.iter().map(|h| h.count).sum();
        assert_eq!(s, 100_000);
        let r0 = omega_concentration_counts(100_000, 2, 0.0, &SEQ).unwrap();
        assert_eq!(r0.typical, 0);
    }

    #[test]
    fn concentrated_tail_rankin() {
        let t = concentrated_dk_tail(100_000, 2, 0.3, &SEQ).unwrap();
        assert_eq!(t.rankin_violations, 0);
        assert!((t.lower as f64) <= t.rankin_rhs.unwrap());
        let wide = concentrated_dk_tail(100_000, 2, 2.5, &SEQ).unwrap();
        assert_eq!(wide.lower, 0);
        assert!(wide.rankin_rhs.is_none());
    }

    #[test]
    fn shiu_constant_function() {
        let one = MultiplicativeFunction::from_rule_text("k 1\nreal\n* * 1 0\n").unwrap();
        let r = shiu_ratio(&one, 1_000_000, 1_000_000, 10_000, 0.5, &SEQ).unwrap();
        assert_eq!(r, 1.0);
        assert!(shiu_ratio(&one, 1_000_000, 1_000_000, 10, 0.5, &SEQ).is_err());
    }

    #[test]
    fn rho_values() {
        let pi = core::f64::consts::PI;
        let r = rho_sigma(1, 1.0).unwrap();
        assert!((r.rho - (1.0 / 3.0 - 2.0 / (3.0 * pi))).abs() < 1e-15);
        assert!((r.rho - 0.12113).abs() < 1e-5);
        for a in [0.25, 0.5, 1.0] {
            assert_eq!(rho_sigma(2, a).unwrap().rho, 2.0 * rho_sigma(1, a).unwrap().rho);
        }
        assert!(rho_sigma(1, 1e-3).unwrap().rho > 0.0);
        assert!(rho_sigma(1, 0.0).is_err());
    }
}
