//! Short-interval sums `S_{f,h}(x) = Σ_{x<m≤x+h} f(m)` for every integer
//! `x ∈ [X, 2X]`, their deviation from a long average, and statistics of that
//! deviation.
//!
//! A [`ValueTable`] keeps cumulative sums of `f` over a range `(start, end]`:
//! exact `i64` when `f` is integer-valued and untwisted, double-double
//! otherwise, plus a second cumulative sum of `f(n) n^{-it₀}` when `t₀ ≠ 0`.
//! Every window sum is then a difference of two entries.
//!
//! Two centerings are supported. [`Centering::Plain`] compares the window
//! mean with `(1/x) Σ_{x<n≤2x} f(n)` at the same `x` and needs the table to
//! reach `4X`. [`Centering::Twisted`] compares it with
//! `(1/h)∫_x^{x+h} u^{it₀} du · (1/X) Σ_{X<n≤2X} f(n) n^{-it₀}`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::accumulate::{RangeAccumulator, SegmentRunner};
use crate::error::{param_err, Error, Result};
use crate::math::{cexpm1, cis, exp, ln, ln1p, powf, DoubleDouble, KahanSum};
use crate::multfun::MultiplicativeFunction;
use crate::sieve::{dk_value, SieveSegment};

/// Cumulative complex sum in double-double precision.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CumComplex {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl CumComplex {
    fn add(self, z: Complex64) -> Self {
        Self {
            re: self.re.add_f64(z.re),
            im: self.im.add_f64(z.im),
        }
    }

    fn diff(self, other: Self) -> Complex64 {
        Complex64::new(self.re.diff(other.re), self.im.diff(other.im))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cumulative {
    /// `cum[i] = Σ f(m)` over `start < m ≤ start + 1 + i`.
    Int(Vec<i64>),
    Complex(Vec<CumComplex>),
}

/// Cumulative sums of `f` (and of `f(n) n^{-it₀}`) over `(start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    start: u64,
    end: u64,
    t0: f64,
    plain: Cumulative,
    twisted: Option<Vec<CumComplex>>,
}

fn twisted_cumulative(start: u64, values: impl Iterator<Item = Complex64>, t0: f64) -> Vec<CumComplex> {
    let mut acc = CumComplex::default();
    values
        .enumerate()
        .map(|(i, v)| {
            let n = (start + 1 + i as u64) as f64;
            acc = acc.add(v * cis(-t0 * ln(n)));
            acc
        })
        .collect()
}

impl ValueTable {
    /// Table over `(start, start + values.len()]` for integer values.
    /// `values` is turned into its cumulative sum in place.
    pub fn from_int_values(start: u64, mut values: Vec<i64>, t0: f64) -> Result<Self> {
        let end = start + values.len() as u64;
        let twisted =
            (t0 != 0.0).then(|| twisted_cumulative(start, values.iter().map(|&v| Complex64::new(v as f64, 0.0)), t0));
        let mut acc: i64 = 0;
        for v in values.iter_mut() {
            acc = acc.checked_add(*v).ok_or(Error::Overflow("cumulative sum of f"))?;
            *v = acc;
        }
        Ok(Self {
            start,
            end,
            t0,
            plain: Cumulative::Int(values),
            twisted,
        })
    }

    /// Table over `(start, start + values.len()]` for complex values.
    pub fn from_complex_values(start: u64, values: Vec<Complex64>, t0: f64) -> Result<Self> {
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Evaluation("non-finite value in table".into()));
        }
        let end = start + values.len() as u64;
        let twisted = (t0 != 0.0).then(|| twisted_cumulative(start, values.iter().copied(), t0));
        let mut acc = CumComplex::default();
        let plain = values
            .into_iter()
            .map(|v| {
                acc = acc.add(v);
                acc
            })
            .collect();
        Ok(Self {
            start,
            end,
            t0,
            plain: Cumulative::Complex(plain),
            twisted,
        })
    }

    /// Sieves `(start, end]` and tabulates `f`.
    pub fn build<R: SegmentRunner>(
        f: &MultiplicativeFunction,
        start: u64,
        end: u64,
        t0: f64,
        runner: &R,
    ) -> Result<Self> {
        if f.is_integer_valued() {
            let col = runner.run(start + 1, end + 1, || IntValueColumn::new(f))?;
            Self::from_int_values(start, col.values, t0)
        } else {
            let col = runner.run(start + 1, end + 1, || ComplexValueColumn::new(f))?;
            Self::from_complex_values(start, col.values, t0)
        }
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> u64 {
        self.end
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.plain, Cumulative::Int(_))
    }

    fn check(&self, a: u64, b: u64) -> Result<()> {
        if a < self.start || b > self.end || a > b {
            return Err(Error::OutOfRange {
                n: if a < self.start { a } else { b },
                lo: self.start,
                hi: self.end + 1,
            });
        }
        Ok(())
    }

    #[inline]
    fn idx(&self, n: u64) -> Option<usize> {
        (n > self.start).then(|| (n - self.start - 1) as usize)
    }

    /// Exact `Σ_{a<m≤b} f(m)` for integer tables.
    pub fn sum_int(&self, a: u64, b: u64) -> Result<i64> {
        self.check(a, b)?;
        match &self.plain {
            Cumulative::Int(c) => {
                let at = |n| self.idx(n).map_or(0, |i| c[i]);
                Ok(at(b) - at(a))
            }
            Cumulative::Complex(_) => Err(param_err!("table is not integer-valued")),
        }
    }

    /// `Σ_{a<m≤b} f(m)`.
    pub fn sum(&self, a: u64, b: u64) -> Result<Complex64> {
        self.check(a, b)?;
        Ok(match &self.plain {
            Cumulative::Int(c) => {
                let at = |n| self.idx(n).map_or(0, |i| c[i]);
                Complex64::new((at(b) - at(a)) as f64, 0.0)
            }
            Cumulative::Complex(c) => {
                let at = |n| self.idx(n).map_or(CumComplex::default(), |i| c[i]);
                at(b).diff(at(a))
            }
        })
    }

    /// `Σ_{a<m≤b} f(m) m^{-it₀}` for the table's `t₀`.
    pub fn twisted_sum(&self, a: u64, b: u64) -> Result<Complex64> {
        match &self.twisted {
            None => self.sum(a, b),
            Some(c) => {
                self.check(a, b)?;
                let at = |n| self.idx(n).map_or(CumComplex::default(), |i| c[i]);
                Ok(at(b).diff(at(a)))
            }
        }
    }
}

/// Collects exact values of an integer-valued function.
#[derive(Debug, Clone)]
pub struct IntValueColumn<'a> {
    f: &'a MultiplicativeFunction,
    pub values: Vec<i64>,
}

impl<'a> IntValueColumn<'a> {
    pub fn new(f: &'a MultiplicativeFunction) -> Self {
        Self { f, values: Vec::new() }
    }
}

impl RangeAccumulator for IntValueColumn<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        self.values.reserve(seg.len());
        for i in 0..seg.len() {
            self.values.push(self.f.eval_int(seg.view_at(i))?);
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.values.extend(later.values);
    }
}

/// Collects complex values.
#[derive(Debug, Clone)]
pub struct ComplexValueColumn<'a> {
    f: &'a MultiplicativeFunction,
    pub values: Vec<Complex64>,
}

impl<'a> ComplexValueColumn<'a> {
    pub fn new(f: &'a MultiplicativeFunction) -> Self {
        Self { f, values: Vec::new() }
    }
}

impl RangeAccumulator for ComplexValueColumn<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        self.values.reserve(seg.len());
        for i in 0..seg.len() {
            self.values.push(self.f.eval(seg.view_at(i))?);
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.values.extend(later.values);
    }
}

/// `S_{f,h}(x)` for every integer `x ∈ [X, 2X]`.
pub fn window_sums(table: &ValueTable, x: u64, h: u64) -> Result<Vec<Complex64>> {
    table.check(x, 2 * x + h)?;
    (x..=2 * x).map(|a| table.sum(a, a + h)).collect()
}

/// `∫_x^{x+h} u^{it₀} du = ((x+h)^{1+it₀} - x^{1+it₀})/(1+it₀)`, evaluated as
/// `x^{1+it₀}·expm1((1+it₀) log(1+h/x))/(1+it₀)` to avoid cancellation.
pub fn window_weight(x: f64, h: f64, t0: f64) -> Complex64 {
    if t0 == 0.0 {
        return Complex64::new(h, 0.0);
    }
    let s = Complex64::new(1.0, t0);
    let lx = ln(x);
    let base = cis(t0 * lx) * x;
    base * cexpm1(s * ln1p(h / x)) / s
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Centering {
    /// `(1/x) Σ_{x<n≤2x} f(n)`.
    Plain,
    /// `(1/h)∫_x^{x+h} u^{it₀}du · (1/X) Σ_{X<n≤2X} f(n) n^{-it₀}`.
    Twisted { t0: f64 },
}

/// `(1/X) Σ_{X<n≤2X} f(n) n^{-it₀}` from the table.
pub fn long_average(table: &ValueTable, x: u64, t0: f64) -> Result<Complex64> {
    if t0 != table.t0() {
        return Err(param_err!("t₀ = {t0} differs from the table's t₀ = {}", table.t0()));
    }
    Ok(table.twisted_sum(x, 2 * x)? / x as f64)
}

/// Deviation of every short-window mean from its long average.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowScan {
    pub x: u64,
    pub h: u64,
    pub centering: Centering,
    pub normalizer: f64,
    /// `|Δ(x)|` for `x = X, …, 2X`.
    pub abs_delta: Vec<f64>,
    /// `Δ(x)` itself, when requested.
    pub delta: Option<Vec<Complex64>>,
    /// `(1/(X+1)) Σ |Δ|`.
    pub mean_abs: f64,
    /// `(1/X) Σ |Δ|²`, the integer version of `(1/X)∫_X^{2X} |Δ|² dx`.
    pub l2: f64,
    /// `(1/(X+1)) Σ Δ`.
    pub mean: Complex64,
}

/// `Δ(x)` for every integer `x ∈ [X, 2X]`.
pub fn discrepancy_profile(
    table: &ValueTable,
    x: u64,
    h: u64,
    centering: Centering,
    normalizer: f64,
    keep_delta: bool,
) -> Result<WindowScan> {
    if h == 0 {
        return Err(param_err!("window length h must be at least 1"));
    }
    if x == 0 {
        return Err(param_err!("X must be positive"));
    }
    let reach = match centering {
        Centering::Plain => (2 * x + h).max(4 * x),
        Centering::Twisted { .. } => 2 * x + h,
    };
    table.check(x, reach)?;
    let long_ref = match centering {
        Centering::Twisted { t0 } => Some(long_average(table, x, t0)?),
        Centering::Plain => None,
    };
    let hf = h as f64;
    let len = (x + 1) as usize;
    let mut abs_delta = Vec::with_capacity(len);
    let mut delta = keep_delta.then(|| Vec::with_capacity(len));
    let (mut s1, mut s2) = (KahanSum::new(), KahanSum::new());
    let (mut m_re, mut m_im) = (KahanSum::new(), KahanSum::new());
    for a in x..=2 * x {
        let short = table.sum(a, a + h)? / hf;
        let d = match (centering, long_ref) {
            (Centering::Twisted { t0 }, Some(r)) => short - window_weight(a as f64, hf, t0) / hf * r,
            _ => short - table.sum(a, 2 * a)? / a as f64,
        };
        let ad = d.norm();
        abs_delta.push(ad);
        s1.add(ad);
        s2.add(ad * ad);
        m_re.add(d.re);
        m_im.add(d.im);
        if let Some(v) = delta.as_mut() {
            v.push(d);
        }
    }
    Ok(WindowScan {
        x,
        h,
        centering,
        normalizer,
        abs_delta,
        delta,
        mean_abs: s1.value() / len as f64,
        l2: s2.value() / x as f64,
        mean: Complex64::new(m_re.value(), m_im.value()) / len as f64,
    })
}

/// Fraction of `x` with `|Δ(x)| > η · normalizer`.
pub fn exceptional_measure(scan: &WindowScan, eta: f64) -> f64 {
    let threshold = eta * scan.normalizer;
    let count = scan.abs_delta.iter().filter(|&&d| d > threshold).count();
    count as f64 / scan.abs_delta.len() as f64
}

/// `(1/X) Σ_{x∈[X,2X]} |Δ(x)|²`.
pub fn l2_variance(table: &ValueTable, x: u64, h: u64, centering: Centering) -> Result<f64> {
    Ok(discrepancy_profile(table, x, h, centering, 1.0, false)?.l2)
}

impl WindowScan {
    /// Quantiles of `|Δ|` (nearest rank), e.g. `[0.5, 0.9, 0.99]`.
    pub fn quantiles(&self, ps: &[f64]) -> Vec<f64> {
        let mut v = self.abs_delta.clone();
        ps.iter()
            .map(|&p| {
                let rank = crate::math::ceil(p * v.len() as f64).max(1.0) as usize - 1;
                let rank = rank.min(v.len() - 1);
                *v.select_nth_unstable_by(rank, |a, b| a.total_cmp(b)).1
            })
            .collect()
    }
}

/// Per-integer columns for the band `|ω(n) - k log log X| ≤ ε′ log log X`:
/// whether `n` is in the band, and `d_k(n)` when it is not.
#[derive(Debug, Clone)]
pub struct OmegaBandColumns {
    k: u32,
    lo: f64,
    hi: f64,
    pub typical: Vec<u32>,
    pub deviant_dk: Vec<i64>,
}

impl OmegaBandColumns {
    pub fn new(x: f64, k: u32, eps_prime: f64) -> Result<Self> {
        if !(eps_prime >= 0.0) || eps_prime >= k as f64 {
            return Err(param_err!("ε′ = {eps_prime} must lie in [0, k) with k = {k}"));
        }
        let ll = ln(ln(x));
        Ok(Self {
            k,
            lo: (k as f64 - eps_prime) * ll,
            hi: (k as f64 + eps_prime) * ll,
            typical: Vec::new(),
            deviant_dk: Vec::new(),
        })
    }
}

impl RangeAccumulator for OmegaBandColumns {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            let w = seg.small_omega_at(i) as f64;
            let typical = self.lo <= w && w <= self.hi;
            self.typical.push(typical as u32);
            let dk = if typical { 0 } else { dk_value(seg.view_at(i), self.k)? };
            self.deviant_dk
                .push(i64::try_from(dk).map_err(|_| Error::Overflow("d_k in i64"))?);
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.typical.extend(later.typical);
        self.deviant_dk.extend(later.deviant_dk);
    }
}

/// Cumulative band counts over `(start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    start: u64,
    k: u32,
    log_x: f64,
    typical: Vec<u32>,
    deviant: Vec<i64>,
}

impl BandTable {
    /// `x` is the scale `X` used for normalization.
    pub fn from_columns(start: u64, x: f64, cols: OmegaBandColumns) -> Result<Self> {
        let OmegaBandColumns {
            k,
            mut typical,
            mut deviant_dk,
            ..
        } = cols;
        let mut t = 0u32;
        for v in typical.iter_mut() {
            t = t.checked_add(*v).ok_or(Error::Overflow("band count"))?;
            *v = t;
        }
        let mut d = 0i64;
        for v in deviant_dk.iter_mut() {
            d = d.checked_add(*v).ok_or(Error::Overflow("deviant d_k sum"))?;
            *v = d;
        }
        Ok(Self {
            start,
            k,
            log_x: ln(x),
            typical,
            deviant: deviant_dk,
        })
    }

    fn end(&self) -> u64 {
        self.start + self.typical.len() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdRow {
    pub h: u64,
    /// Fraction of `x ∈ [X, 2X]` whose window `(x, x+h]` has no integer in
    /// the band.
    pub vanish_fraction: f64,
    /// Mean over `x` of `(1/h) Σ_{n ∈ (x,x+h], n outside the band} d_k(n)`,
    /// divided by `log^{k-1} X`.
    pub concentrated_dk_mass: f64,
}

/// Window statistics of the `ω` band for each `h`.
pub fn inverse_threshold_experiment(band: &BandTable, x: u64, h_grid: &[u64]) -> Result<Vec<ThresholdRow>> {
    let max_h = h_grid.iter().copied().max().unwrap_or(0);
    if x < band.start || 2 * x + max_h > band.end() {
        return Err(Error::OutOfRange {
            n: 2 * x + max_h,
            lo: band.start,
            hi: band.end() + 1,
        });
    }
    let at_t = |n: u64| {
        if n == band.start {
            0
        } else {
            band.typical[(n - band.start - 1) as usize]
        }
    };
    let at_d = |n: u64| {
        if n == band.start {
            0
        } else {
            band.deviant[(n - band.start - 1) as usize]
        }
    };
    let norm = powf(band.log_x, band.k as f64 - 1.0);
    let count = (x + 1) as f64;
    h_grid
        .iter()
        .map(|&h| {
            if h == 0 {
                return Ok(ThresholdRow {
                    h,
                    vanish_fraction: 1.0,
                    concentrated_dk_mass: 0.0,
                });
            }
            let mut empty = 0u64;
            let mut mass: i128 = 0;
            for a in x..=2 * x {
                if at_t(a + h) == at_t(a) {
                    empty += 1;
                }
                mass += (at_d(a + h) - at_d(a)) as i128;
            }
            Ok(ThresholdRow {
                h,
                vanish_fraction: empty as f64 / count,
                concentrated_dk_mass: mass as f64 / (h as f64 * count * norm),
            })
        })
        .collect()
}

/// `⌈(log X)^e⌉`, the window length attached to exponent `e`.
pub fn h_for_exponent(x: f64, e: f64) -> u64 {
    crate::math::ceil(exp(e * ln(ln(x)))) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulate::Sequential;

    fn seq(segment_size: u64) -> Sequential {
        Sequential { segment_size }
    }

    fn table(name: &str, start: u64, end: u64, t0: f64) -> ValueTable {
        let f = MultiplicativeFunction::from_name(name).unwrap();
        ValueTable::build(&f, start, end, t0, &seq(1 << 16)).unwrap()
    }

    #[test]
    fn constant_function_windows() {
        let one = MultiplicativeFunction::from_rule_text("k 1\nreal\n* * 1 0\n").unwrap();
        let t = ValueTable::build(&one, 0, 400, 0.0, &seq(128)).unwrap();
        let s = window_sums(&t, 100, 7).unwrap();
        assert!(s.iter().all(|&v| v == Complex64::new(7.0, 0.0)));
        let z = window_sums(&t, 100, 0).unwrap();
        assert!(z.iter().all(|&v| v == Complex64::new(0.0, 0.0)));
        for c in [Centering::Plain, Centering::Twisted { t0: 0.0 }] {
            let scan = discrepancy_profile(&t, 100, 7, c, 1.0, true).unwrap();
            assert!(scan.abs_delta.iter().all(|&d| d == 0.0));
            assert_eq!(scan.l2, 0.0);
            assert_eq!(exceptional_measure(&scan, 1e-9), 0.0);
        }
    }

    #[test]
    fn d2_windows_match_direct_sums() {
        let x = 10_000u64;
        let h = 10u64;
        let t = table("dk:2", x, 2 * x + h, 0.0);
        assert!(t.is_exact());
        let sums = window_sums(&t, x, h).unwrap();
        for (i, a) in (x..=2 * x).enumerate().step_by(37) {
            let direct: u64 = (a + 1..=a + h)
                .map(|n| (1..=n).filter(|d| n % d == 0).count() as u64)
                .sum();
            assert_eq!(sums[i].re, direct as f64);
        }
        assert!(window_sums(&t, x, h + 1).is_err());
    }

    #[test]
    fn weight_limits() {
        assert_eq!(window_weight(100.0, 10.0, 0.0), Complex64::new(10.0, 0.0));
        let tiny = window_weight(1000.0, 1e-6, 2.5) / 1e-6;
        let want = cis(2.5 * ln(1000.0));
        assert!((tiny - want).norm() < 1e-8);
    }

    #[test]
    fn weight_matches_quadrature() {
        // Simpson on ∫_100^110 u^{3i} du
        let n = 20_000;
        let step = 10.0 / n as f64;
        let g = |u: f64| cis(3.0 * ln(u));
        let mut acc = g(100.0) + g(110.0);
        for j in 1..n {
            acc += g(100.0 + j as f64 * step) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        let q = acc * step / 3.0;
        assert!((window_weight(100.0, 10.0, 3.0) - q).norm() < 1e-10);
    }

    #[test]
    fn twist_cancels_for_pure_character() {
        // f(n) = n^{iτ}: the twisted centering removes the oscillation
        let tau = 2.0;
        let f = MultiplicativeFunction::from_rule_text("k 1\n* * 1 0\n")
            .map(|mut f| {
                f.twist = tau;
                f
            })
            .unwrap();
        let x = 100_000u64;
        let h = 1000u64;
        let t = ValueTable::build(&f, x, 2 * x + h, tau, &seq(1 << 16)).unwrap();
        let scan = discrepancy_profile(&t, x, h, Centering::Twisted { t0: tau }, 1.0, false).unwrap();
        let worst = scan.abs_delta.iter().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-2, "max |Δ| = {worst}");
        assert!(discrepancy_profile(&t, x, h, Centering::Twisted { t0: 1.0 }, 1.0, false).is_err());
    }

    #[test]
    fn prefix_matches_direct_complex() {
        let f = MultiplicativeFunction::dk_twist(2, 0.7).unwrap();
        let primes = crate::PrimeTable::up_to(200).unwrap();
        let t = ValueTable::build(&f, 1000, 30_000, 0.0, &seq(4096)).unwrap();
        let seg = SieveSegment::build(1001, 30_001, &primes, 1 << 16).unwrap();
        for (a, b) in [(1000u64, 1017u64), (5000, 29_000), (12_345, 12_346)] {
            let direct: Complex64 = (a + 1..=b).map(|n| f.eval(seg.factor(n).unwrap()).unwrap()).sum();
            let got = t.sum(a, b).unwrap();
            assert!((got - direct).norm() <= 1e-9 * direct.norm());
        }
    }

    #[test]
    fn scan_summary_invariants() {
        let x = 20_000u64;
        let t = table("dk:2", x, 4 * x + 16, 0.0);
        let scan = discrepancy_profile(&t, x, 8, Centering::Plain, ln(x as f64), false).unwrap();
        assert_eq!(scan.abs_delta.len() as u64, x + 1);
        assert!(scan.l2 >= scan.mean_abs * scan.mean_abs);
        let e: Vec<f64> = [0.1, 0.3, 0.5, 1.0]
            .iter()
            .map(|&eta| exceptional_measure(&scan, eta))
            .collect();
        assert!(e.windows(2).all(|w| w[0] >= w[1]));
        let q = scan.quantiles(&[0.5, 0.9, 0.99]);
        assert!(q[0] <= q[1] && q[1] <= q[2]);
    }

    #[test]
    fn threshold_rows() {
        let x = 10_000u64;
        let primes = crate::accumulate::prime_table_for(2 * x + 50).unwrap();
        let cols = crate::accumulate::run_sequential(x + 1, 2 * x + 51, 4096, &primes, || {
            OmegaBandColumns::new(x as f64, 2, 0.2).unwrap()
        })
        .unwrap();
        let band = BandTable::from_columns(x, x as f64, cols).unwrap();
        let rows = inverse_threshold_experiment(&band, x, &[0, 1, 5, 50]).unwrap();
        assert_eq!(rows[0].vanish_fraction, 1.0);
        assert!(rows.windows(2).all(|w| w[0].vanish_fraction >= w[1].vanish_fraction));
        assert!(OmegaBandColumns::new(1e4, 2, 2.0).is_err());
        assert_eq!(h_for_exponent(1e8, 0.0), 1);
    }
}
