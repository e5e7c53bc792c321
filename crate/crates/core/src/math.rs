//! Floating-point helpers shared by every numerical module.
//!
//! All transcendental functions go through `libm` so that results do not
//! depend on whether the standard library is linked.

use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, s)
}

/// `n^{-σ - it}` for a positive integer `n`.
#[inline]
pub fn n_pow_neg(n: u64, sigma: f64, t: f64) -> Complex64 {
    let l = ln(n as f64);
    cis(-t * l) * exp(-sigma * l)
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn cexpm1(z: Complex64) -> Complex64 {
    let em1 = expm1(z.re);
    let (s, c) = libm::sincos(z.im);
    let half = sin(0.5 * z.im);
    // cos b - 1 = -2 sin^2(b/2)
    let cm1 = -2.0 * half * half;
    Complex64::new(em1 * c + cm1, (em1 + 1.0) * s)
}

pub fn cln(z: Complex64) -> Complex64 {
    Complex64::new(ln(z.norm()), libm::atan2(z.im, z.re))
}

pub fn cexp(z: Complex64) -> Complex64 {
    cis(z.im) * exp(z.re)
}

/// Exponential integral `E1(z) = ∫_z^∞ e^{-u}/u du` for `Re z > 0`.
pub fn exp_integral_e1(z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        // -γ - ln z - Σ (-z)^n / (n n!)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for n in 1..200u32 {
            term = term * (-z) / n as f64;
            let add = term / n as f64;
            sum += add;
            if add.norm() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
        }
        -Complex64::new(EULER_GAMMA, 0.0) - cln(z) - sum
    } else {
        // modified Lentz on the even contraction of the continued fraction
        const TINY: f64 = 1e-300;
        let one = Complex64::new(1.0, 0.0);
        let mut b = z + one;
        let mut c = Complex64::new(1.0 / TINY, 0.0);
        let mut d = one / b;
        let mut h = d;
        for i in 1..10_000u32 {
            let an = -((i as f64) * (i as f64));
            b += 2.0;
            d = one / (d * an + b);
            c = b + c.inv() * an;
            let del = c * d;
            h *= del;
            if (del - one).norm() < 1e-16 {
                break;
            }
        }
        h * cexp(-z)
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of complex values, componentwise.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub const fn new() -> Self {
        Self {
            re: KahanSum::new(),
            im: KahanSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl core::iter::FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`; used for long prefix
/// sums whose differences must stay accurate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    #[inline]
    pub fn add_f64(self, x: f64) -> Self {
        // two-sum followed by renormalisation
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        let lo = self.lo + err;
        let hi = s + lo;
        Self { hi, lo: lo - (hi - s) }
    }

    /// `self - other` rounded to f64.
    #[inline]
    pub fn diff(self, other: Self) -> f64 {
        (self.hi - other.hi) + (self.lo - other.lo)
    }
}

/// `C(n, r)` with overflow reported as `None`.
pub fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = sqrt(n as f64) as u64;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Composite trapezoid rule over equally spaced samples.
pub fn trapezoid(step: f64, samples: &[f64]) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let mut acc = KahanSum::new();
            acc.add(0.5 * samples[0]);
            for &v in &samples[1..n - 1] {
                acc.add(v);
            }
            acc.add(0.5 * samples[n - 1]);
            step * acc.value()
        }
    }
}

/// Composite trapezoid rule for complex samples.
pub fn trapezoid_complex(step: f64, samples: &[Complex64]) -> Complex64 {
    match samples.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let mut acc = ComplexSum::new();
            acc.add(samples[0] * 0.5);
            for &v in &samples[1..n - 1] {
                acc.add(v);
            }
            acc.add(samples[n - 1] * 0.5);
            acc.value() * step
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(3, 0), Some(1));
        assert_eq!(binomial(2, 3), Some(0));
        assert_eq!(binomial(66, 33), Some(7_219_428_434_016_265_740));
        assert_eq!(binomial(70, 35), None);
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..10_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }

    #[test]
    fn e1_real_values() {
        // reference values of E1 at 0.5, 1, 2, 5
        let cases = [
            (0.5, 0.559_773_594_776_160_8),
            (1.0, 0.219_383_934_395_520_3),
            (2.0, 0.048_900_510_708_061_12),
            (5.0, 0.001_148_295_591_275_325_8),
        ];
        for (x, want) in cases {
            let got = exp_integral_e1(Complex64::new(x, 0.0));
            assert!((got.re - want).abs() < 1e-13 * want.max(1e-3), "E1({x}) = {got}");
            assert!(got.im.abs() < 1e-15);
        }
    }

    #[test]
    fn e1_complex_matches_quadrature() {
        // E1(z) = ∫_1^∞ e^{-z u}/u du along the real ray, valid for Re z > 0
        for z in [
            Complex64::new(0.3, 0.4),
            Complex64::new(0.2, 5.0),
            Complex64::new(2.0, -3.0),
            Complex64::new(0.9, 0.1),
        ] {
            // substitute u = e^v, integrate e^{-z e^v} over v in [0, 12]
            let n = 400_000;
            let h = 12.0 / n as f64;
            let samples: alloc::vec::Vec<Complex64> = (0..=n).map(|i| cexp(-z * exp(i as f64 * h))).collect();
            let q = trapezoid_complex(h, &samples);
            let e = exp_integral_e1(z);
            assert!((q - e).norm() < 1e-8, "z={z}: quad {q} vs {e}");
        }
    }

    #[test]
    fn cexpm1_small() {
        let z = Complex64::new(1e-12, 2e-12);
        let got = cexpm1(z);
        assert!((got - z).norm() < 1e-23);
    }

    #[test]
    fn double_double_differences() {
        let mut acc = DoubleDouble::default();
        let mut prefix = alloc::vec![acc];
        for i in 0..100_000 {
            acc = acc.add_f64(1e8 + (i % 7) as f64 * 0.1);
            prefix.push(acc);
        }
        let direct: f64 = (500..510).map(|i| 1e8 + (i % 7) as f64 * 0.1).sum();
        let via = prefix[510].diff(prefix[500]);
        assert!((via - direct).abs() <= 1e-15 * direct);
    }
}
