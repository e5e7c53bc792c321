//! Multiplicative functions given by their values on prime powers.
//!
//! A [`MultiplicativeFunction`] is a base rule `(p, a) → f₀(p^a)` optionally
//! twisted by `n^{iτ}`, so `f(p^a) = f₀(p^a) p^{iτa}`. Besides evaluation it
//! carries a declared divisor bound `k` (meaning `|f(n)| ≤ d_k(n)`, audited by
//! [`DkBoundAudit`]) and an optional declaration that `f` is almost
//! real-valued.

pub mod custom;
mod distance;
mod euler;

pub use distance::{
    distance_lowerbound_profile, find_t0, h_threshold, halasz_distance_sq, halasz_distance_sq_grid,
    log_mertens_product, mertens_product, non_real_mass, nonvanishing_audit, DistanceProfile, NonvanishingReport,
    T0Options, T0Reason,
};
pub use euler::{euler_product_diagnostics, EulerDiagnostics};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::accumulate::RangeAccumulator;
use crate::error::{param_err, Error, Result};
use crate::math::{binomial, cis, ln, powf};
use crate::sieve::{dk_value, FactorView, SieveSegment};
use custom::RuleLine;

/// Values on prime powers before any twist.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimePowerRule {
    /// `f(p^a) = C(a+k-1, k-1)`.
    Dk { k: u32 },
    /// `f(p^a) = k^a`, i.e. `f(n) = k^{Ω(n)}`.
    OmegaPow { k: u32 },
    /// `d_k` with every power of a prime in `[lo, hi]` sent to 0.
    Rough { k: u32, lo: u64, hi: u64 },
    /// First matching line wins; unmatched prime powers are 0.
    Table(Vec<RuleLine>),
}

impl PrimePowerRule {
    fn base(&self, p: u64, a: u32) -> Complex64 {
        match self {
            Self::Dk { k } => Complex64::new(dk_f64(a, *k), 0.0),
            Self::OmegaPow { k } => Complex64::new(powf(*k as f64, a as f64), 0.0),
            Self::Rough { k, lo, hi } => {
                if *lo <= p && p <= *hi {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(dk_f64(a, *k), 0.0)
                }
            }
            Self::Table(lines) => lines
                .iter()
                .find(|l| l.prime.matches(p) && l.exponent.matches(a))
                .map_or(Complex64::new(0.0, 0.0), |l| l.value),
        }
    }

    /// Exact integer value, when the rule is integer-valued.
    fn base_int(&self, p: u64, a: u32) -> Option<i64> {
        match self {
            Self::Dk { k } => binomial(a as u64 + *k as u64 - 1, *k as u64 - 1)?.try_into().ok(),
            Self::OmegaPow { k } => (*k as i64).checked_pow(a),
            Self::Rough { k, lo, hi } => {
                if *lo <= p && p <= *hi {
                    Some(0)
                } else {
                    binomial(a as u64 + *k as u64 - 1, *k as u64 - 1)?.try_into().ok()
                }
            }
            Self::Table(_) => {
                let v = self.base(p, a);
                integral(v).then_some(v.re as i64)
            }
        }
    }

    fn integer_valued(&self) -> bool {
        match self {
            Self::Table(lines) => lines.iter().all(|l| integral(l.value)),
            _ => true,
        }
    }

    /// Value at `p` for all sufficiently large primes.
    fn eventual_prime_value(&self) -> Complex64 {
        match self {
            Self::Dk { k } | Self::OmegaPow { k } | Self::Rough { k, .. } => Complex64::new(*k as f64, 0.0),
            Self::Table(lines) => lines
                .iter()
                .find(|l| l.prime.holds_eventually() && l.exponent.matches(1))
                .map_or(Complex64::new(0.0, 0.0), |l| l.value),
        }
    }
}

fn integral(v: Complex64) -> bool {
    v.im == 0.0 && crate::math::floor(v.re) == v.re && v.re.abs() < 9.0e15
}

fn dk_f64(a: u32, k: u32) -> f64 {
    // C(a+k-1, k-1) as a float, exact while it fits 53 bits
    let mut acc = 1.0;
    for i in 1..k {
        acc = acc * (a + i) as f64 / i as f64;
    }
    if acc < 9.0e15 {
        crate::math::round(acc)
    } else {
        acc
    }
}

/// A multiplicative function with a declared divisor bound.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeFunction {
    pub name: String,
    pub bound_k: u32,
    pub real_flag: bool,
    pub rule: PrimePowerRule,
    /// `τ` in the twist `n^{iτ}`; 0 for none.
    pub twist: f64,
}

impl MultiplicativeFunction {
    pub fn dk(k: u32) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            name: format!("dk:{k}"),
            bound_k: k,
            real_flag: true,
            rule: PrimePowerRule::Dk { k },
            twist: 0.0,
        })
    }

    pub fn dk_twist(k: u32, tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(param_err!("twist must be finite"));
        }
        let mut f = Self::dk(k)?;
        f.name = format!("dk_twist:{k}:{tau}");
        f.real_flag = tau == 0.0;
        f.twist = tau;
        Ok(f)
    }

    pub fn omega_pow(k: u32) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            name: format!("omega_pow:{k}"),
            bound_k: k,
            real_flag: true,
            rule: PrimePowerRule::OmegaPow { k },
            twist: 0.0,
        })
    }

    pub fn rough(k: u32, lo: u64, hi: u64) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            name: format!("rough:{k}:{lo}:{hi}"),
            bound_k: k,
            real_flag: true,
            rule: PrimePowerRule::Rough { k, lo, hi },
            twist: 0.0,
        })
    }

    /// Builds a function from the rule text format of [`custom`].
    pub fn from_rule_text(text: &str) -> Result<Self> {
        let file = custom::parse(text)?;
        let bound_k = file.bound_k.ok_or(Error::Parse {
            line: 0,
            msg: "rule file needs a `k N` line".to_string(),
        })?;
        Ok(Self {
            name: file.name.unwrap_or_else(|| "custom".to_string()),
            bound_k,
            real_flag: file.real,
            rule: PrimePowerRule::Table(file.lines),
            twist: 0.0,
        })
    }

    /// Looks up a registry name: `dk:k`, `dk_twist:k:t`, `omega_pow:k`,
    /// `rough:k:P:Q`.
    pub fn from_name(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        let int = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| param_err!("bad integer {s:?} in function name {name:?}"))
        };
        let k32 =
            |s: &str| -> Result<u32> { u32::try_from(int(s)?).map_err(|_| param_err!("k too large in {name:?}")) };
        match parts.as_slice() {
            ["dk", k] => Self::dk(k32(k)?),
            ["dk_twist", k, t] => {
                let tau: f64 = t
                    .parse()
                    .map_err(|_| param_err!("bad twist {t:?} in function name {name:?}"))?;
                Self::dk_twist(k32(k)?, tau)
            }
            ["omega_pow", k] => Self::omega_pow(k32(k)?),
            ["rough", k, p, q] => Self::rough(k32(k)?, int(p)?, int(q)?),
            _ => Err(param_err!("unknown function name {name:?}")),
        }
    }

    /// `f(p^a)`.
    #[inline]
    pub fn prime_power(&self, p: u64, a: u32) -> Complex64 {
        let base = self.rule.base(p, a);
        if self.twist == 0.0 {
            base
        } else {
            base * cis(self.twist * a as f64 * ln(p as f64))
        }
    }

    /// `|f(p)|`; the twist has modulus one.
    #[inline]
    pub fn abs_at_prime(&self, p: u64) -> f64 {
        self.rule.base(p, 1).norm()
    }

    /// `f(p)` for every sufficiently large prime `p`, without the twist.
    pub fn eventual_prime_value(&self) -> Complex64 {
        self.rule.eventual_prime_value()
    }

    /// True when every value is an integer and there is no twist.
    pub fn is_integer_valued(&self) -> bool {
        self.twist == 0.0 && self.rule.integer_valued()
    }

    /// `f(n)` from the factorization of `n`.
    pub fn eval(&self, fv: FactorView<'_>) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, a) in fv.iter() {
            acc *= self.prime_power(p, a as u32);
        }
        if acc.re.is_finite() && acc.im.is_finite() {
            Ok(acc)
        } else {
            Err(Error::Evaluation(format!("{} is not finite on this input", self.name)))
        }
    }

    /// Exact `f(n)` for integer-valued untwisted functions.
    pub fn eval_int(&self, fv: FactorView<'_>) -> Result<i64> {
        if !self.is_integer_valued() {
            return Err(Error::Evaluation(format!("{} is not integer-valued", self.name)));
        }
        fv.iter().try_fold(1i64, |acc, (p, a)| {
            let v = self
                .rule
                .base_int(p, a as u32)
                .ok_or(Error::Overflow("prime-power value"))?;
            acc.checked_mul(v).ok_or(Error::Overflow("multiplicative product"))
        })
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        Err(param_err!("divisor bound k must be at least 1"))
    } else {
        Ok(())
    }
}

/// Relative tolerance when comparing `|f(n)|` with `d_k(n)`.
pub const DK_BOUND_TOLERANCE: f64 = 1e-12;

/// Lists every `n` with `|f(n)| > d_k(n)`.
#[derive(Debug, Clone)]
pub struct DkBoundAudit<'a> {
    f: &'a MultiplicativeFunction,
    pub checked: u64,
    pub violations: Vec<u64>,
}

impl<'a> DkBoundAudit<'a> {
    pub fn new(f: &'a MultiplicativeFunction) -> Self {
        Self {
            f,
            checked: 0,
            violations: Vec::new(),
        }
    }
}

impl RangeAccumulator for DkBoundAudit<'_> {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for (n, fv) in seg.iter() {
            let value = self.f.eval(fv)?.norm();
            let bound = match dk_value(fv, self.f.bound_k) {
                Ok(d) => d as f64,
                // d_k beyond 64 bits dominates any finite rule value we can store
                Err(Error::Overflow(_)) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            if value > bound * (1.0 + DK_BOUND_TOLERANCE) {
                self.violations.push(n);
            }
            self.checked += 1;
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.checked += later.checked;
        self.violations.extend(later.violations);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulate::{prime_table_for, run_sequential};
    use crate::sieve::FactorVector;
    use alloc::vec;

    fn fv(entries: &[(u64, u8)]) -> FactorVector {
        FactorVector::new(entries).unwrap()
    }

    #[test]
    fn d2_at_twelve() {
        let f = MultiplicativeFunction::dk(2).unwrap();
        assert_eq!(f.eval(fv(&[(2, 2), (3, 1)]).view()).unwrap(), Complex64::new(6.0, 0.0));
        assert_eq!(f.eval_int(fv(&[(2, 2), (3, 1)]).view()).unwrap(), 6);
        assert_eq!(f.eval(FactorVector::one().view()).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn twist_at_two() {
        let f = MultiplicativeFunction::from_name("dk_twist:2:3").unwrap();
        let got = f.eval(fv(&[(2, 1)]).view()).unwrap();
        let want = cis(3.0 * core::f64::consts::LN_2) * 2.0;
        assert!((got - want).norm() < 1e-15);
        assert!(!f.is_integer_valued());
    }

    #[test]
    fn registry_names() {
        assert_eq!(
            MultiplicativeFunction::from_name("omega_pow:3")
                .unwrap()
                .prime_power(5, 2)
                .re,
            9.0
        );
        let r = MultiplicativeFunction::from_name("rough:2:10:100").unwrap();
        assert_eq!(r.prime_power(11, 1).re, 0.0);
        assert_eq!(r.prime_power(7, 2).re, 3.0);
        assert!(MultiplicativeFunction::from_name("dk:0").is_err());
        assert!(MultiplicativeFunction::from_name("zeta").is_err());
    }

    #[test]
    fn dk_float_matches_binomial() {
        for k in 1..8u32 {
            for a in 0..30u32 {
                let exact = binomial((a + k - 1) as u64, (k - 1) as u64).unwrap();
                assert_eq!(dk_f64(a, k), exact as f64);
            }
        }
    }

    #[test]
    fn bound_audit() {
        let primes = prime_table_for(10_001).unwrap();
        let audit = |f: &MultiplicativeFunction| {
            let r = run_sequential(1, 10_001, 4096, &primes, || DkBoundAudit::new(f)).unwrap();
            (r.checked, r.violations)
        };
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        assert_eq!(audit(&d2), (10_000, vec![]));

        let too_big = MultiplicativeFunction::from_rule_text("k 2\n* * 3 0\n").unwrap();
        let (_, v) = audit(&too_big);
        assert!(v.contains(&2) && v.contains(&9973));

        let mobius_like = MultiplicativeFunction::from_rule_text("k 1\nreal\n* odd -1 0\n* even 1 0\n").unwrap();
        assert!(audit(&mobius_like).1.is_empty());
        assert_eq!(mobius_like.eval(fv(&[(2, 3), (3, 2)]).view()).unwrap().re, -1.0);
    }

    #[test]
    fn eventual_values() {
        let t = MultiplicativeFunction::from_rule_text("k 2\n<100 1 1 0\n>=100 * 2 0\n").unwrap();
        assert_eq!(t.eventual_prime_value(), Complex64::new(2.0, 0.0));
        let none = MultiplicativeFunction::from_rule_text("k 1\n=2 1 1 0\n").unwrap();
        assert_eq!(none.eventual_prime_value(), Complex64::new(0.0, 0.0));
    }
}
