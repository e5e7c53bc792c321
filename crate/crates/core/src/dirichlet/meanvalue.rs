//! Continuous and discrete mean values of Dirichlet polynomials.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::grid::{eval_point, GridEvaluator, Term, UniformGrid};
use super::{frak_s, log_at_least_one, BoundCheck, WellSpacedSet};
use crate::accumulate::{Collect, SegmentRunner};
use crate::error::{param_err, Error, Result};
use crate::math::{ceil, ln, ln1p, powf, sqrt, trapezoid, KahanSum};
use crate::multfun::{mertens_product, MultiplicativeFunction};
use crate::primes::PrimeTable;
use crate::restrict::b_threshold;
use crate::sieve::{trial_division, SieveSegment};

fn check_sparse(coeffs: &[(u64, Complex64)]) -> Result<()> {
    let mut prev = 0u64;
    for &(n, a) in coeffs {
        if n <= prev {
            return Err(param_err!("coefficient indices must be increasing and start at 1"));
        }
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(param_err!("coefficient at n = {n} is not finite"));
        }
        prev = n;
    }
    Ok(())
}

/// `∫_{-T}^{T} |Σ a_n n^{it}|² dt` by the trapezoidal rule, against
/// `T Σ|a_n|² + T Σ_{1≤|m|≤N/T} Σ_n |a_n a_{n+m}|`.
///
/// The diagonal `2T Σ|a_n|²` is integrated exactly and only the oscillating
/// remainder goes through the quadrature. `coeffs` holds `(n, a_n)` with
/// increasing `n`.
pub fn meanvalue_check<E: GridEvaluator>(
    coeffs: &[(u64, Complex64)],
    t_max: f64,
    quad_step: f64,
    ev: &E,
) -> Result<BoundCheck> {
    check_sparse(coeffs)?;
    if !(t_max > 0.0) {
        return Err(param_err!("T must be positive"));
    }
    let n_max = coeffs.last().map_or(1, |c| c.0);
    let finest = if n_max >= 2 {
        0.25 / ln(n_max as f64)
    } else {
        f64::INFINITY
    };
    if !(quad_step > 0.0 && quad_step <= finest) {
        return Err(param_err!("quadrature step {quad_step} exceeds 1/(4 log N) = {finest}"));
    }
    let diag = coeffs.iter().map(|c| c.1.norm_sqr()).collect::<KahanSum>().value();
    let nonzero: Vec<Term> = coeffs
        .iter()
        .filter(|c| c.1 != Complex64::new(0.0, 0.0))
        .map(|&(n, a)| Term::new(n, a, 0.0))
        .collect();
    let mut lhs = 2.0 * t_max * diag;
    if nonzero.len() > 1 {
        let g = UniformGrid::covering(-t_max, t_max, quad_step);
        let samples: Vec<f64> = ev.eval(&nonzero, &g).iter().map(|v| v.norm_sqr() - diag).collect();
        lhs += trapezoid(g.dt, &samples);
    }

    let reach = crate::math::floor(n_max as f64 / t_max) as u64;
    let mut off = KahanSum::new();
    for (i, &(n, a)) in coeffs.iter().enumerate() {
        for &(m, b) in &coeffs[i + 1..] {
            if m - n > reach {
                break;
            }
            off.add(a.norm() * b.norm());
        }
    }
    let rhs = t_max * diag + 2.0 * t_max * off.value();
    Ok(BoundCheck::new(lhs, rhs))
}

/// `Σ_{t∈𝒯} |Σ_{X<n≤2X} a_n n^{-1-it}|²` against
/// `min{(1 + T/X) log X, (1 + |𝒯| T^{1/2}/X) log T} (1/X) Σ|a_n|²`.
pub fn discrete_meanvalue_check(coeffs: &[(u64, Complex64)], set: &WellSpacedSet, x: u64) -> Result<BoundCheck> {
    check_sparse(coeffs)?;
    if coeffs.iter().any(|&(n, _)| n <= x || n > 2 * x) {
        return Err(param_err!("coefficients must lie in (X, 2X] with X = {x}"));
    }
    let terms: Vec<Term> = coeffs.iter().map(|&(n, a)| Term::new(n, a, 1.0)).collect();
    let lhs = set
        .points()
        .iter()
        .map(|&t| eval_point(&terms, t).norm_sqr())
        .collect::<KahanSum>()
        .value();
    let xf = x as f64;
    let t = set.t_max();
    let mass = coeffs.iter().map(|c| c.1.norm_sqr()).collect::<KahanSum>().value() / xf;
    let first = (1.0 + t / xf) * log_at_least_one(xf);
    let second = (1.0 + set.len() as f64 * sqrt(t) / xf) * log_at_least_one(t);
    Ok(BoundCheck::new(lhs, first.min(second) * mass))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HenriotInputs {
    pub x: u64,
    pub y: u64,
    /// Largest shift `K`.
    pub k_max: u64,
    pub r1: u64,
    pub r2: u64,
    pub theta: f64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Σ_{0≠|k|≤K, (r₁,r₂)|k} Σ_{x<n≤x+y, r₁|n, r₂|n+k} |f(n) f(n+k)|` against
/// `K |f(r₁)f(r₂)|/(r₁r₂) y ∏_{p≤x}(1 + (2|f(p)|-2)/p) ∏_{p|r₁r₂, p>K}(1 + (1-|f(p)|)/p)`.
pub fn henriot_correlation<R: SegmentRunner>(
    f: &MultiplicativeFunction,
    inp: &HenriotInputs,
    runner: &R,
) -> Result<BoundCheck> {
    let HenriotInputs {
        x,
        y,
        k_max,
        r1,
        r2,
        theta,
    } = *inp;
    let xf = x as f64;
    if !(theta > 0.0 && theta <= 1.0) || (y as f64) < powf(xf, theta) || y > x {
        return Err(param_err!("need x >= y >= x^θ with θ in (0, 1]"));
    }
    let r_cap = powf(xf, 3.0 * theta / 7.0);
    if r1 == 0 || r2 == 0 || r1 as f64 > r_cap || r2 as f64 > r_cap {
        return Err(param_err!("r₁, r₂ must lie in [1, x^(3θ/7)] = [1, {r_cap:.3}]"));
    }
    if k_max == 0 || k_max > x {
        return Err(param_err!("K must lie in [1, x]"));
    }
    // |f| on (x - K, x + y + K]
    let base = x - k_max;
    let abs = runner
        .run(base + 1, x + y + k_max + 1, || {
            Collect::new(|_, seg: &SieveSegment, i| Ok(f.eval(seg.view_at(i))?.norm()))
        })?
        .values;
    let at = |n: u64| abs[(n - base - 1) as usize];
    let g = gcd(r1, r2);
    let mut lhs = KahanSum::new();
    for k in 1..=k_max {
        if k % g != 0 {
            continue;
        }
        for sign in [-1i64, 1] {
            let shift = sign * k as i64;
            let first = (x / r1 + 1) * r1;
            let mut n = first;
            while n <= x + y {
                let m = (n as i64 + shift) as u64;
                if m % r2 == 0 {
                    lhs.add(at(n) * at(m));
                }
                n += r1;
            }
        }
    }

    let table = PrimeTable::up_to(x)?;
    let mut log_prod = KahanSum::new();
    for &p in table.primes() {
        let u = (2.0 * f.abs_at_prime(p as u64) - 2.0) / p as f64;
        if u <= -1.0 {
            return Err(Error::Domain(alloc::format!(
                "factor 1 + (2|f(p)| - 2)/p vanishes at p = {p}"
            )));
        }
        log_prod.add(ln1p(u));
    }
    let fr = |r: u64| f.eval(trial_division(r).view()).map(|v| v.norm());
    let mut rhs =
        k_max as f64 * fr(r1)? * fr(r2)? / (r1 as f64 * r2 as f64) * y as f64 * crate::math::exp(log_prod.value());
    let fac = trial_division(r1 * r2);
    for &p in fac.view().primes() {
        if p > k_max {
            rhs *= 1.0 + (1.0 - f.abs_at_prime(p)) / p as f64;
        }
    }
    Ok(BoundCheck::new(lhs.value(), rhs))
}

/// `⌈log Y₂ / log Y₁⌉`.
pub fn amplifier_length(y1: f64, y2: f64) -> Result<u32> {
    if !(y1 > 1.0 && y2 >= 1.0) {
        return Err(param_err!("need Y₁ > 1 and Y₂ >= 1"));
    }
    Ok(ceil(ln(y2) / ln(y1)) as u32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AmplifiedInputs {
    pub y1: u64,
    pub y2: u64,
    pub x: u64,
    pub l: u32,
    pub t_max: f64,
    /// `ε′` of the set `B_{ε′}` and of `𝔖`.
    pub eps: f64,
    pub quad_step: f64,
}

/// `∫_{-T}^{T} |Q(1+it)^l A(1+it)|² dt` against `𝔖(T,X,f,ε′) k^{2l} ((l+1)!)²`,
/// with `Q(s) = Σ_{Y₁<p≤2Y₁} f(p) p^{-s}` and
/// `A(s) = Σ_{X/Y₂<m≤2X/Y₂} f(m) 1_{B_{ε′}}(m) m^{-s}`.
pub fn amplified_meanvalue<R: SegmentRunner, E: GridEvaluator>(
    f: &MultiplicativeFunction,
    inp: &AmplifiedInputs,
    runner: &R,
    ev: &E,
) -> Result<BoundCheck> {
    let AmplifiedInputs {
        y1,
        y2,
        x,
        l,
        t_max,
        eps,
        quad_step,
    } = *inp;
    if l > 20 {
        return Err(Error::Overflow("((l+1)!)² for l > 20"));
    }
    if y1 == 0 || y2 == 0 || x / y2 == 0 {
        return Err(param_err!("need Y₁, Y₂ >= 1 and X >= Y₂"));
    }
    let k = f.bound_k;
    let xf = x as f64;
    let table = PrimeTable::up_to(x.max(2 * y1))?;
    let pf_x = mertens_product(f, &table, xf)?;
    let theta = b_threshold(eps, pf_x, xf);

    let q: Vec<(u64, Complex64)> = table
        .primes()
        .iter()
        .filter(|&&p| p as u64 > y1 && p as u64 <= 2 * y1)
        .map(|&p| (p as u64, f.prime_power(p as u64, 1)))
        .collect();
    if q.iter().any(|c| c.1.norm() > k as f64 + 1e-12) {
        return Err(param_err!("|c_p| exceeds k = {k}"));
    }
    let (m_lo, m_hi) = (x / y2, 2 * x / y2);
    let a = runner
        .run(m_lo + 1, m_hi + 1, || {
            Collect::new(|n, seg: &SieveSegment, i| {
                let inside = seg.big_omega_at(i) as f64 <= theta;
                Ok((
                    n,
                    if inside {
                        f.eval(seg.view_at(i))?
                    } else {
                        Complex64::new(0.0, 0.0)
                    },
                ))
            })
        })?
        .values;

    let mut cur: BTreeMap<u64, Complex64> = a.into_iter().collect();
    for _ in 0..l {
        let mut next: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&n, &v) in &cur {
            for &(p, c) in &q {
                let m = n.checked_mul(p).ok_or(Error::Overflow("amplified index"))?;
                *next.entry(m).or_insert(Complex64::new(0.0, 0.0)) += v * c;
            }
        }
        cur = next;
    }
    let coeffs: Vec<(u64, Complex64)> = cur.into_iter().map(|(n, d)| (n, d / n as f64)).collect();
    let lhs = meanvalue_check(&coeffs, t_max, quad_step, ev)?.lhs;
    let fact: f64 = (1..=l as u64 + 1).map(|j| j as f64).product();
    let rhs = frak_s(t_max, xf, k, pf_x, eps)? * powf(k as f64, 2.0 * l as f64) * fact * fact;
    Ok(BoundCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulate::Sequential;
    use crate::dirichlet::Serial;
    use crate::math::sin;

    #[test]
    fn single_coefficient_ratio_is_two() {
        let c = meanvalue_check(&[(17, Complex64::new(0.3, -2.0))], 50.0, 0.01, &Serial).unwrap();
        assert_eq!(c.ratio, 2.0);
    }

    #[test]
    fn two_coefficients_closed_form() {
        let one = Complex64::new(1.0, 0.0);
        let t = 100.0;
        let c = meanvalue_check(&[(1, one), (2, one)], t, 1e-3, &Serial).unwrap();
        let want = 4.0 * t + 4.0 * sin(t * ln(2.0)) / ln(2.0);
        assert!((c.lhs / want - 1.0).abs() < 1e-6, "{} vs {want}", c.lhs);
        assert!(meanvalue_check(&[(1, one), (2, one)], t, 1.0, &Serial).is_err());
    }

    #[test]
    fn discrete_examples() {
        let one = Complex64::new(1.0, 0.0);
        let empty = WellSpacedSet::new(alloc::vec![], 10.0).unwrap();
        assert_eq!(discrete_meanvalue_check(&[(150, one)], &empty, 100).unwrap().lhs, 0.0);
        let zero = WellSpacedSet::new(alloc::vec![0.0], 10.0).unwrap();
        let c = discrete_meanvalue_check(&[(150, one)], &zero, 100).unwrap();
        assert!((c.lhs - 1.0 / 22_500.0).abs() < 1e-18);
        assert!(discrete_meanvalue_check(&[(50, one)], &zero, 100).is_err());
    }

    #[test]
    fn henriot_constant_function() {
        let one = MultiplicativeFunction::from_rule_text("k 1\nreal\n* * 1 0\n").unwrap();
        let inp = HenriotInputs {
            x: 10_000,
            y: 1000,
            k_max: 5,
            r1: 1,
            r2: 1,
            theta: 0.5,
        };
        let c = henriot_correlation(&one, &inp, &Sequential::default()).unwrap();
        assert_eq!(c.lhs, 2.0 * 5.0 * 1000.0);
        assert!((c.ratio - 2.0).abs() < 1e-12);
        // (r₁, r₂) = 2 never divides k = 1
        let none = HenriotInputs {
            k_max: 1,
            r1: 2,
            r2: 4,
            ..inp
        };
        assert_eq!(
            henriot_correlation(&one, &none, &Sequential::default()).unwrap().lhs,
            0.0
        );
    }

    #[test]
    fn amplified_l0_matches_plain() {
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let inp = AmplifiedInputs {
            y1: 10,
            y2: 10,
            x: 10_000,
            l: 0,
            t_max: 20.0,
            eps: 0.5,
            quad_step: 0.02,
        };
        let amp = amplified_meanvalue(&d2, &inp, &Sequential::default(), &Serial).unwrap();
        let pf = mertens_product(&d2, &PrimeTable::up_to(10_000).unwrap(), 1e4).unwrap();
        let theta = b_threshold(0.5, pf, 1e4);
        let coeffs: Vec<(u64, Complex64)> = (1001..=2000u64)
            .map(|n| {
                let fv = trial_division(n);
                let inside = crate::sieve::big_omega(fv.view()) as f64 <= theta;
                let a = if inside {
                    d2.eval(fv.view()).unwrap()
                } else {
                    Complex64::new(0.0, 0.0)
                };
                (n, a / n as f64)
            })
            .collect();
        let plain = meanvalue_check(&coeffs, 20.0, 0.02, &Serial).unwrap();
        assert_eq!(amp.lhs.to_bits(), plain.lhs.to_bits());
        assert!(amplified_meanvalue(&d2, &AmplifiedInputs { l: 21, ..inp }, &Sequential::default(), &Serial).is_err());
    }

    #[test]
    fn amplified_single_prime_convolution() {
        // only 13 survives in (12, 24], so Q·A has coefficients 2a_m at 13m
        let rule = "k 2\nreal\n=13 1 2 0\n=17 * 0 0\n=19 * 0 0\n=23 * 0 0\n* * 1 0\n";
        let f = MultiplicativeFunction::from_rule_text(rule).unwrap();
        let inp = AmplifiedInputs {
            y1: 12,
            y2: 100,
            x: 10_000,
            l: 1,
            t_max: 10.0,
            eps: 5.0,
            quad_step: 0.01,
        };
        let amp = amplified_meanvalue(&f, &inp, &Sequential::default(), &Serial).unwrap();
        let coeffs: Vec<(u64, Complex64)> = (101..=200u64)
            .map(|m| {
                let a = f.eval(trial_division(m).view()).unwrap() * 2.0;
                (13 * m, a / (13 * m) as f64)
            })
            .collect();
        let direct = meanvalue_check(&coeffs, 10.0, 0.01, &Serial).unwrap();
        assert!((amp.lhs - direct.lhs).abs() <= 1e-12 * direct.lhs);
        assert_eq!(amplifier_length(100.0, 10_000.0).unwrap(), 2);
    }
}
