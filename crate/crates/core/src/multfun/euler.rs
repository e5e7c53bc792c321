//! Moduli of Euler products `F(s; X) = ∏_{p ≤ X} Σ_a f(p^a) p^{-as}` and of
//! the full series `F(s)` for `Re s > 1`.
//!
//! `F(s)` is taken as the product over primes up to the table limit `L`
//! times `exp(c·E1((s - 1 - iτ) log L))`, the contribution of primes above
//! `L` when `f(p) = c·p^{iτ}` for large `p`. The error of that correction is
//! estimated by comparing it with the actual primes in `(L/2, L]`.

use alloc::format;

use super::MultiplicativeFunction;
use crate::error::{param_err, Error, Result};
use crate::math::{cis, exp, exp_integral_e1, ln, powf, KahanSum};
use crate::primes::PrimeTable;
use num_complex::Complex64;

/// Largest estimated error in `log|F(s)|` before results are refused.
pub const TAIL_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EulerDiagnostics {
    /// `|F(1+it; X)| / |F(1 + 1/log X + it)|`.
    pub ratio_34: f64,
    /// `|F(1 + 1/log X + γ + it)| (γ log X)^α / (P_f(X) log X)`.
    pub ratio_35: f64,
    pub truncated_abs: f64,
    pub full_abs: f64,
    pub shifted_abs: f64,
    pub mertens: f64,
    /// `γ > 1/log X`, the range where the shifted bound is claimed.
    pub gamma_admissible: bool,
    /// Largest primes used before the tail correction.
    pub prime_cutoff: u64,
    /// Estimated error of `log|F|` from the tail correction.
    pub tail_error: f64,
}

/// `log|Σ_a f(p^a) p^{-as}|`.
fn log_abs_local_factor(f: &MultiplicativeFunction, p: u64, sigma: f64, t: f64) -> f64 {
    let lp = ln(p as f64);
    let z = cis(-t * lp) * exp(-sigma * lp);
    let zabs = exp(-sigma * lp);
    let k = f.bound_k.max(1);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut zpow = Complex64::new(1.0, 0.0);
    let mut zabs_pow = 1.0;
    for a in 1..=400u32 {
        zpow *= z;
        zabs_pow *= zabs;
        sum += f.prime_power(p, a) * zpow;
        // |f(p^a)| ≤ d_k(p^a) bounds the remaining terms
        let bound = super::dk_f64(a, k) * zabs_pow;
        if bound < 1e-18 * sum.norm() {
            break;
        }
    }
    ln(sum.norm())
}

fn log_abs_partial(f: &MultiplicativeFunction, primes: &[u32], sigma: f64, t: f64) -> f64 {
    primes
        .iter()
        .map(|&p| log_abs_local_factor(f, p as u64, sigma, t))
        .collect::<KahanSum>()
        .value()
}

/// `log|F(σ + it)|` with the tail above the table limit, and the error
/// estimate of that tail.
fn log_abs_full(f: &MultiplicativeFunction, table: &PrimeTable, sigma: f64, t: f64) -> (f64, f64) {
    let primes = table.primes();
    let l = table.limit() as f64;
    let c = f.eventual_prime_value();
    let w = Complex64::new(sigma - 1.0, t - f.twist);
    let tail = |lo: f64| c * exp_integral_e1(w * ln(lo));
    let head = log_abs_partial(f, primes, sigma, t);

    // compare the correction with the primes in (L/2, L]
    let half = l / 2.0;
    let block: Complex64 = primes[primes.partition_point(|&p| (p as f64) <= half)..]
        .iter()
        .map(|&p| {
            let lp = ln(p as f64);
            f.prime_power(p as u64, 1) * cis(-t * lp) * exp(-sigma * lp)
        })
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    let predicted = tail(half) - tail(l);
    let k = f.bound_k as f64;
    let squares = k * (k + 1.0) / 2.0 / (l * ln(l));
    let err = 2.0 * (block - predicted).norm() + squares;
    (head + tail(l).re, err)
}

/// Euler-product diagnostics at `t` for shift `γ` and non-vanishing
/// exponent `α`. The prime table must reach at least `X`; its limit is the
/// cutoff for the full product.
pub fn euler_product_diagnostics(
    f: &MultiplicativeFunction,
    table: &PrimeTable,
    t: f64,
    gamma: f64,
    alpha: f64,
    x: f64,
) -> Result<EulerDiagnostics> {
    let log_x = ln(x);
    if !(gamma > 0.0) {
        return Err(param_err!("γ must be positive, got {gamma}"));
    }
    if (table.limit() as f64) < x || table.limit() < 16 {
        return Err(param_err!("prime table must reach X = {x}"));
    }
    let sigma = 1.0 + 1.0 / log_x;
    let truncated = log_abs_partial(f, table.up_to_slice(x)?, 1.0, t);
    let (full, e1) = log_abs_full(f, table, sigma, t);
    let (shifted, e2) = log_abs_full(f, table, sigma + gamma, t);
    let tail_error = e1.max(e2);
    if tail_error > TAIL_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "tail correction above p = {} is uncertain by {tail_error:.3e} in log|F|",
            table.limit()
        )));
    }
    let mertens = super::mertens_product(f, table, x)?;
    Ok(EulerDiagnostics {
        ratio_34: exp(truncated - full),
        ratio_35: exp(shifted) * powf(gamma * log_x, alpha) / (mertens * log_x),
        truncated_abs: exp(truncated),
        full_abs: exp(full),
        shifted_abs: exp(shifted),
        mertens,
        gamma_admissible: gamma > 1.0 / log_x,
        prime_cutoff: table.limit(),
        tail_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::EULER_GAMMA;

    #[test]
    fn zeta_like_case() {
        let table = PrimeTable::up_to(1_000_000).unwrap();
        let one = MultiplicativeFunction::from_rule_text("k 1\nreal\n* * 1 0\n").unwrap();
        let d = euler_product_diagnostics(&one, &table, 0.0, 0.1, 1.0, 1e4).unwrap();
        // F(1; X) = ∏ (1 - 1/p)^{-1} ≈ e^γ log X; F(1 + 1/log X) = ζ(1 + 1/log X)
        let log_x = ln(1e4);
        assert!((d.truncated_abs / (exp(EULER_GAMMA) * log_x) - 1.0).abs() < 0.02);
        assert!(
            (d.full_abs / (log_x + EULER_GAMMA) - 1.0).abs() < 0.01,
            "{}",
            d.full_abs
        );
        assert!(d.ratio_34 > 0.1 && d.ratio_34 < 10.0);
    }

    #[test]
    fn d2_case() {
        let table = PrimeTable::up_to(1_000_000).unwrap();
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let d = euler_product_diagnostics(&d2, &table, 0.0, 0.1, 1.0, 1e4).unwrap();
        // F(s) = ζ(s)², so |F(1 + 1/log X)| ≈ (log X + γ)²
        let log_x = ln(1e4);
        assert!((d.full_abs / (log_x + EULER_GAMMA).powi(2) - 1.0).abs() < 0.02);
        assert!(d.ratio_34 > 0.1 && d.ratio_34 < 10.0);
        assert!(d.ratio_35 <= 10.0);
    }

    #[test]
    fn large_shift_tends_to_one() {
        let table = PrimeTable::up_to(100_000).unwrap();
        let d2 = MultiplicativeFunction::dk(2).unwrap();
        let d = euler_product_diagnostics(&d2, &table, 0.0, 60.0, 1.0, 1e4).unwrap();
        assert!((d.shifted_abs - 1.0).abs() < 1e-15);
        let d = euler_product_diagnostics(&d2, &table, 0.0, 0.05, 1.0, 1e4).unwrap();
        assert!(!d.gamma_admissible);
        assert!(euler_product_diagnostics(&d2, &table, 0.0, 0.0, 1.0, 1e4).is_err());
    }
}
