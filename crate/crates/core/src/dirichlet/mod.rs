//! Dirichlet polynomials `A(s) = Σ a_n n^{-s}` on grids of `s = 1 + it`, and
//! numerical checks of the mean-value, large-value and decomposition
//! estimates built from them.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{param_err, Error, Result};
use crate::math::{ln, KahanSum};
use crate::multfun::h_threshold;

pub mod grid;
mod large;
mod meanvalue;
mod perron;
mod ramare;

pub use grid::{GridEvaluator, Serial, Term, UniformGrid};
pub use large::{large_value_set, LargeValues};
pub use meanvalue::{
    amplified_meanvalue, amplifier_length, discrete_meanvalue_check, henriot_correlation, meanvalue_check,
    AmplifiedInputs, HenriotInputs,
};
pub use perron::{perron_window_check, PerronCheck};
pub use ramare::{
    ramare_decompose, rough_restricted_sum, RamareDecomposition, RamareParams, RamareRow, RoughParams, RoughRestricted,
};

/// A computed left side, the bound it is compared with, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self { lhs, rhs, ratio }
    }

    pub fn within(&self, envelope: f64) -> bool {
        self.ratio <= envelope
    }
}

/// `A(1 + it_j)` for `a_n` supported on `[n_lo, n_hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirichletGrid {
    pub n_lo: u64,
    pub n_hi: u64,
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
    /// `Σ |a_n| / n`, the bound on every value.
    pub abs_mass: f64,
}

impl DirichletGrid {
    pub fn t(&self, j: usize) -> f64 {
        self.grid.point(j)
    }
}

/// Terms `a_n n^{-σ}` for `a_n = coeffs[n - n_lo]`, skipping zeros.
pub fn terms_from_dense(coeffs: &[Complex64], n_lo: u64, sigma: f64) -> Result<Vec<Term>> {
    if n_lo == 0 {
        return Err(param_err!("coefficients start at n = 1"));
    }
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
        .map(|(i, &a)| {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(param_err!("coefficient at n = {} is not finite", n_lo + i as u64));
            }
            Ok(Term::new(n_lo + i as u64, a, sigma))
        })
        .collect()
}

/// `Σ a_n n^{-1-it_j}` on a uniform grid.
pub fn dpoly_eval<E: GridEvaluator>(
    coeffs: &[Complex64],
    n_lo: u64,
    grid: &UniformGrid,
    ev: &E,
) -> Result<DirichletGrid> {
    let terms = terms_from_dense(coeffs, n_lo, 1.0)?;
    let abs_mass = terms.iter().map(|t| t.coef.norm()).collect::<KahanSum>().value();
    Ok(DirichletGrid {
        n_lo,
        n_hi: n_lo + coeffs.len().saturating_sub(1) as u64,
        grid: *grid,
        values: ev.eval(&terms, grid),
        abs_mass,
    })
}

/// Reals in `[-T, T]`, sorted, with consecutive gaps at least 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WellSpacedSet {
    points: Vec<f64>,
    t_max: f64,
}

impl WellSpacedSet {
    pub fn new(points: Vec<f64>, t_max: f64) -> Result<Self> {
        for (i, &p) in points.iter().enumerate() {
            if !(p.abs() <= t_max) {
                return Err(Error::Invariant(format!("point {p} lies outside [-{t_max}, {t_max}]")));
            }
            if i > 0 && !(p - points[i - 1] >= 1.0) {
                return Err(Error::Invariant(format!(
                    "points {} and {p} are closer than 1",
                    points[i - 1]
                )));
            }
        }
        Ok(Self { points, t_max })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `𝔖(T, X, f, ε) = (T·H(f,X,ε)/X + 1)·P_f(X)²`.
pub fn frak_s(t: f64, x: f64, k: u32, pf_x: f64, eps: f64) -> Result<f64> {
    let h = h_threshold(k, pf_x, x, eps)?;
    Ok((t * h / x + 1.0) * pf_x * pf_x)
}

/// `max(log y, 1)`, used where a logarithm stands for a size that is at
/// least of order one.
pub(crate) fn log_at_least_one(y: f64) -> f64 {
    if y > core::f64::consts::E {
        ln(y)
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::cis;

    #[test]
    fn single_coefficient_has_constant_modulus() {
        let mut coeffs = alloc::vec![Complex64::new(0.0, 0.0); 10];
        coeffs[6] = Complex64::new(1.0, 0.0);
        let g = UniformGrid::covering(-50.0, 50.0, 0.1);
        let d = dpoly_eval(&coeffs, 1, &g, &Serial).unwrap();
        for (j, v) in d.values.iter().enumerate() {
            assert!((v.norm() - 1.0 / 7.0).abs() < 1e-14);
            let want = cis(-d.t(j) * ln(7.0)) / 7.0;
            assert!((v - want).norm() < 1e-13);
        }
    }

    #[test]
    fn two_coefficients_closed_form() {
        let coeffs = [Complex64::new(1.0, 0.0); 2];
        let g = UniformGrid::covering(-20.0, 20.0, 0.05);
        let d = dpoly_eval(&coeffs, 1, &g, &Serial).unwrap();
        for (j, v) in d.values.iter().enumerate() {
            let want = 1.25 + crate::math::cos(d.t(j) * ln(2.0));
            assert!((v.norm_sqr() - want).abs() < 1e-12);
            assert!(v.norm() <= d.abs_mass * (1.0 + 1e-14));
        }
        assert!((d.values[g.len / 2].re - 1.5).abs() < 1e-12);
    }

    #[test]
    fn well_spaced_validation() {
        assert!(WellSpacedSet::new(alloc::vec![-3.0, -2.0, 0.5], 5.0).is_ok());
        assert!(WellSpacedSet::new(alloc::vec![0.0, 0.5], 5.0).is_err());
        assert!(WellSpacedSet::new(alloc::vec![6.0], 5.0).is_err());
        assert!(WellSpacedSet::new(alloc::vec![], 5.0).unwrap().is_empty());
    }

    #[test]
    fn frak_s_limits() {
        let pf = 5.0;
        assert_eq!(frak_s(0.0, 1e8, 2, pf, 0.1).unwrap(), pf * pf);
        let h = h_threshold(2, pf, 1e8, 0.1).unwrap();
        let v = frak_s(1e8 / h, 1e8, 2, pf, 0.1).unwrap();
        assert!((v / (2.0 * pf * pf) - 1.0).abs() < 1e-14);
    }
}
