//! Truncated Perron integral for a short sum.

use alloc::vec::Vec;
use num_complex::Complex64;

use super::grid::{GridEvaluator, Term, UniformGrid};
use crate::accumulate::{Collect, SegmentRunner};
use crate::error::{param_err, Result};
use crate::math::{cis, floor, ln, trapezoid_complex, ComplexSum};
use crate::multfun::MultiplicativeFunction;
use crate::sieve::SieveSegment;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerronCheck {
    pub approx: Complex64,
    pub exact: Complex64,
    pub error: f64,
}

/// `(1/2π) ∫_{-T}^{T} A_f(1+it) ((x+h)^{1+it} - x^{1+it})/(1+it) dt` with
/// `A_f(s) = Σ_{x<m≤2x} f(m) m^{-s}`, against `Σ_{x<m≤x+h} f(m)`.
pub fn perron_window_check<R: SegmentRunner, E: GridEvaluator>(
    f: &MultiplicativeFunction,
    x: f64,
    h: f64,
    t_max: f64,
    quad_step: f64,
    runner: &R,
    ev: &E,
) -> Result<PerronCheck> {
    if !(x >= 1.0 && h > 0.0 && t_max > 0.0) {
        return Err(param_err!("need x >= 1, h > 0 and T > 0"));
    }
    if floor(x) == x || floor(x + h) == x + h {
        return Err(param_err!("x and x + h must not be integers"));
    }
    if h > x {
        return Err(param_err!("the window must stay inside (x, 2x]"));
    }
    let finest = 0.25 / ln(2.0 * x);
    if !(quad_step > 0.0 && quad_step <= finest) {
        return Err(param_err!(
            "quadrature step {quad_step} exceeds 1/(4 log 2x) = {finest}"
        ));
    }
    let lo = floor(x) as u64;
    let hi = floor(2.0 * x) as u64;
    let values = runner
        .run(lo + 1, hi + 1, || {
            Collect::new(|m, seg: &SieveSegment, i| Ok((m, f.eval(seg.view_at(i))?)))
        })?
        .values;
    let exact = values
        .iter()
        .filter(|&&(m, _)| (m as f64) <= x + h)
        .map(|&(_, v)| v)
        .collect::<ComplexSum>()
        .value();
    let terms: Vec<Term> = values
        .iter()
        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
        .map(|&(m, v)| Term::new(m, v, 1.0))
        .collect();

    let g = UniformGrid::covering(-t_max, t_max, quad_step);
    let a = ev.eval(&terms, &g);
    let (lx, lxh) = (ln(x), ln(x + h));
    let integrand: Vec<Complex64> = a
        .iter()
        .enumerate()
        .map(|(j, &av)| {
            let t = g.point(j);
            let s = Complex64::new(1.0, t);
            av * (cis(t * lxh) * (x + h) - cis(t * lx) * x) / s
        })
        .collect();
    let approx = trapezoid_complex(g.dt, &integrand) / (2.0 * core::f64::consts::PI);
    Ok(PerronCheck {
        approx,
        exact,
        error: (approx - exact).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulate::Sequential;
    use crate::dirichlet::Serial;

    #[test]
    fn constant_function_converges() {
        let one = MultiplicativeFunction::from_rule_text("k 1\nreal\n* * 1 0\n").unwrap();
        let seq = Sequential::default();
        let errs: Vec<f64> = [100.0, 1000.0, 10_000.0]
            .iter()
            .map(|&t| {
                let step = 0.25 / ln(201.0);
                perron_window_check(&one, 100.5, 10.0, t, step, &seq, &Serial).unwrap()
            })
            .map(|c| {
                assert_eq!(c.exact, Complex64::new(10.0, 0.0));
                c.error
            })
            .collect();
        assert!(errs[2] * 2.0 <= errs[0], "{errs:?}");
    }

    #[test]
    fn empty_window() {
        let one = MultiplicativeFunction::from_rule_text("k 1\nreal\n* * 1 0\n").unwrap();
        let c = perron_window_check(&one, 100.2, 0.5, 2000.0, 0.04, &Sequential::default(), &Serial).unwrap();
        assert_eq!(c.exact, Complex64::new(0.0, 0.0));
        assert!(c.error < 0.1, "{}", c.error);
        assert!(perron_window_check(&one, 100.0, 0.5, 10.0, 0.04, &Sequential::default(), &Serial).is_err());
        assert!(perron_window_check(&one, 100.5, 0.5, 10.0, 1.0, &Sequential::default(), &Serial).is_err());
    }
}
