//! Points where a prime polynomial `P(s) = Σ_{P<p≤2P} a_p p^{-s}` is large.

use alloc::vec::Vec;
use num_complex::Complex64;

use super::grid::{eval_point, GridEvaluator, Term, UniformGrid};
use super::WellSpacedSet;
use crate::error::{param_err, Result};
use crate::math::{ceil, exp, floor, ln, powf};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LargeValues {
    pub set: WellSpacedSet,
    /// `T^{2 log V/log P} V² exp(2k (log T/log P) log log T)`.
    pub bound: f64,
    /// Unit cells whose maximum reached `1/V`.
    pub candidates: usize,
}

impl LargeValues {
    pub fn ratio(&self) -> f64 {
        self.set.len() as f64 / self.bound
    }
}

/// Well-spaced `t ∈ [-T, T]` with `|P(1+it)| ≥ 1/V`.
///
/// `|P|` is sampled on a grid containing `t = 0` with step at most
/// `1/(4 log 2P)`; each unit cell `[i, i+1)` contributes its largest sample
/// if that reaches `1/V`. Cells are scanned left to right and a candidate
/// closer than 1 to the last kept point replaces it when larger. Kept points
/// are re-evaluated directly before being returned.
pub fn large_value_set<E: GridEvaluator>(
    prime_coeffs: &[(u64, Complex64)],
    p: f64,
    t_max: f64,
    v: f64,
    k: u32,
    ev: &E,
) -> Result<LargeValues> {
    if !(p >= 10.0) || !(v >= 1.0) || !(t_max >= 1.0) {
        return Err(param_err!("need P >= 10, V >= 1 and T >= 1"));
    }
    for &(q, a) in prime_coeffs {
        if (q as f64) <= p || (q as f64) > 2.0 * p {
            return Err(param_err!("coefficient at {q} lies outside (P, 2P]"));
        }
        if a.norm() > k as f64 + 1e-12 {
            return Err(param_err!("|a_{q}| exceeds k = {k}"));
        }
    }
    let terms: Vec<Term> = prime_coeffs.iter().map(|&(q, a)| Term::new(q, a, 1.0)).collect();
    let threshold = 1.0 / v;

    let per_unit = ceil(4.0 * ln(2.0 * p)).max(8.0);
    let dt = 1.0 / per_unit;
    let half = ceil(t_max * per_unit) as usize;
    let grid = UniformGrid {
        t_min: -(half as f64 * dt),
        dt,
        len: 2 * half + 1,
    };
    let values = ev.eval(&terms, &grid);

    // per-cell maxima, left to right
    let mut cells: Vec<(i64, f64, f64)> = Vec::new();
    for (j, z) in values.iter().enumerate() {
        let t = grid.point(j);
        if t.abs() > t_max {
            continue;
        }
        let a = z.norm();
        let cell = floor(t) as i64;
        match cells.last_mut() {
            Some(last) if last.0 == cell => {
                if a > last.2 {
                    *last = (cell, t, a);
                }
            }
            _ => cells.push((cell, t, a)),
        }
    }
    let candidates: Vec<(f64, f64)> = cells
        .into_iter()
        .filter(|c| c.2 >= threshold)
        .map(|c| (c.1, c.2))
        .collect();
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for &(t, a) in &candidates {
        match kept.last_mut() {
            Some(last) if t - last.0 < 1.0 => {
                if a > last.1 {
                    *last = (t, a);
                }
            }
            _ => kept.push((t, a)),
        }
    }
    let points: Vec<f64> = kept
        .into_iter()
        .filter(|&(t, _)| eval_point(&terms, t).norm() >= threshold)
        .map(|(t, _)| t)
        .collect();

    let lt = ln(t_max);
    let lp = ln(p);
    let llt = if t_max > core::f64::consts::E { ln(lt) } else { 0.0 };
    let bound = powf(t_max, 2.0 * ln(v) / lp) * v * v * exp(2.0 * k as f64 * lt / lp * llt);
    Ok(LargeValues {
        set: WellSpacedSet::new(points, t_max)?,
        bound,
        candidates: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::Serial;
    use crate::primes::PrimeTable;

    fn unit_coeffs(p: u64) -> Vec<(u64, Complex64)> {
        PrimeTable::up_to(2 * p)
            .unwrap()
            .primes()
            .iter()
            .filter(|&&q| q as u64 > p)
            .map(|&q| (q as u64, Complex64::new(1.0, 0.0)))
            .collect()
    }

    #[test]
    fn zero_is_selected_when_reachable() {
        let c = unit_coeffs(100);
        let mass: f64 = c.iter().map(|&(q, _)| 1.0 / q as f64).sum();
        let lv = large_value_set(&c, 100.0, 200.0, 1.0 / mass * 1.5, 1, &Serial).unwrap();
        assert!(lv.set.points().contains(&0.0));
        for &t in lv.set.points() {
            let terms: Vec<Term> = c.iter().map(|&(q, a)| Term::new(q, a, 1.0)).collect();
            assert!(eval_point(&terms, t).norm() >= mass / 1.5);
        }
    }

    #[test]
    fn unreachable_threshold_is_empty() {
        let c = unit_coeffs(100);
        let mass: f64 = c.iter().map(|&(q, _)| 1.0 / q as f64).sum();
        assert!(mass < 1.0);
        let lv = large_value_set(&c, 100.0, 50.0, 1.0, 1, &Serial).unwrap();
        assert!(lv.set.is_empty());
        assert!(large_value_set(&c, 5.0, 50.0, 2.0, 1, &Serial).is_err());
    }
}
