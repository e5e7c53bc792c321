//! Evaluation of `Σ c_n e^{-i t log n}` on a uniform grid `t_j = t_min + j·dt`.
//!
//! Each term's phase is advanced by one complex multiplication per grid step
//! and re-seeded from a direct evaluation at every absolute grid index that is
//! a multiple of [`RESEED_INTERVAL`]. A value therefore depends only on its
//! own index, so callers may split the index range into chunks aligned to the
//! interval and evaluate them independently. With at most 1024 rotations the
//! phase error stays near `1024 · 2^-52`, far below `1e-8`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::{cis, ln, ComplexSum};

pub const RESEED_INTERVAL: usize = 1024;

/// Terms are summed in plain floating point within batches of this many
/// terms; batch totals are then added with compensation.
const TERM_BATCH: usize = 256;

const LANES: usize = 8;

/// One term `coef · e^{-i t log_n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub log_n: f64,
    pub coef: Complex64,
}

impl Term {
    /// Term for `a_n n^{-sigma - it}`.
    pub fn new(n: u64, a: Complex64, sigma: f64) -> Self {
        let log_n = ln(n as f64);
        Self {
            log_n,
            coef: a * crate::math::exp(-sigma * log_n),
        }
    }
}

/// Uniform grid description.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniformGrid {
    pub t_min: f64,
    pub dt: f64,
    pub len: usize,
}

impl UniformGrid {
    /// Grid from `lo` to `hi` inclusive with step at most `max_step`.
    pub fn covering(lo: f64, hi: f64, max_step: f64) -> Self {
        if hi <= lo {
            return Self {
                t_min: lo,
                dt: max_step,
                len: 1,
            };
        }
        let intervals = crate::math::ceil((hi - lo) / max_step).max(1.0) as usize;
        Self {
            t_min: lo,
            dt: (hi - lo) / intervals as f64,
            len: intervals + 1,
        }
    }

    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.dt
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.point(j)).collect()
    }
}

/// Values at grid indices `[j_lo, j_hi)`. `j_lo` must be a multiple of
/// [`RESEED_INTERVAL`] (or equal to `j_hi`).
pub fn eval_range(terms: &[Term], grid: &UniformGrid, j_lo: usize, j_hi: usize) -> Vec<Complex64> {
    assert!(
        j_lo == j_hi || j_lo % RESEED_INTERVAL == 0,
        "grid chunks must start at a multiple of {RESEED_INTERVAL}"
    );
    let mut out = Vec::with_capacity(j_hi.saturating_sub(j_lo));
    let mut block_start = j_lo;
    let mut batch = vec![Complex64::new(0.0, 0.0); RESEED_INTERVAL];
    let mut totals = vec![ComplexSum::new(); RESEED_INTERVAL];
    while block_start < j_hi {
        let len = (j_hi - block_start).min(RESEED_INTERVAL);
        let t_start = grid.point(block_start);
        totals[..len].fill(ComplexSum::new());
        for chunk in terms.chunks(TERM_BATCH) {
            batch[..len].fill(Complex64::new(0.0, 0.0));
            // independent rotation chains hide the multiply latency
            for lanes in chunk.chunks(LANES) {
                let mut zr = [0.0; LANES];
                let mut zi = [0.0; LANES];
                let mut rr = [1.0; LANES];
                let mut ri = [0.0; LANES];
                for (l, term) in lanes.iter().enumerate() {
                    let z = term.coef * cis(-t_start * term.log_n);
                    let r = cis(-grid.dt * term.log_n);
                    (zr[l], zi[l], rr[l], ri[l]) = (z.re, z.im, r.re, r.im);
                }
                for b in batch[..len].iter_mut() {
                    let mut sr = 0.0;
                    let mut si = 0.0;
                    for l in 0..LANES {
                        sr += zr[l];
                        si += zi[l];
                        let nr = zr[l] * rr[l] - zi[l] * ri[l];
                        zi[l] = zr[l] * ri[l] + zi[l] * rr[l];
                        zr[l] = nr;
                    }
                    b.re += sr;
                    b.im += si;
                }
            }
            for (t, b) in totals[..len].iter_mut().zip(&batch[..len]) {
                t.add(*b);
            }
        }
        out.extend(totals[..len].iter().map(ComplexSum::value));
        block_start += len;
    }
    out
}

/// Values on the whole grid.
pub fn eval(terms: &[Term], grid: &UniformGrid) -> Vec<Complex64> {
    eval_range(terms, grid, 0, grid.len)
}

/// Evaluates terms on a grid. Implementations may split the grid into
/// chunks starting at multiples of [`RESEED_INTERVAL`]; the values are then
/// identical to [`eval`].
pub trait GridEvaluator: Sync {
    fn eval(&self, terms: &[Term], grid: &UniformGrid) -> Vec<Complex64>;
}

/// Evaluates on the calling thread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Serial;

impl GridEvaluator for Serial {
    fn eval(&self, terms: &[Term], grid: &UniformGrid) -> Vec<Complex64> {
        eval(terms, grid)
    }
}

/// Direct evaluation at a single `t`, compensated.
pub fn eval_point(terms: &[Term], t: f64) -> Complex64 {
    terms
        .iter()
        .map(|term| term.coef * cis(-t * term.log_n))
        .collect::<ComplexSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn matches_direct_evaluation() {
        let mut s = 7u64;
        let terms: Vec<Term> = (1..=1000u64)
            .map(|n| {
                let sign = if lcg(&mut s) < 0.5 { -1.0 } else { 1.0 };
                Term::new(n, Complex64::new(sign, 0.0), 1.0)
            })
            .collect();
        let grid = UniformGrid {
            t_min: -37.0,
            dt: 0.0173,
            len: 5000,
        };
        let vals = eval(&terms, &grid);
        for j in (0..grid.len).step_by(97) {
            let direct = eval_point(&terms, grid.point(j));
            assert!((vals[j] - direct).norm() <= 1e-9 * direct.norm().max(1e-3));
        }
    }

    #[test]
    fn chunked_is_bit_identical() {
        let terms: Vec<Term> = (2..300u64)
            .map(|n| Term::new(n, Complex64::new(1.0, 0.5), 1.0))
            .collect();
        let grid = UniformGrid {
            t_min: 0.0,
            dt: 0.01,
            len: 3000,
        };
        let whole = eval(&terms, &grid);
        let mut parts = eval_range(&terms, &grid, 0, 2048);
        parts.extend(eval_range(&terms, &grid, 2048, 3000));
        assert_eq!(whole, parts);
    }

    #[test]
    fn covering_grid() {
        let g = UniformGrid::covering(-1.0, 1.0, 0.3);
        assert_eq!(g.len, 8);
        assert!((g.point(g.len - 1) - 1.0).abs() < 1e-15);
        assert!(g.dt <= 0.3);
    }
}
