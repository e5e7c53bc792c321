//! Reductions over integer ranges, one sieve segment at a time.
//!
//! A range `[lo, hi)` is always cut at `lo + i * segment_size`, each segment
//! is folded into a fresh accumulator, and the per-segment results are merged
//! left to right. Parallel drivers must keep that split and merge order; the
//! result is then independent of how segments were scheduled.

use alloc::vec::Vec;

use crate::error::Result;
use crate::math::isqrt;
use crate::primes::PrimeTable;
use crate::sieve::{segment_bounds, SieveSegment};

pub trait RangeAccumulator {
    /// Folds every integer of `seg` into `self`.
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()>;

    /// Appends the state of an accumulator covering the following range.
    fn merge(&mut self, later: Self)
    where
        Self: Sized;
}

/// Two reductions fed from one pass over the sieve.
impl<A: RangeAccumulator, B: RangeAccumulator> RangeAccumulator for (A, B) {
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        self.0.absorb(seg)?;
        self.1.absorb(seg)
    }

    fn merge(&mut self, later: Self) {
        self.0.merge(later.0);
        self.1.merge(later.1);
    }
}

/// Prime table sufficient to sieve every segment of `[lo, hi)`.
pub fn prime_table_for(hi: u64) -> Result<PrimeTable> {
    PrimeTable::up_to(isqrt(hi.saturating_sub(1)).max(2))
}

/// Runs `make()`-created accumulators over `[lo, hi)` on the current thread.
pub fn run_sequential<A, F>(lo: u64, hi: u64, segment_size: u64, primes: &PrimeTable, make: F) -> Result<A>
where
    A: RangeAccumulator,
    F: Fn() -> A,
{
    let mut total = make();
    for (a, b) in segment_bounds(lo, hi, segment_size) {
        let seg = SieveSegment::build(a, b, primes, segment_size)?;
        let mut part = make();
        part.absorb(&seg)?;
        total.merge(part);
    }
    Ok(total)
}

/// Something that can fold accumulators over a range with the fixed split
/// and merge order described above.
pub trait SegmentRunner {
    fn run<A, F>(&self, lo: u64, hi: u64, make: F) -> Result<A>
    where
        A: RangeAccumulator + Send,
        F: Fn() -> A + Sync;
}

/// Runs every segment on the calling thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sequential {
    pub segment_size: u64,
}

impl Default for Sequential {
    fn default() -> Self {
        Self {
            segment_size: crate::sieve::DEFAULT_SEGMENT_SIZE,
        }
    }
}

impl SegmentRunner for Sequential {
    fn run<A, F>(&self, lo: u64, hi: u64, make: F) -> Result<A>
    where
        A: RangeAccumulator + Send,
        F: Fn() -> A + Sync,
    {
        let primes = prime_table_for(hi)?;
        run_sequential(lo, hi, self.segment_size, &primes, make)
    }
}

/// Collects one value per integer, in order.
#[derive(Debug, Clone, Default)]
pub struct Collect<T, F> {
    pub values: Vec<T>,
    map: F,
}

impl<T, F> Collect<T, F>
where
    F: Fn(u64, &SieveSegment, usize) -> Result<T>,
{
    pub fn new(map: F) -> Self {
        Self {
            values: Vec::new(),
            map,
        }
    }
}

impl<T, F> RangeAccumulator for Collect<T, F>
where
    F: Fn(u64, &SieveSegment, usize) -> Result<T>,
{
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        self.values.reserve(seg.len());
        for i in 0..seg.len() {
            self.values.push((self.map)(seg.lo() + i as u64, seg, i)?);
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.values.extend(later.values);
    }
}

/// Exact sum of an integer-valued function of each integer.
#[derive(Debug, Clone)]
pub struct IntSum<F> {
    pub total: u128,
    map: F,
}

impl<F> IntSum<F>
where
    F: Fn(&SieveSegment, usize) -> Result<u128>,
{
    pub fn new(map: F) -> Self {
        Self { total: 0, map }
    }
}

impl<F> RangeAccumulator for IntSum<F>
where
    F: Fn(&SieveSegment, usize) -> Result<u128>,
{
    fn absorb(&mut self, seg: &SieveSegment) -> Result<()> {
        for i in 0..seg.len() {
            self.total += (self.map)(seg, i)?;
        }
        Ok(())
    }

    fn merge(&mut self, later: Self) {
        self.total += later.total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{divisor_sum_hyperbola, dk_value};

    #[test]
    fn divisor_sum_independent_of_segment_size() {
        let x = 50_000u64;
        let primes = prime_table_for(x + 1).unwrap();
        let want = divisor_sum_hyperbola(x);
        for size in [1_000u64, 4_096, 1 << 22] {
            let acc = run_sequential(1, x + 1, size, &primes, || {
                IntSum::new(|seg: &SieveSegment, i| Ok(dk_value(seg.view_at(i), 2)? as u128))
            })
            .unwrap();
            assert_eq!(acc.total, want);
        }
    }

    #[test]
    fn collect_preserves_order() {
        let primes = prime_table_for(1000).unwrap();
        let acc = run_sequential(900, 1000, 7, &primes, || Collect::new(|n, _: &SieveSegment, _| Ok(n))).unwrap();
        assert_eq!(acc.values, (900..1000).collect::<Vec<_>>());
    }
}
