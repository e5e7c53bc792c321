//! Thread-pool drivers for the core's segment and grid traits.
//!
//! Segments are processed in waves of a fixed size that does not depend on
//! the thread count. Inside a wave each segment gets its own accumulator;
//! the wave's results are merged left to right into the running total
//! before the next wave starts. Grid evaluation splits the index range at
//! multiples of the kernel's re-seed interval, so every value is computed by
//! the same instruction sequence whatever the split.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use shortint_core::accumulate::{prime_table_for, RangeAccumulator, SegmentRunner};
use shortint_core::dirichlet::grid::{eval_range, GridEvaluator, Term, UniformGrid, RESEED_INTERVAL};
use shortint_core::sieve::{segment_bounds, DEFAULT_SEGMENT_SIZE};
use shortint_core::{Complex64, PrimeTable, Result, SieveSegment};

use crate::cache::SegmentCache;

/// Segments per merge wave. Bounds the number of live accumulators.
pub const WAVE: usize = 16;

/// Grid chunk length, in units of the re-seed interval.
const GRID_CHUNK_BLOCKS: usize = 4;

#[derive(Debug, Default)]
pub struct CacheStats {
    pub hits: AtomicU64,
    pub misses: AtomicU64,
    pub rebuilt: AtomicU64,
}

impl CacheStats {
    pub fn snapshot(&self) -> (u64, u64, u64) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
            self.rebuilt.load(Ordering::Relaxed),
        )
    }
}

/// Runs segments and grid chunks on a dedicated rayon pool.
#[derive(Clone)]
pub struct Parallel {
    pool: Arc<rayon::ThreadPool>,
    pub segment_size: u64,
    cache: Option<Arc<SegmentCache>>,
    pub stats: Arc<CacheStats>,
}

impl Parallel {
    pub fn new(threads: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
        Ok(Self {
            pool: Arc::new(pool),
            segment_size: DEFAULT_SEGMENT_SIZE,
            cache: None,
            stats: Arc::default(),
        })
    }

    pub fn with_segment_size(mut self, size: u64) -> Self {
        self.segment_size = size;
        self
    }

    pub fn with_cache(mut self, cache: SegmentCache) -> Self {
        self.cache = Some(Arc::new(cache));
        self
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    fn segment(&self, lo: u64, hi: u64, primes: &PrimeTable) -> Result<SieveSegment> {
        let Some(cache) = &self.cache else {
            return SieveSegment::build(lo, hi, primes, self.segment_size);
        };
        match cache.load(lo, hi) {
            Ok(Some(seg)) => {
                self.stats.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(seg);
            }
            Ok(None) => {
                self.stats.misses.fetch_add(1, Ordering::Relaxed);
            }
            Err(_) => {
                self.stats.rebuilt.fetch_add(1, Ordering::Relaxed);
            }
        }
        let seg = SieveSegment::build(lo, hi, primes, self.segment_size)?;
        // a cache that cannot be written only costs a rebuild next time
        let _ = cache.store(&seg);
        Ok(seg)
    }
}

impl SegmentRunner for Parallel {
    fn run<A, F>(&self, lo: u64, hi: u64, make: F) -> Result<A>
    where
        A: RangeAccumulator + Send,
        F: Fn() -> A + Sync,
    {
        let primes = prime_table_for(hi)?;
        let bounds: Vec<(u64, u64)> = segment_bounds(lo, hi, self.segment_size).collect();
        let mut total = make();
        for wave in bounds.chunks(WAVE) {
            let parts: Vec<Result<A>> = self.pool.install(|| {
                wave.par_iter()
                    .map(|&(a, b)| {
                        let seg = self.segment(a, b, &primes)?;
                        let mut part = make();
                        part.absorb(&seg)?;
                        Ok(part)
                    })
                    .collect()
            });
            for part in parts {
                total.merge(part?);
            }
        }
        Ok(total)
    }
}

impl GridEvaluator for Parallel {
    fn eval(&self, terms: &[Term], grid: &UniformGrid) -> Vec<Complex64> {
        let chunk = RESEED_INTERVAL * GRID_CHUNK_BLOCKS;
        let starts: Vec<usize> = (0..grid.len).step_by(chunk).collect();
        let parts: Vec<Vec<Complex64>> = self.pool.install(|| {
            starts
                .par_iter()
                .map(|&j| eval_range(terms, grid, j, (j + chunk).min(grid.len)))
                .collect()
        });
        parts.concat()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shortint_core::accumulate::{IntSum, Sequential};
    use shortint_core::dirichlet::grid::eval;
    use shortint_core::sieve::dk_value;

    #[test]
    fn matches_sequential_sums() {
        let make = || IntSum::new(|seg: &SieveSegment, i| Ok(dk_value(seg.view_at(i), 3)? as u128));
        let seq = Sequential { segment_size: 1000 }.run(1, 123_457, make).unwrap();
        for threads in [1, 3] {
            let par = Parallel::new(threads).unwrap().with_segment_size(1000);
            assert_eq!(par.run(1, 123_457, make).unwrap().total, seq.total);
        }
    }

    #[test]
    fn grid_matches_serial_bitwise() {
        let terms: Vec<Term> = (2..500u64)
            .map(|n| Term::new(n, Complex64::new(1.0, -0.5), 1.0))
            .collect();
        let grid = UniformGrid {
            t_min: -40.0,
            dt: 0.007,
            len: 11_111,
        };
        let par = Parallel::new(4).unwrap();
        assert_eq!(GridEvaluator::eval(&par, &terms, &grid), eval(&terms, &grid));
    }
}
