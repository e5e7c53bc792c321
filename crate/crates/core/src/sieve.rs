//! Segmented factorization sieve and the exact combinatorial oracles built on
//! top of it.
//!
//! A [`SieveSegment`] covers a half-open range `[lo, hi)` and stores the full
//! prime factorization of every integer in it as a flat arena (one offset per
//! integer into parallel prime/exponent arrays), together with cached
//! `Ω(n)`, `ω(n)` and squarefree flags. Everything here is integer arithmetic.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{binomial, isqrt};
use crate::primes::PrimeTable;

/// Default number of integers per segment.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

/// Exact factorization of one integer as increasing primes with exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct FactorVector {
    primes: Vec<u64>,
    exps: Vec<u8>,
}

/// Borrowed factorization, as stored inside a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorView<'a> {
    primes: &'a [u64],
    exps: &'a [u8],
}

impl FactorVector {
    /// Builds a factorization from `(prime, exponent)` pairs, checking that the
    /// primes increase strictly and every exponent is positive.
    pub fn new(entries: &[(u64, u8)]) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Invariant(format!(
                    "factor primes not strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(p, _)) = entries.iter().find(|&&(p, a)| a == 0 || p < 2) {
            return Err(Error::Invariant(format!("bad factor entry with prime {p}")));
        }
        Ok(Self {
            primes: entries.iter().map(|e| e.0).collect(),
            exps: entries.iter().map(|e| e.1).collect(),
        })
    }

    /// The empty factorization of 1.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn view(&self) -> FactorView<'_> {
        FactorView {
            primes: &self.primes,
            exps: &self.exps,
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, u8)> + '_ {
        self.view().iter()
    }

    pub fn value(&self) -> Option<u64> {
        self.view().value()
    }
}

impl<'a> FactorView<'a> {
    pub fn iter(&self) -> impl Iterator<Item = (u64, u8)> + 'a {
        self.primes.iter().copied().zip(self.exps.iter().copied())
    }

    pub fn primes(&self) -> &'a [u64] {
        self.primes
    }

    pub fn exponents(&self) -> &'a [u8] {
        self.exps
    }

    pub fn to_vector(&self) -> FactorVector {
        FactorVector {
            primes: self.primes.to_vec(),
            exps: self.exps.to_vec(),
        }
    }

    /// The represented integer, or `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        self.iter()
            .try_fold(1u64, |acc, (p, a)| acc.checked_mul(p.checked_pow(a as u32)?))
    }

    pub fn is_one(&self) -> bool {
        self.primes.is_empty()
    }
}

impl<'a> From<&'a FactorVector> for FactorView<'a> {
    fn from(fv: &'a FactorVector) -> Self {
        fv.view()
    }
}

/// Total number of prime factors counted with multiplicity.
pub fn big_omega(fv: FactorView<'_>) -> u32 {
    fv.exps.iter().map(|&a| a as u32).sum()
}

/// Number of distinct prime factors.
pub fn small_omega(fv: FactorView<'_>) -> u32 {
    fv.primes.len() as u32
}

/// Local factor `d_k(p^a) = C(a+k-1, k-1)`.
pub fn dk_prime_power(a: u32, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Parameter(format!("d_k needs k >= 1, got {k}")));
    }
    binomial(a as u64 + k as u64 - 1, k as u64 - 1).ok_or(Error::Overflow("binomial in d_k"))
}

/// Number of ordered factorizations into `k` factors.
pub fn dk_value(fv: FactorView<'_>, k: u32) -> Result<u64> {
    fv.iter().try_fold(1u64, |acc, (_, a)| {
        acc.checked_mul(dk_prime_power(a as u32, k)?)
            .ok_or(Error::Overflow("d_k product"))
    })
}

/// Factorization by trial division; used to audit sieve output.
pub fn trial_division(mut n: u64) -> FactorVector {
    let mut primes = Vec::new();
    let mut exps = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut a = 0u8;
            while n % d == 0 {
                n /= d;
                a += 1;
            }
            primes.push(d);
            exps.push(a);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        primes.push(n);
        exps.push(1);
    }
    FactorVector { primes, exps }
}

/// `Σ_{n ≤ x} d(n)` by the hyperbola method: `2 Σ_{m ≤ √x} ⌊x/m⌋ - ⌊√x⌋²`.
pub fn divisor_sum_hyperbola(x: u64) -> u128 {
    let r = isqrt(x);
    let s: u128 = (1..=r).map(|m| (x / m) as u128).sum();
    2 * s - (r as u128) * (r as u128)
}

/// `Σ_{d ≤ x} μ²(d) ⌊x/d⌋`, which equals `Σ_{n ≤ x} 2^{ω(n)}` because
/// `2^{ω(n)} = Σ_{d | n} μ²(d)`. Squarefreeness comes from its own small
/// sieve, independent of [`SieveSegment`].
pub fn squarefree_harmonic_oracle(x: u64) -> u128 {
    let len = x as usize + 1;
    let mut squarefree = vec![true; len];
    let mut p = 2usize;
    while p * p < len {
        let q = p * p;
        let mut m = q;
        while m < len {
            squarefree[m] = false;
            m += q;
        }
        p += 1;
    }
    (1..len)
        .filter(|&d| squarefree[d])
        .map(|d| (x / d as u64) as u128)
        .sum()
}

/// Exact factorization data for every integer in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSegment {
    lo: u64,
    hi: u64,
    /// `offsets[i]..offsets[i+1]` indexes the factor entries of `lo + i`.
    offsets: Vec<u32>,
    primes: Vec<u64>,
    exps: Vec<u8>,
    big_omega: Vec<u8>,
    small_omega: Vec<u8>,
    mu_squared: Vec<u64>,
}

impl SieveSegment {
    /// Sieves `[lo, hi)`. The prime table must reach `⌊√(hi-1)⌋`; `capacity`
    /// bounds `hi - lo`. A range starting at 1 is accepted and stores 1 as the
    /// empty factorization.
    pub fn build(lo: u64, hi: u64, primes: &PrimeTable, capacity: u64) -> Result<Self> {
        if lo < 1 || lo >= hi {
            return Err(Error::Precondition(format!(
                "segment needs 1 <= lo < hi, got [{lo}, {hi})"
            )));
        }
        let len = hi - lo;
        if len > capacity || len > u32::MAX as u64 / 16 {
            return Err(Error::Capacity { len, capacity });
        }
        let root = isqrt(hi - 1);
        if primes.limit() < root {
            return Err(Error::Precondition(format!(
                "prime table complete to {} but the segment needs primes up to {root}",
                primes.limit()
            )));
        }
        let len = len as usize;
        let sieving = &primes.primes()[..primes.pi(root)];

        // pass 1: count distinct small primes, accumulate the small-prime part
        let mut count = vec![0u8; len];
        let mut smooth = vec![1u64; len];
        for &p in sieving {
            let p = p as u64;
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                count[i] += 1;
                smooth[i] *= p;
                m += p;
            }
            let mut pk = p * p;
            while pk < hi {
                let mut m = lo.div_ceil(pk) * pk;
                while m < hi {
                    smooth[(m - lo) as usize] *= p;
                    m += pk;
                }
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }

        // what is left after removing primes <= √(hi-1) is 1 or a single prime
        let mut offsets = Vec::with_capacity(len + 1);
        let mut total = 0u32;
        offsets.push(0);
        for i in 0..len {
            let n = lo + i as u64;
            if n / smooth[i] > 1 {
                count[i] += 1;
            }
            total += count[i] as u32;
            offsets.push(total);
        }

        // pass 2: write entries in increasing prime order
        let mut entry_primes = vec![0u64; total as usize];
        let mut entry_exps = vec![0u8; total as usize];
        let mut cursor: Vec<u32> = offsets[..len].to_vec();
        for &p in sieving {
            let p = p as u64;
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                let c = cursor[i] as usize;
                entry_primes[c] = p;
                entry_exps[c] = 1;
                cursor[i] += 1;
                m += p;
            }
            let mut pk = p * p;
            while pk < hi {
                let mut m = lo.div_ceil(pk) * pk;
                while m < hi {
                    // the newest entry of m is p
                    let i = (m - lo) as usize;
                    entry_exps[cursor[i] as usize - 1] += 1;
                    m += pk;
                }
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
        for i in 0..len {
            let n = lo + i as u64;
            let rest = n / smooth[i];
            if rest > 1 {
                let c = cursor[i] as usize;
                entry_primes[c] = rest;
                entry_exps[c] = 1;
            }
        }
        drop(smooth);
        drop(cursor);

        Ok(Self::with_cached_arrays(lo, hi, offsets, entry_primes, entry_exps))
    }

    fn with_cached_arrays(lo: u64, hi: u64, offsets: Vec<u32>, primes: Vec<u64>, exps: Vec<u8>) -> Self {
        let len = (hi - lo) as usize;
        let mut big_omega = vec![0u8; len];
        let mut small_omega = vec![0u8; len];
        let mut mu_squared = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            let r = offsets[i] as usize..offsets[i + 1] as usize;
            let e = &exps[r.clone()];
            big_omega[i] = e.iter().sum();
            small_omega[i] = r.len() as u8;
            if e.iter().all(|&a| a == 1) {
                mu_squared[i / 64] |= 1 << (i % 64);
            }
        }
        Self {
            lo,
            hi,
            offsets,
            primes,
            exps,
            big_omega,
            small_omega,
            mu_squared,
        }
    }

    /// Reassembles a segment from stored arrays (e.g. a cache file), checking
    /// shape invariants and that every factorization multiplies back to its
    /// integer. Cached arrays that are absent are recomputed; present ones
    /// must agree with the factor arena.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        lo: u64,
        hi: u64,
        offsets: Vec<u32>,
        primes: Vec<u64>,
        exps: Vec<u8>,
        big_omega: Option<Vec<u8>>,
        small_omega: Option<Vec<u8>>,
        mu_squared: Option<Vec<u64>>,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Invariant(format!("segment [{lo}, {hi}): {msg}")));
        if lo < 1 || lo >= hi {
            return bad("empty or invalid range");
        }
        let len = (hi - lo) as usize;
        if offsets.len() != len + 1 || offsets[0] != 0 {
            return bad("offset array has the wrong shape");
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("offsets decrease");
        }
        let total = offsets[len] as usize;
        if primes.len() != total || exps.len() != total {
            return bad("entry arrays disagree with offsets");
        }
        for i in 0..len {
            let r = offsets[i] as usize..offsets[i + 1] as usize;
            let view = FactorView {
                primes: &primes[r.clone()],
                exps: &exps[r],
            };
            if view.primes.windows(2).any(|w| w[0] >= w[1]) || view.exps.contains(&0) {
                return bad("malformed factor list");
            }
            if view.value() != Some(lo + i as u64) {
                return bad("factorization does not reproduce its integer");
            }
        }
        let seg = Self::with_cached_arrays(lo, hi, offsets, primes, exps);
        if big_omega.is_some_and(|a| a != seg.big_omega)
            || small_omega.is_some_and(|a| a != seg.small_omega)
            || mu_squared.is_some_and(|a| a != seg.mu_squared)
        {
            return bad("cached arrays disagree with factorizations");
        }
        Ok(seg)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n < self.hi
    }

    #[inline]
    fn index(&self, n: u64) -> Result<usize> {
        if self.contains(n) {
            Ok((n - self.lo) as usize)
        } else {
            Err(Error::OutOfRange {
                n,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// Factorization of `n`, borrowed from the segment.
    pub fn factor(&self, n: u64) -> Result<FactorView<'_>> {
        let i = self.index(n)?;
        Ok(self.view_at(i))
    }

    /// Factorization of the integer at offset `i` (i.e. `lo + i`).
    #[inline]
    pub fn view_at(&self, i: usize) -> FactorView<'_> {
        let r = self.offsets[i] as usize..self.offsets[i + 1] as usize;
        FactorView {
            primes: &self.primes[r.clone()],
            exps: &self.exps[r],
        }
    }

    pub fn big_omega(&self, n: u64) -> Result<u32> {
        Ok(self.big_omega[self.index(n)?] as u32)
    }

    pub fn small_omega(&self, n: u64) -> Result<u32> {
        Ok(self.small_omega[self.index(n)?] as u32)
    }

    pub fn mu_squared(&self, n: u64) -> Result<bool> {
        let i = self.index(n)?;
        Ok(self.mu_squared_at(i))
    }

    #[inline]
    pub fn big_omega_at(&self, i: usize) -> u32 {
        self.big_omega[i] as u32
    }

    #[inline]
    pub fn small_omega_at(&self, i: usize) -> u32 {
        self.small_omega[i] as u32
    }

    #[inline]
    pub fn mu_squared_at(&self, i: usize) -> bool {
        self.mu_squared[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn dk(&self, n: u64, k: u32) -> Result<u64> {
        dk_value(self.factor(n)?, k)
    }

    /// Iterates `(n, factorization)` over the whole segment.
    pub fn iter(&self) -> impl Iterator<Item = (u64, FactorView<'_>)> + '_ {
        (0..self.len()).map(move |i| (self.lo + i as u64, self.view_at(i)))
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn entry_primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn entry_exponents(&self) -> &[u8] {
        &self.exps
    }

    pub fn big_omega_array(&self) -> &[u8] {
        &self.big_omega
    }

    pub fn small_omega_array(&self) -> &[u8] {
        &self.small_omega
    }

    pub fn mu_squared_words(&self) -> &[u64] {
        &self.mu_squared
    }

    /// Compares every `stride`-th factorization against trial division and
    /// returns the first integer that disagrees.
    pub fn first_trial_division_mismatch(&self, stride: usize) -> Option<u64> {
        (0..self.len())
            .step_by(stride.max(1))
            .map(|i| (self.lo + i as u64, self.view_at(i)))
            .find(|(n, view)| trial_division(*n).view() != *view)
            .map(|(n, _)| n)
    }
}

/// Splits `[lo, hi)` into consecutive segments of at most `size` integers.
/// The split depends only on the arguments.
pub fn segment_bounds(lo: u64, hi: u64, size: u64) -> impl Iterator<Item = (u64, u64)> {
    let size = size.max(1);
    let count = if hi > lo { (hi - lo).div_ceil(size) } else { 0 };
    (0..count).map(move |i| {
        let a = lo + i * size;
        (a, (a + size).min(hi))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u64) -> PrimeTable {
        PrimeTable::up_to(n).unwrap()
    }

    fn fv(entries: &[(u64, u8)]) -> FactorVector {
        FactorVector::new(entries).unwrap()
    }

    #[test]
    fn factor_small_segment() {
        let seg = SieveSegment::build(10, 20, &table(10), 1 << 10).unwrap();
        assert_eq!(seg.factor(12).unwrap().to_vector(), fv(&[(2, 2), (3, 1)]));
        assert_eq!(seg.factor(19).unwrap().to_vector(), fv(&[(19, 1)]));
        assert!(matches!(seg.factor(20), Err(Error::OutOfRange { .. })));
        assert!(matches!(seg.factor(9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn single_prime_segment() {
        let seg = SieveSegment::build(2, 3, &table(2), 16).unwrap();
        assert_eq!(seg.factor(2).unwrap().to_vector(), fv(&[(2, 1)]));
    }

    #[test]
    fn one_is_empty_factorization() {
        let seg = SieveSegment::build(1, 50, &table(7), 64).unwrap();
        assert!(seg.factor(1).unwrap().is_one());
        assert_eq!(seg.big_omega(1).unwrap(), 0);
        assert!(seg.mu_squared(1).unwrap());
    }

    #[test]
    fn semiprime_from_trial_division() {
        let seg = SieveSegment::build(9_900, 10_000, &table(100), 1 << 10).unwrap();
        assert_eq!(seg.factor(9991).unwrap().to_vector(), fv(&[(97, 1), (103, 1)]));
    }

    #[test]
    fn errors() {
        let t = table(10);
        assert!(matches!(
            SieveSegment::build(5, 5, &t, 100),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            SieveSegment::build(2, 1000, &t, 100),
            Err(Error::Capacity {
                len: 998,
                capacity: 100
            })
        ));
        // needs primes up to 31
        assert!(matches!(
            SieveSegment::build(900, 1000, &t, 1000),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn omega_counts() {
        let twelve = fv(&[(2, 2), (3, 1)]);
        assert_eq!((big_omega(twelve.view()), small_omega(twelve.view())), (3, 2));
        let one = FactorVector::one();
        assert_eq!((big_omega(one.view()), small_omega(one.view())), (0, 0));
        let p10 = fv(&[(2, 10)]);
        assert_eq!((big_omega(p10.view()), small_omega(p10.view())), (10, 1));
    }

    #[test]
    fn dk_examples() {
        assert_eq!(dk_value(fv(&[(2, 1), (3, 1)]).view(), 2).unwrap(), 4);
        assert_eq!(dk_value(fv(&[(2, 2)]).view(), 3).unwrap(), 6);
        for k in 1..10 {
            assert_eq!(dk_value(FactorVector::one().view(), k).unwrap(), 1);
        }
        assert!(dk_value(fv(&[(2, 1)]).view(), 0).is_err());
    }

    #[test]
    fn dk_overflow_is_reported() {
        // d_k(p^a) grows like a^{k-1}; 2^60 with k = 60 overflows u64
        let huge = fv(&[(2, 60), (3, 30)]);
        assert_eq!(dk_value(huge.view(), 60), Err(Error::Overflow("binomial in d_k")));
        let primes: Vec<(u64, u8)> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]
            .iter()
            .map(|&p| (p, 1))
            .collect();
        let many = fv(&primes);
        assert_eq!(dk_value(many.view(), 40_000), Err(Error::Overflow("d_k product")));
    }

    #[test]
    fn hyperbola_small() {
        assert_eq!(divisor_sum_hyperbola(1), 1);
        // d(1..10) = 1 2 2 3 2 4 2 4 3 4
        assert_eq!(divisor_sum_hyperbola(10), 27);
    }

    #[test]
    fn squarefree_oracle_small() {
        assert_eq!(squarefree_harmonic_oracle(1), 1);
        assert_eq!(squarefree_harmonic_oracle(4), 7);
    }

    #[test]
    fn factor_vector_validation() {
        assert!(FactorVector::new(&[(3, 1), (2, 1)]).is_err());
        assert!(FactorVector::new(&[(2, 0)]).is_err());
        assert_eq!(fv(&[(2, 2), (5, 1)]).value(), Some(20));
    }

    #[test]
    fn from_parts_rejects_tampering() {
        let seg = SieveSegment::build(100, 200, &table(20), 1000).unwrap();
        let rebuilt = SieveSegment::from_parts(
            seg.lo(),
            seg.hi(),
            seg.offsets().to_vec(),
            seg.entry_primes().to_vec(),
            seg.entry_exponents().to_vec(),
            Some(seg.big_omega_array().to_vec()),
            None,
            Some(seg.mu_squared_words().to_vec()),
        )
        .unwrap();
        assert_eq!(rebuilt, seg);
        let mut primes = seg.entry_primes().to_vec();
        primes[5] += 2;
        assert!(SieveSegment::from_parts(
            100,
            200,
            seg.offsets().to_vec(),
            primes,
            seg.entry_exponents().to_vec(),
            None,
            None,
            None
        )
        .is_err());
    }

    #[test]
    fn bounds_cover_range() {
        let b: Vec<_> = segment_bounds(10, 35, 10).collect();
        assert_eq!(b, vec![(10, 20), (20, 30), (30, 35)]);
        assert_eq!(segment_bounds(5, 5, 3).count(), 0);
    }
}
