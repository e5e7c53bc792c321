use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param_err, Result};

/// All primes up to a fixed limit, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

impl PrimeTable {
    /// Sieve of Eratosthenes over odd numbers.
    pub fn up_to(limit: u64) -> Result<Self> {
        if limit >= u32::MAX as u64 {
            return Err(param_err!("prime table limit {limit} does not fit 32-bit primes"));
        }
        let mut primes = Vec::new();
        if limit >= 2 {
            primes.push(2);
        }
        if limit >= 3 {
            // index i represents 2i + 1
            let half = ((limit - 1) / 2 + 1) as usize;
            let mut composite = vec![false; half];
            let mut i = 1usize;
            while (2 * i + 1) * (2 * i + 1) <= limit as usize {
                if !composite[i] {
                    let p = 2 * i + 1;
                    let mut j = (p * p) / 2;
                    while j < half {
                        composite[j] = true;
                        j += p;
                    }
                }
                i += 1;
            }
            primes.extend(
                composite
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| (2 * i + 1) as u32),
            );
        }
        Ok(Self { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `p <= x`. Errors when `x` exceeds the table limit.
    pub fn up_to_slice(&self, x: f64) -> Result<&[u32]> {
        if x > self.limit as f64 {
            return Err(param_err!(
                "primes up to {x} requested from a table complete only to {}",
                self.limit
            ));
        }
        let end = self.primes.partition_point(|&p| (p as f64) <= x);
        Ok(&self.primes[..end])
    }

    /// Primes in the closed real interval `[lo, hi]`.
    pub fn in_closed(&self, lo: f64, hi: f64) -> Result<&[u32]> {
        let upto = self.up_to_slice(hi)?;
        let start = upto.partition_point(|&p| (p as f64) < lo);
        Ok(&upto[start..])
    }

    /// Number of primes `<= x` (x within the table).
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| (p as u64) <= x)
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        if n > self.limit {
            return None;
        }
        Some(u32::try_from(n).is_ok_and(|n| self.primes.binary_search(&n).is_ok()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_tables() {
        assert!(PrimeTable::up_to(1).unwrap().is_empty());
        assert_eq!(PrimeTable::up_to(2).unwrap().primes(), &[2]);
        assert_eq!(PrimeTable::up_to(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(PrimeTable::up_to(11).unwrap().primes(), &[2, 3, 5, 7, 11]);
    }

    #[test]
    fn matches_trial_division() {
        let t = PrimeTable::up_to(20_000).unwrap();
        let naive: Vec<u32> = (0..=20_000u64)
            .filter(|&n| naive_is_prime(n))
            .map(|n| n as u32)
            .collect();
        assert_eq!(t.primes(), naive.as_slice());
        assert_eq!(t.pi(1_000_0), 1229);
    }

    #[test]
    fn pi_of_ten_to_the_sixth() {
        assert_eq!(PrimeTable::up_to(1_000_000).unwrap().len(), 78_498);
    }

    #[test]
    fn slices() {
        let t = PrimeTable::up_to(100).unwrap();
        assert_eq!(t.in_closed(10.0, 30.0).unwrap(), &[11, 13, 17, 19, 23, 29]);
        assert_eq!(t.in_closed(30.0, 10.0).unwrap(), &[] as &[u32]);
        assert!(t.up_to_slice(101.0).is_err());
    }
}
