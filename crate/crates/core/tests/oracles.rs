//! Sieve output against independent computations written here from scratch.

use shortint_core::accumulate::{prime_table_for, IntSum, SegmentRunner, Sequential};
use shortint_core::restrict::kpow_omega_sum;
use shortint_core::sieve::{divisor_sum_hyperbola, dk_value, squarefree_harmonic_oracle, SieveSegment};

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut a = 0;
        while n % p == 0 {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pascal(n: u32, r: u32) -> u64 {
    let mut c = 1u64;
    for i in 0..r as u64 {
        c = c * (n as u64 - i) / (i + 1);
    }
    c
}

#[test]
fn sieve_matches_trial_division_to_1e5() {
    let hi = 100_001;
    let seg = SieveSegment::build(1, hi, &prime_table_for(hi).unwrap(), hi - 1).unwrap();
    for n in 1..hi {
        let f = factor(n);
        let view = seg.factor(n).unwrap();
        assert_eq!(seg.big_omega(n).unwrap(), f.iter().map(|e| e.1).sum::<u32>(), "Ω({n})");
        assert_eq!(seg.small_omega(n).unwrap(), f.len() as u32, "ω({n})");
        let sieve_pairs: Vec<(u64, u32)> = view.iter().map(|(p, a)| (p, a as u32)).collect();
        assert_eq!(sieve_pairs, f, "factorization of {n}");
        for k in 1..=5 {
            let want: u64 = f.iter().map(|&(_, a)| pascal(a + k - 1, k - 1)).product();
            assert_eq!(seg.dk(n, k).unwrap(), want, "d_{k}({n})");
        }
    }
}

#[test]
fn dk_is_iterated_convolution_with_one() {
    const N: usize = 10_000;
    let seg = SieveSegment::build(1, N as u64 + 1, &prime_table_for(N as u64 + 1).unwrap(), N as u64).unwrap();
    let mut prev = vec![0u64; N + 1];
    for v in prev.iter_mut().skip(1) {
        *v = 1;
    }
    for k in 1..=5u32 {
        for n in 1..=N {
            assert_eq!(seg.dk(n as u64, k).unwrap(), prev[n], "d_{k}({n})");
        }
        let mut next = vec![0u64; N + 1];
        for d in 1..=N {
            for m in (d..=N).step_by(d) {
                next[m] += prev[d];
            }
        }
        prev = next;
    }
}

fn d2_sum(x: u64) -> u128 {
    Sequential::default()
        .run(1, x + 1, || {
            IntSum::new(|seg: &SieveSegment, i| Ok(dk_value(seg.view_at(i), 2)? as u128))
        })
        .unwrap()
        .total
}

#[test]
fn divisor_sum_matches_hyperbola() {
    for x in [1, 2, 10, 1_000, 100_000] {
        let naive: u128 = (1..=x).map(|d| (x / d) as u128).sum();
        assert_eq!(divisor_sum_hyperbola(x), naive);
        assert_eq!(d2_sum(x), divisor_sum_hyperbola(x), "x = {x}");
    }
}

#[test]
fn two_pow_omega_matches_squarefree_oracle() {
    for x in [1, 4, 1_000, 200_000] {
        let s = kpow_omega_sum(x, 2, &Sequential::default()).unwrap();
        assert_eq!(s.sum, squarefree_harmonic_oracle(x), "x = {x}");
    }
    assert_eq!(squarefree_harmonic_oracle(4), 7);
}

#[test]
fn segmentation_does_not_change_sums() {
    let whole = d2_sum(50_000);
    for size in [7, 1000, 4096] {
        let r = Sequential { segment_size: size }
            .run(1, 50_001, || {
                IntSum::new(|seg: &SieveSegment, i| Ok(dk_value(seg.view_at(i), 2)? as u128))
            })
            .unwrap();
        assert_eq!(r.total, whole);
    }
}
