//! Exact arithmetic data and numerical kernels for studying divisor-bounded
//! multiplicative functions in short intervals.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation over caller-provided ranges: the segmented factorization sieve,
//! multiplicative functions given by prime-power rules, short-window
//! statistics, the restriction sets used to discard atypical integers, and
//! Dirichlet polynomial machinery (mean values, large values, the Ramaré
//! decomposition, truncated Perron windows).
//!
//! Work over large integer ranges is split into fixed segments. The
//! [`accumulate`] module runs a [`accumulate::RangeAccumulator`] over those
//! segments sequentially; a companion crate can run the same accumulators in
//! parallel and, because segmentation and merge order are fixed, obtain
//! bit-identical results.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod accumulate;
pub mod dirichlet;
pub mod error;
pub mod math;
pub mod multfun;
pub mod primes;
pub mod restrict;
pub mod shortwin;
pub mod sieve;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use primes::PrimeTable;
pub use sieve::{FactorVector, SieveSegment};
