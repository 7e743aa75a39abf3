//! Shared fixtures for the benchmarks.

use tateshift_core::mod_arith::HeightParams;

/// Primes the engine benchmarks sweep over.
pub const ENGINE_PRIMES: [u64; 4] = [3, 5, 7, 11];

pub fn params(p: u64) -> HeightParams {
    HeightParams::new(p).expect("benchmark primes are valid")
}
