//! Exponent arithmetic for the determinant twist at height `n = p - 1`.
//!
//! The Teichmüller units never appear as numbers: only their exponents do,
//! reduced modulo `p^n - 1` or modulo `n^2` (the order of `eta`). Everything
//! that touches `p^n` is done in arbitrary precision since `p^n` leaves the
//! 64-bit range already at `p = 11`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest prime accepted by [`HeightParams::new`].
pub const MAX_PRIME: u64 = 1000;

/// Deterministic trial-division primality test.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m.is_multiple_of(2) {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An odd prime `p` together with the height `n = p - 1` and `q = p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightParams {
    p: u64,
    n: u64,
    q: BigUint,
}

impl HeightParams {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::PrimeOutOfRange { p, max: MAX_PRIME });
        }
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let n = p - 1;
        let q = BigUint::from(p).pow(n as u32);
        Ok(Self { p, n, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `p^n`, the order of the residue field of the Witt vectors.
    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// `n^2`, the order of `eta` (and of `tau`).
    pub fn n_squared(&self) -> u64 {
        self.n * self.n
    }

    /// `(p^n - 1) / n` as an exact integer.
    pub fn det_tau_exponent_exact(&self) -> BigUint {
        let (quot, rem) = (&self.q - 1u32).div_rem(&BigUint::from(self.n));
        debug_assert!(rem.is_zero());
        quot
    }
}

/// A residue class, stored as its least nonnegative representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Residue {
    pub value: u64,
    pub modulus: u64,
}

impl Residue {
    pub fn new(value: i128, modulus: u64) -> Self {
        let m = modulus as i128;
        Self {
            value: value.rem_euclid(m) as u64,
            modulus,
        }
    }
}

/// Exponent of `eta` in `det(tau)`: `(p^n - 1)/n` modulo `n^2`.
pub fn det_tau_exponent(params: &HeightParams) -> Residue {
    let modulus = params.n_squared();
    let value = (params.det_tau_exponent_exact() % BigUint::from(modulus))
        .to_u64()
        .expect("residue below n^2 fits in u64");
    Residue { value, modulus }
}

/// The exponent `k` for which `delta^k` is fixed by the twisted action of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DeltaExponent {
    /// `-(n/2)(n-2)`.
    pub representative: i64,
    /// The same class, normalized into `[0, n^2)`.
    pub residue: Residue,
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod(a: i64, m: i64) -> Option<i64> {
    let g = a.rem_euclid(m).extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m))
}

/// Solves `-p k + (p^n - 1)/n = 0 (mod n^2)`.
///
/// The solution is unique modulo `n^2` because `p = n + 1` is a unit there;
/// the returned representative is `-(n/2)(n-2)`, and it is checked against
/// the solution obtained by inverting `p`.
pub fn invariant_delta_exponent(params: &HeightParams) -> Result<DeltaExponent> {
    let n = params.n as i64;
    let p = params.p as i64;
    let modulus = params.n_squared();
    let representative = -(n / 2) * (n - 2);

    let p_inv = inverse_mod(p, modulus as i64).ok_or_else(|| {
        Error::Inconsistent(format!("p = {p} is not invertible modulo n^2 = {modulus}"))
    })?;
    let rhs = det_tau_exponent(params).value as i128;
    let solved = Residue::new(rhs * p_inv as i128, modulus);
    let residue = Residue::new(representative as i128, modulus);
    if solved != residue {
        return Err(Error::Inconsistent(format!(
            "delta exponent {representative} is not the solution {} mod {modulus}",
            solved.value
        )));
    }
    let lhs = -(p as i128) * representative as i128 + rhs;
    if lhs.rem_euclid(modulus as i128) != 0 {
        return Err(Error::Inconsistent(format!(
            "-p k + (p^n-1)/n is nonzero mod n^2 for k = {representative}"
        )));
    }
    Ok(DeltaExponent {
        representative,
        residue,
    })
}

/// Exact check of `(n/2)(n-2) p + (p^n - 1)/n = 0 (mod n^2)`.
pub fn congruence_check(params: &HeightParams) -> bool {
    let n = BigInt::from(params.n);
    let p = BigInt::from(params.p);
    let two = BigInt::from(2u32);
    let lhs = (&n / &two) * (&n - &two) * &p + BigInt::from(params.det_tau_exponent_exact());
    let modulus = &n * &n;
    lhs.mod_floor(&modulus).is_zero()
}

/// Odd primes in `3..=max`.
pub fn odd_primes_up_to(max: u64) -> impl Iterator<Item = u64> {
    (3..=max).filter(|&m| is_prime(m))
}

/// The suspension `-p n (n-2)` relating the twisted and untwisted modules.
pub fn twist_suspension(params: &HeightParams) -> i64 {
    let (p, n) = (params.p as i64, params.n as i64);
    -p * n * (n - 2)
}
