//! Integer and modular arithmetic primitives used by the binomial kernels.
//!
//! Every public input is a `u64`. Products are formed in `u128` so that any
//! modulus up to `u64::MAX` is supported without overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a * b mod m`, with `m >= 1`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`, with `m >= 1`. Returns 0 when `m == 1`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One prime-power part `prime^exponent` of a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    /// `prime^exponent`. Always fits, since it divides a `u64`.
    pub fn modulus(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

/// A positive integer decomposed into prime-power parts, primes strictly
/// increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization {
    parts: Vec<PrimePower>,
}

impl Factorization {
    pub fn parts(&self) -> &[PrimePower] {
        &self.parts
    }

    /// The factored integer. 1 for the empty factorization.
    pub fn value(&self) -> u64 {
        self.parts.iter().map(PrimePower::modulus).product()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Factor `m` by trial division: 2, then odd candidates up to `sqrt(m)`.
///
/// `factorize(1)` is the empty factorization.
pub fn factorize(m: u64) -> Result<Factorization> {
    if m == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut parts = Vec::new();
    let mut rest = m;
    let mut strip = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            parts.push(PrimePower {
                prime: p,
                exponent: e,
            });
        }
    };
    strip(2, &mut rest);
    let mut d = 3u64;
    while d <= rest / d {
        strip(d, &mut rest);
        d += 2;
    }
    if rest > 1 {
        strip(rest, &mut rest);
    }
    Ok(Factorization { parts })
}

/// Trial-division primality oracle.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::domain(format!("modulus must be at least 2, got {m}")));
    }
    if m <= i64::MAX as u64 {
        let (mut old_r, mut r) = ((a % m) as i64, m as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        if old_r != 1 {
            return Err(Error::NotInvertible { a, m });
        }
        return Ok(old_s.rem_euclid(m as i64) as u64);
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Combine `(residue, modulus)` pairs with pairwise coprime moduli into the
/// unique residue modulo their product. Returns `(residue, product)`.
pub fn crt_combine(pairs: &[(u64, u64)]) -> Result<(u64, u64)> {
    for (i, &(_, mi)) in pairs.iter().enumerate() {
        if mi < 2 {
            return Err(Error::domain(format!("CRT modulus must be at least 2, got {mi}")));
        }
        for &(_, mj) in &pairs[i + 1..] {
            if gcd(mi, mj) != 1 {
                return Err(Error::domain(format!("CRT moduli {mi} and {mj} are not coprime")));
            }
        }
    }
    let mut acc = 0u64;
    let mut modulus = 1u64;
    for &(r, m) in pairs {
        let r = r % m;
        let next = modulus
            .checked_mul(m)
            .ok_or_else(|| Error::domain("CRT product exceeds 64 bits"))?;
        // acc + modulus * t ≡ r (mod m)
        let diff = ((r as u128 + m as u128 - (acc % m) as u128) % m as u128) as u64;
        let t = mul_mod(diff, mod_inverse(modulus % m, m)?, m);
        acc = ((acc as u128 + modulus as u128 * t as u128) % next as u128) as u64;
        modulus = next;
    }
    Ok((acc, modulus))
}

/// Base-`p` digits of an integer, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitExpansion {
    base: u64,
    digits: Vec<u64>,
}

impl DigitExpansion {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Digit `i`, zero beyond the most significant digit.
    pub fn digit(&self, i: usize) -> u64 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Reconstruct the expanded value. `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        self.digits
            .iter()
            .rev()
            .try_fold(0u64, |acc, &d| acc.checked_mul(self.base)?.checked_add(d))
    }
}

pub fn digits(a: u64, base: u64) -> Result<DigitExpansion> {
    if base < 2 {
        return Err(Error::domain(format!("digit base must be at least 2, got {base}")));
    }
    let mut digits = Vec::new();
    let mut rest = a;
    loop {
        digits.push(rest % base);
        rest /= base;
        if rest == 0 {
            break;
        }
    }
    Ok(DigitExpansion { base, digits })
}

/// Largest `s` with `s * s <= n`.
pub fn integer_sqrt(n: u64) -> u64 {
    n.isqrt()
}

/// The exponent `f >= 1` with `q^f == n`, if any.
pub fn perfect_power_of(n: u64, q: u64) -> Option<u32> {
    if n < 2 || q < 2 {
        return None;
    }
    let mut f = 0;
    let mut rest = n;
    while rest.is_multiple_of(q) {
        rest /= q;
        f += 1;
    }
    (rest == 1).then_some(f)
}
