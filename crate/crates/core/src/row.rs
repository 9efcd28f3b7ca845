//! Streaming Pascal rows modulo `m`.
//!
//! A [`RatioTracker`] keeps a running product of integer factors and inverse
//! factors modulo `m` by splitting it, for each prime-power part `p^e`, into
//! an exact `p`-adic valuation and a unit modulo `p^e`. A [`RowCursor`] uses
//! one to walk `C(n, k)` for `k = 0..=n` via `C(n, k+1) = C(n, k)(n-k)/(k+1)`.

use crate::arith::{factorize, mod_inverse, mul_mod, Factorization};
use crate::binomial::crt_basis;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartState {
    pub prime: u64,
    pub exponent: u32,
    /// `p^exponent`.
    pub modulus: u64,
    pub valuation: i64,
    /// The running value divided by `p^valuation`, reduced mod `p^exponent`.
    pub unit: u64,
}

impl PartState {
    fn split(&self, mut x: u64) -> (u64, i64) {
        let mut v = 0;
        while x.is_multiple_of(self.prime) {
            x /= self.prime;
            v += 1;
        }
        (x % self.modulus, v)
    }

    fn residue(&self) -> u64 {
        if self.valuation >= self.exponent as i64 {
            return 0;
        }
        debug_assert!(self.valuation >= 0, "running value is not an integer");
        let pv = self.prime.pow(self.valuation.max(0) as u32);
        mul_mod(pv, self.unit, self.modulus)
    }
}

/// A rational running product tracked modulo every prime-power part of `m`.
#[derive(Debug, Clone)]
pub struct RatioTracker {
    modulus: u64,
    parts: Vec<PartState>,
    crt: Vec<u64>,
}

impl RatioTracker {
    /// A tracker for `m` holding the value 1.
    pub fn new(m: u64) -> Result<Self> {
        Ok(Self::with_factorization(&factorize(m)?))
    }

    pub fn with_factorization(factorization: &Factorization) -> Self {
        let modulus = factorization.value();
        let parts = factorization
            .parts()
            .iter()
            .map(|pp| {
                let pe = pp.modulus();
                PartState {
                    prime: pp.prime,
                    exponent: pp.exponent,
                    modulus: pe,
                    valuation: 0,
                    unit: 1 % pe,
                }
            })
            .collect();
        RatioTracker {
            modulus,
            parts,
            crt: crt_basis(factorization, modulus),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn parts(&self) -> &[PartState] {
        &self.parts
    }

    /// Multiply the running value by `x`. `x` must be nonzero.
    pub fn mul(&mut self, x: u64) {
        debug_assert!(x != 0);
        for part in &mut self.parts {
            let (u, v) = part.split(x);
            part.valuation += v;
            part.unit = mul_mod(part.unit, u, part.modulus);
        }
    }

    /// Divide the running value by `y`. `y` must be nonzero.
    pub fn div(&mut self, y: u64) {
        debug_assert!(y != 0);
        for part in &mut self.parts {
            let (u, v) = part.split(y);
            part.valuation -= v;
            if part.modulus > 1 {
                let inv = mod_inverse(u, part.modulus).expect("p-free part is a unit");
                part.unit = mul_mod(part.unit, inv, part.modulus);
            }
        }
    }

    /// The running value mod `m`, canonical in `[0, m)`.
    pub fn residue(&self) -> u64 {
        let m = self.modulus;
        self.parts
            .iter()
            .zip(&self.crt)
            .fold(0u64, |acc, (part, &c)| (acc + mul_mod(part.residue(), c, m)) % m)
    }
}

/// Iterator over `C(n, k) mod m` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct RowCursor {
    n: u64,
    next_k: Option<u64>,
    tracker: RatioTracker,
}

impl RowCursor {
    pub fn new(n: u64, factorization: &Factorization) -> Self {
        RowCursor {
            n,
            next_k: Some(0),
            tracker: RatioTracker::with_factorization(factorization),
        }
    }

    pub fn row(&self) -> u64 {
        self.n
    }

    /// Column of the next emission, or `None` once `k = n` was emitted.
    pub fn next_column(&self) -> Option<u64> {
        self.next_k
    }

    pub fn modulus(&self) -> u64 {
        self.tracker.modulus()
    }

    /// Per-part valuation and unit of `C(n, k)` for the next column.
    pub fn parts(&self) -> &[PartState] {
        self.tracker.parts()
    }
}

impl Iterator for RowCursor {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let k = self.next_k?;
        let out = self.tracker.residue();
        if k < self.n {
            self.tracker.mul(self.n - k);
            self.tracker.div(k + 1);
            self.next_k = Some(k + 1);
        } else {
            self.next_k = None;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.next_k.map_or(0, |k| (self.n - k + 1) as usize);
        (left, Some(left))
    }
}

/// Stream `C(n, 0..=n) mod m`.
pub fn row_stream(n: u64, m: u64) -> Result<RowCursor> {
    Ok(RowCursor::new(n, &factorize(m)?))
}
