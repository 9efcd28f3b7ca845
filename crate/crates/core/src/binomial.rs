//! Binomial coefficients: exact, modulo a prime (Lucas), modulo a prime power
//! (p-free factorials plus the Kummer valuation), and modulo any `m` via CRT.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{factorize, is_prime, mod_inverse, mul_mod, pow_mod, Factorization, PrimePower};
use crate::error::{Error, Result};

/// Prefix tables are built for prime powers up to this size; larger moduli
/// fall back to direct products.
const TABLE_LIMIT: u64 = 1 << 20;

/// Exact `C(a, b)`; zero when `b < 0` or `b > a`.
pub fn binom_exact(a: u64, b: i64) -> BigUint {
    if b < 0 || b as u64 > a {
        return BigUint::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigUint::one();
    for j in 0..b {
        acc *= a - j;
        acc /= j + 1;
    }
    acc
}

/// Reduce an exact value modulo `m`.
pub fn reduce(value: &BigUint, m: u64) -> u64 {
    let r = value % m;
    r.iter_u64_digits().next().unwrap_or(0)
}

/// `C(a, b) mod p` by Lucas' theorem.
pub fn binom_mod_prime(a: u64, b: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(lucas(a, b, p))
}

/// Lucas product over base-`p` digits. `p` must be prime.
pub(crate) fn lucas(mut a: u64, mut b: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while b > 0 {
        let (ai, bi) = (a % p, b % p);
        if bi > ai {
            return 0;
        }
        acc = mul_mod(acc, small_binom_mod_prime(ai, bi, p), p);
        a /= p;
        b /= p;
    }
    acc
}

/// `C(a, b) mod p` for digits `b <= a < p`, by the multiplicative formula.
fn small_binom_mod_prime(a: u64, b: u64, p: u64) -> u64 {
    let b = b.min(a - b);
    let (mut num, mut den) = (1u64, 1u64);
    for j in 0..b {
        num = mul_mod(num, a - j, p);
        den = mul_mod(den, j + 1, p);
    }
    // den is a product of integers in 1..p, hence a unit.
    mul_mod(num, mod_inverse(den, p).expect("unit modulo a prime"), p)
}

/// Exponent of `p` in `C(a, b)`: the number of carries when adding `b` and
/// `a - b` in base `p`.
pub fn kummer_valuation(a: u64, b: u64, p: u64) -> Result<u32> {
    if b > a {
        return Err(Error::domain(format!("valuation of C({a}, {b}) is undefined")));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(carries(b, a - b, p))
}

pub(crate) fn carries(mut x: u64, mut y: u64, p: u64) -> u32 {
    let mut carry = 0u64;
    let mut count = 0;
    while x > 0 || y > 0 || carry > 0 {
        let s = x % p + y % p + carry;
        carry = (s >= p) as u64;
        count += carry as u32;
        x /= p;
        y /= p;
    }
    count
}

/// `C(a, b) mod p^e`.
pub fn binom_mod_prime_power(a: u64, b: u64, p: u64, e: u32) -> Result<u64> {
    Ok(PrimePowerBinomial::new(p, e)?.binom(a, b))
}

/// Binomial residues modulo a fixed prime power `p^e`.
///
/// `C(a, b) = p^v * N(a) / (N(b) N(a-b))`, where `N(n)` is `n!` with every
/// factor of `p` removed and `v` is the Kummer valuation. `N(n)` is the
/// product over `i >= 0` of the p-free integers up to `n / p^i`, and each of
/// those is a power of the full block product times a prefix product.
#[derive(Debug, Clone)]
pub struct PrimePowerBinomial {
    part: PrimePower,
    modulus: u64,
    /// `prefix[r]` = product of p-free integers in `1..=r`, mod `p^e`.
    prefix: Option<Vec<u64>>,
}

impl PrimePowerBinomial {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::domain("prime-power exponent must be at least 1"));
        }
        let modulus = p
            .checked_pow(e)
            .ok_or_else(|| Error::domain(format!("{p}^{e} exceeds 64 bits")))?;
        Ok(Self::for_part(PrimePower { prime: p, exponent: e }, modulus))
    }

    fn for_part(part: PrimePower, modulus: u64) -> Self {
        let prefix = (part.exponent > 1 && modulus <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(modulus as usize + 1);
            t.push(1 % modulus);
            let mut acc = 1 % modulus;
            for i in 1..=modulus {
                if i % part.prime != 0 {
                    acc = mul_mod(acc, i, modulus);
                }
                t.push(acc);
            }
            t
        });
        PrimePowerBinomial {
            part,
            modulus,
            prefix,
        }
    }

    pub fn part(&self) -> PrimePower {
        self.part
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `C(a, b) mod p^e`; zero when `b > a`.
    pub fn binom(&self, a: u64, b: u64) -> u64 {
        if b > a {
            return 0;
        }
        let p = self.part.prime;
        if self.part.exponent == 1 {
            return lucas(a, b, p);
        }
        let v = carries(b, a - b, p);
        if v >= self.part.exponent {
            return 0;
        }
        let m = self.modulus;
        let den = mul_mod(self.p_free_factorial(b), self.p_free_factorial(a - b), m);
        let unit = mul_mod(
            self.p_free_factorial(a),
            mod_inverse(den, m).expect("p-free factorials are units"),
            m,
        );
        mul_mod(p.pow(v), unit, m)
    }

    /// `n!` with all factors of `p` removed, mod `p^e`.
    fn p_free_factorial(&self, mut n: u64) -> u64 {
        let m = self.modulus;
        let mut acc = 1 % m;
        let mut block: Option<u64> = None;
        while n > 0 {
            let full = n / m;
            if full > 0 {
                let bp = *block.get_or_insert_with(|| self.prefix_product(m));
                acc = mul_mod(acc, pow_mod(bp, full, m), m);
            }
            acc = mul_mod(acc, self.prefix_product(n % m), m);
            n /= self.part.prime;
        }
        acc
    }

    fn prefix_product(&self, r: u64) -> u64 {
        match &self.prefix {
            Some(t) => t[r as usize],
            None => {
                let m = self.modulus;
                (1..=r)
                    .filter(|i| i % self.part.prime != 0)
                    .fold(1 % m, |acc, i| mul_mod(acc, i, m))
            }
        }
    }
}

/// Binomial residues modulo a fixed `m`, evaluated per prime-power part and
/// recombined by CRT.
#[derive(Debug, Clone)]
pub struct BinomialModulus {
    modulus: u64,
    factorization: Factorization,
    kernels: Vec<PrimePowerBinomial>,
    /// `crt[i] ≡ 1 (mod part i)` and `≡ 0` modulo every other part.
    crt: Vec<u64>,
}

impl BinomialModulus {
    pub fn new(m: u64) -> Result<Self> {
        let factorization = factorize(m)?;
        let kernels: Vec<_> = factorization
            .parts()
            .iter()
            .map(|&pp| PrimePowerBinomial::for_part(pp, pp.modulus()))
            .collect();
        let crt = crt_basis(&factorization, m);
        Ok(BinomialModulus {
            modulus: m,
            factorization,
            kernels,
            crt,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    /// `C(a, b) mod m`; zero when `b > a`.
    pub fn binom(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus;
        self.kernels
            .iter()
            .zip(&self.crt)
            .fold(0u64, |acc, (k, &c)| (acc + mul_mod(k.binom(a, b), c, m)) % m)
    }
}

/// CRT idempotents for the parts of `m`.
pub(crate) fn crt_basis(factorization: &Factorization, m: u64) -> Vec<u64> {
    factorization
        .parts()
        .iter()
        .map(|pp| {
            let pe = pp.modulus();
            let rest = m / pe;
            if rest == 1 {
                return 1 % m;
            }
            let inv = mod_inverse(rest % pe, pe).expect("coprime parts");
            mul_mod(rest, inv, m)
        })
        .collect()
}

/// `C(a, b) mod m`; zero when `b > a` and for `m == 1`.
pub fn binom_mod(a: u64, b: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("modulus must be at least 1"));
    }
    if b > a || m == 1 {
        return Ok(0);
    }
    Ok(BinomialModulus::new(m)?.binom(a, b))
}

/// `(-1)^k mod m`, canonical in `[0, m)`.
pub fn neg_one_pow(k: u64, m: u64) -> u64 {
    if m <= 1 {
        0
    } else if k.is_multiple_of(2) {
        1
    } else {
        m - 1
    }
}
