//! Binomial-congruence primality criteria.
//!
//! [`lucas_congruence_check`] scans `C(n-1, k) ≡ (-1)^k (mod q)` and
//! [`theorem_classify`] turns that scan into a classification of `(n, q)`.
//! The remaining functions are the classical characterizations of the
//! primes, each returning a [`CriterionVerdict`] whose witness is the first
//! failing congruence in scan order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, integer_sqrt, is_prime, perfect_power_of};
use crate::binomial::{carries, neg_one_pow, BinomialModulus};
use crate::error::{Error, Result};
use crate::row::{RatioTracker, RowCursor};

/// One failing congruence `lhs ≢ rhs (mod modulus)` at a scan index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: u64,
    pub lhs: u64,
    pub rhs: u64,
    pub modulus: u64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≠ {} (mod {})", self.lhs, self.rhs, self.modulus)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub holds: bool,
    pub checked_count: u64,
    pub first_failure: Option<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Stop at the first failing index.
    #[default]
    EarlyExit,
    /// Evaluate every index; still report the first failure.
    FullScan,
}

/// Accumulates congruence checks in scan order.
#[derive(Debug)]
struct Scan {
    mode: ScanMode,
    checked: u64,
    first_failure: Option<Witness>,
}

impl Scan {
    fn new(mode: ScanMode) -> Self {
        Scan {
            mode,
            checked: 0,
            first_failure: None,
        }
    }

    /// Record one check; returns whether scanning should continue.
    fn check(&mut self, index: u64, lhs: u64, rhs: u64, modulus: u64) -> bool {
        self.checked += 1;
        if lhs != rhs && self.first_failure.is_none() {
            self.first_failure = Some(Witness {
                index,
                lhs,
                rhs,
                modulus,
            });
        }
        self.first_failure.is_none() || self.mode == ScanMode::FullScan
    }

    fn finish(self) -> CriterionVerdict {
        CriterionVerdict {
            holds: self.first_failure.is_none(),
            checked_count: self.checked,
            first_failure: self.first_failure,
        }
    }
}

/// Check `C(n-1, k) ≡ (-1)^k (mod q)` for `k = 0..=k_max`.
pub fn lucas_congruence_check(n: u64, q: u64, k_max: u64, mode: ScanMode) -> Result<CriterionVerdict> {
    if n < 2 || q < 2 {
        return Err(Error::domain(format!("need n, q >= 2, got n={n}, q={q}")));
    }
    if k_max > n - 1 {
        return Err(Error::domain(format!("k_max={k_max} exceeds n-1={}", n - 1)));
    }
    let row = n - 1;
    let mut scan = Scan::new(mode);
    // k = 0 and k = 1 need no factorization of q; k = 1 alone rejects every
    // q that does not divide n.
    if !scan.check(0, 1, 1, q) || k_max == 0 {
        return Ok(scan.finish());
    }
    if !scan.check(1, row % q, q - 1, q) || k_max == 1 {
        return Ok(scan.finish());
    }
    let cursor = RowCursor::new(row, &factorize(q)?);
    for (k, lhs) in cursor.enumerate().take(k_max as usize + 1).skip(2) {
        let k = k as u64;
        if !scan.check(k, lhs, neg_one_pow(k, q), q) {
            break;
        }
    }
    Ok(scan.finish())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub n: u64,
    pub q: u64,
    pub verdict: CriterionVerdict,
    pub q_is_prime: bool,
    /// `f` with `q^f = n`, when it exists.
    pub exponent_f: Option<u32>,
}

/// Run the full-range check for `(n, q)` and confirm its conclusion.
///
/// Returns [`Error::TheoremViolation`] if the congruences hold while `q` is
/// composite or `n` is not a power of `q`.
pub fn theorem_classify(n: u64, q: u64) -> Result<ClassificationResult> {
    theorem_classify_with(n, q, ScanMode::EarlyExit)
}

pub fn theorem_classify_with(n: u64, q: u64, mode: ScanMode) -> Result<ClassificationResult> {
    if n < 2 || q < 2 {
        return Err(Error::domain(format!("need n, q >= 2, got n={n}, q={q}")));
    }
    let verdict = lucas_congruence_check(n, q, n - 1, mode)?;
    let q_is_prime = is_prime(q);
    let exponent_f = perfect_power_of(n, q);
    if verdict.holds {
        if !q_is_prime {
            return Err(Error::TheoremViolation {
                n,
                q,
                reason: format!("{q} is composite"),
            });
        }
        if exponent_f.is_none() {
            return Err(Error::TheoremViolation {
                n,
                q,
                reason: format!("{n} is not a power of {q}"),
            });
        }
    }
    Ok(ClassificationResult {
        n,
        q,
        verdict,
        q_is_prime,
        exponent_f,
    })
}

fn require_at_least_two(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("criterion needs an integer >= 2, got {n}")));
    }
    Ok(())
}

/// `n` is prime iff `C(n-1, k) ≡ (-1)^k (mod n)` for all `0 <= k <= n-1`.
pub fn deutsch_gessel_test(n: u64) -> Result<CriterionVerdict> {
    require_at_least_two(n)?;
    lucas_congruence_check(n, n, n - 1, ScanMode::EarlyExit)
}

/// The same congruences restricted to `0 <= k <= floor(sqrt(n))`.
pub fn cai_granville_test(n: u64) -> Result<CriterionVerdict> {
    require_at_least_two(n)?;
    lucas_congruence_check(n, n, integer_sqrt(n).min(n - 1), ScanMode::EarlyExit)
}

/// `n` is prime iff `C(n+m, n) ≡ 1 (mod n)` for `0 <= m <= n-1`.
pub fn babbage_test(n: u64) -> Result<CriterionVerdict> {
    require_at_least_two(n)?;
    let mut scan = Scan::new(ScanMode::EarlyExit);
    // C(n+m, n) walked along m: C(n+m+1, n) = C(n+m, n) (n+m+1) / (m+1).
    let mut column = RatioTracker::new(n)?;
    for m in 0..n {
        if !scan.check(m, column.residue(), 1, n) {
            break;
        }
        column.mul(n + m + 1);
        column.div(m + 1);
    }
    Ok(scan.finish())
}

/// `C(a, b) mod m`. Zero is decided from Kummer valuations alone (every
/// part `p^e` of `m` must divide), so passing checks cost `O(log a)`.
fn binom_residue(a: u64, b: u64, m: u64) -> Result<u64> {
    if b > a {
        return Ok(0);
    }
    let factorization = factorize(m)?;
    let divisible = factorization
        .parts()
        .iter()
        .all(|pp| carries(b, a - b, pp.prime) >= pp.exponent);
    if divisible {
        return Ok(0);
    }
    Ok(BinomialModulus::new(m)?.binom(a, b))
}

/// An odd `N = 2n+1 >= 3` is prime iff `C(2n-k, k-1) ≡ 0 (mod k)` for
/// `1 <= k <= n`.
pub fn piza_test(odd: u64) -> Result<CriterionVerdict> {
    if odd < 3 || odd.is_multiple_of(2) {
        return Err(Error::domain(format!("Piza's criterion needs an odd integer >= 3, got {odd}")));
    }
    let n = (odd - 1) / 2;
    let mut scan = Scan::new(ScanMode::EarlyExit);
    for k in 1..=n {
        let lhs = binom_residue(2 * n - k, k - 1, k)?;
        if !scan.check(k, lhs, 0, k) {
            break;
        }
    }
    Ok(scan.finish())
}

/// Which modulus the Mann–Shanks and Gould–Greig congruences use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusForm {
    /// Modulus `n`, the row index. Characterizes the primes.
    #[default]
    RowIndex,
    /// Modulus `k`, the tested integer, as the statements are sometimes
    /// quoted. Does not characterize the primes (fails already at `k = 7`).
    PaperLiteral,
}

impl ModulusForm {
    fn modulus(self, n: u64, k: u64) -> u64 {
        match self {
            ModulusForm::RowIndex => n,
            ModulusForm::PaperLiteral => k,
        }
    }
}

/// `k >= 2` is prime iff `C(n, k-2n) ≡ 0` for every `n` with
/// `k/3 <= n <= k/2`.
pub fn mann_shanks_test(k: u64, form: ModulusForm) -> Result<CriterionVerdict> {
    require_at_least_two(k)?;
    let mut scan = Scan::new(ScanMode::EarlyExit);
    for n in k.div_ceil(3).max(1)..=k / 2 {
        let modulus = form.modulus(n, k);
        let lhs = binom_residue(n, k - 2 * n, modulus)?;
        if !scan.check(n, lhs, 0, modulus) {
            break;
        }
    }
    Ok(scan.finish())
}

/// `C(-n, j)` reduced mod `m`, for `j >= 0`: `(-1)^j C(n+j-1, j)`.
fn negative_upper_binom(n: u64, j: u64, m: u64) -> Result<u64> {
    let r = binom_residue(n + j - 1, j, m)?;
    Ok(if j.is_multiple_of(2) { r } else { (m - r) % m })
}

/// `k >= 2` is prime iff `C(-n, k-2n) ≡ 0` for every `1 <= n <= k/2`.
pub fn gould_greig_test(k: u64, form: ModulusForm) -> Result<CriterionVerdict> {
    require_at_least_two(k)?;
    let mut scan = Scan::new(ScanMode::EarlyExit);
    // n <= k/2 keeps the lower index k-2n nonnegative.
    for n in 1..=k / 2 {
        let modulus = form.modulus(n, k);
        let lhs = negative_upper_binom(n, k - 2 * n, modulus)?;
        if !scan.check(n, lhs, 0, modulus) {
            break;
        }
    }
    Ok(scan.finish())
}

/// The gallery of criteria, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    DeutschGessel,
    CaiGranville,
    Babbage,
    Piza,
    MannShanks,
    GouldGreig,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::DeutschGessel,
        Criterion::CaiGranville,
        Criterion::Babbage,
        Criterion::Piza,
        Criterion::MannShanks,
        Criterion::GouldGreig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::DeutschGessel => "deutsch-gessel",
            Criterion::CaiGranville => "cai-granville",
            Criterion::Babbage => "babbage",
            Criterion::Piza => "piza",
            Criterion::MannShanks => "mann-shanks",
            Criterion::GouldGreig => "gould-greig",
        }
    }

    /// Whether `n` is in the criterion's domain.
    pub fn accepts(self, n: u64) -> bool {
        match self {
            Criterion::Piza => n >= 3 && n % 2 == 1,
            _ => n >= 2,
        }
    }

    /// Run the criterion on `n` with the default (row-index) modulus form.
    pub fn run(self, n: u64) -> Result<CriterionVerdict> {
        self.run_with(n, ModulusForm::RowIndex)
    }

    /// `form` only affects Mann–Shanks and Gould–Greig.
    pub fn run_with(self, n: u64, form: ModulusForm) -> Result<CriterionVerdict> {
        match self {
            Criterion::DeutschGessel => deutsch_gessel_test(n),
            Criterion::CaiGranville => cai_granville_test(n),
            Criterion::Babbage => babbage_test(n),
            Criterion::Piza => piza_test(n),
            Criterion::MannShanks => mann_shanks_test(n, form),
            Criterion::GouldGreig => gould_greig_test(n, form),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown criterion '{s}'")))
    }
}

/// First input in `lo..=hi` (within the criterion's domain) where the
/// criterion disagrees with the trial-division oracle.
pub fn first_disagreement(
    criterion: Criterion,
    form: ModulusForm,
    lo: u64,
    hi: u64,
) -> Result<Option<(u64, CriterionVerdict)>> {
    for n in lo..=hi {
        if !criterion.accepts(n) {
            continue;
        }
        let v = criterion.run_with(n, form)?;
        if v.holds != is_prime(n) {
            return Ok(Some((n, v)));
        }
    }
    Ok(None)
}
