//! Grid verification of the congruences behind the converse criterion.
//!
//! Every check becomes a [`CongruenceRecord`] tagged with the equation it
//! instantiates. Large operands always go through the prime-power kernel;
//! small instances are then recomputed from exact big integers by
//! [`cross_check`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, mod_inverse, mul_mod};
use crate::binomial::{binom_exact, lucas, reduce, PrimePowerBinomial};
use crate::criteria::theorem_classify;
use crate::error::{Error, Result};
use crate::row::{RatioTracker, RowCursor};

/// Which congruence a record instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    /// `C(p-1, k) ≡ (-1)^k (mod p)`.
    Eq1,
    /// `C(p^f-1, k) ≡ (-1)^k (mod p)`.
    Eq2,
    /// The converse scan: family holds iff `q` prime and `n = q^f`.
    Eq3,
    /// `C(p^f-1, p^(f-1)) ≡ p-1 (mod p^2)`, or `3 (mod 4)` for `p = 2`.
    Eq6,
    /// `C(p^f-1, p^(f-1)) = (p-1) C(p^f-1, p^(f-1)-1)`.
    Eq7,
    /// `(p^f-i)/(p^(f-1)-i) ≡ 1 (mod p^2)` for `p ∤ i`, `f >= 3`.
    Eq9,
    /// The `p | i` sub-product equals `C(p^(f-1)-1, p^(f-2)-1)`.
    Eq10,
    /// `C(p^f-1, p^(f-1)-1) ≡ C(p^(f-1)-1, p^(f-2)-1) (mod p^2)`.
    Eq11,
    /// `C(p^f-1, p^(f-1)-1) ≡ C(p^2-1, p-1) (mod p^2)`.
    Eq12,
    /// `C(p^2-1, p-1) ≡ 1 (mod p^2)` for `p >= 3`.
    Eq14,
    /// `C(p^2-1, p) ≡ p-1 (mod p^2)` for `p >= 3`.
    Eq16,
    /// `C(2^f-1, 2^(f-1)) ≡ 3 (mod 4)`.
    Eq17,
    /// `C(s p^f - 1, p^f) ≡ s-1 (mod p)` for `p ∤ s`.
    Eq21,
}

impl Location {
    pub const ALL: [Location; 13] = [
        Location::Eq1,
        Location::Eq2,
        Location::Eq3,
        Location::Eq6,
        Location::Eq7,
        Location::Eq9,
        Location::Eq10,
        Location::Eq11,
        Location::Eq12,
        Location::Eq14,
        Location::Eq16,
        Location::Eq17,
        Location::Eq21,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Location::Eq1 => "eq1",
            Location::Eq2 => "eq2",
            Location::Eq3 => "eq3",
            Location::Eq6 => "eq6",
            Location::Eq7 => "eq7",
            Location::Eq9 => "eq9",
            Location::Eq10 => "eq10",
            Location::Eq11 => "eq11",
            Location::Eq12 => "eq12",
            Location::Eq14 => "eq14",
            Location::Eq16 => "eq16",
            Location::Eq17 => "eq17",
            Location::Eq21 => "eq21",
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Location {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Location::ALL
            .into_iter()
            .find(|l| l.tag() == s)
            .ok_or_else(|| Error::domain(format!("unknown location '{s}'")))
    }
}

/// Congruences that are rearrangements or instances of checked ones, and the
/// record tag that covers each.
pub const COVERED_ELSEWHERE: [(&str, &str); 7] = [
    ("eq5", "eq2"),
    ("eq8", "eq9+eq10"),
    ("eq13", "eq6"),
    ("eq15", "eq6"),
    ("eq18", "eq3"),
    ("eq19", "eq6"),
    ("eq20", "eq3"),
];

/// Named parameters of a record. Absent symbols are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
}

impl Params {
    fn pf(p: u64, f: u32) -> Self {
        Params {
            p: Some(p),
            f: Some(f as u64),
            ..Default::default()
        }
    }
}

/// One checked congruence `lhs ≡ rhs (mod modulus)`.
///
/// `pass` is `None` (and `lhs`, `rhs` absent) for a sub-check whose
/// hypotheses do not apply at this grid point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRecord {
    pub location: Location,
    pub params: Params,
    pub lhs: Option<u64>,
    pub rhs: Option<u64>,
    pub modulus: u64,
    pub pass: Option<bool>,
}

impl CongruenceRecord {
    pub fn check(location: Location, params: Params, lhs: u64, rhs: u64, modulus: u64) -> Self {
        CongruenceRecord {
            location,
            params,
            lhs: Some(lhs),
            rhs: Some(rhs),
            modulus,
            pass: Some(lhs == rhs),
        }
    }

    pub fn not_applicable(location: Location, params: Params, modulus: u64) -> Self {
        CongruenceRecord {
            location,
            params,
            lhs: None,
            rhs: None,
            modulus,
            pass: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.pass == Some(true)
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub not_applicable: u64,
}

impl Totals {
    pub fn of(records: &[CongruenceRecord]) -> Self {
        let mut t = Totals::default();
        for r in records {
            match r.pass {
                Some(true) => t.passed += 1,
                Some(false) => t.failed += 1,
                None => t.not_applicable += 1,
            }
        }
        t.checked = t.passed + t.failed;
        t
    }
}

/// Result of recomputing record left-hand sides from exact big integers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub checked: u64,
    pub mismatches: Vec<CongruenceRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub records: Vec<CongruenceRecord>,
    pub totals: Totals,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<SuiteGrid>,
    #[serde(default)]
    pub cross_check: CrossCheck,
    #[serde(default)]
    pub covered_elsewhere: BTreeMap<String, String>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn from_records(records: Vec<CongruenceRecord>) -> Self {
        SuiteReport {
            totals: Totals::of(&records),
            records,
            ..Default::default()
        }
    }

    /// No failing record and no oracle mismatch.
    pub fn is_clean(&self) -> bool {
        self.totals.failed == 0 && self.cross_check.mismatches.is_empty()
    }

    fn extend(&mut self, other: SuiteReport) {
        let t = other.totals;
        self.totals.checked += t.checked;
        self.totals.passed += t.passed;
        self.totals.failed += t.failed;
        self.totals.not_applicable += t.not_applicable;
        self.records.extend(other.records);
        self.warnings.extend(other.warnings);
    }
}

fn require_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

fn power(p: u64, f: u32) -> Result<u64> {
    p.checked_pow(f)
        .ok_or_else(|| Error::domain(format!("{p}^{f} exceeds the 64-bit input bound")))
}

/// `C(p^f-1, k) ≡ (-1)^k (mod p)` for every `k` in `0..p^f`.
pub fn verify_proposition(p: u64, f: u32) -> Result<SuiteReport> {
    require_prime(p)?;
    if f == 0 {
        return Err(Error::domain("exponent f must be at least 1"));
    }
    let n = power(p, f)?;
    let location = if f == 1 { Location::Eq1 } else { Location::Eq2 };
    let cursor = RowCursor::new(n - 1, &factorize(p)?);
    let records = cursor
        .enumerate()
        .map(|(k, lhs)| {
            let k = k as u64;
            let params = Params {
                k: Some(k),
                ..Params::pf(p, f)
            };
            let rhs = if k.is_multiple_of(2) { 1 % p } else { p - 1 };
            CongruenceRecord::check(location, params, lhs, rhs, p)
        })
        .collect();
    Ok(SuiteReport::from_records(records))
}

fn lemma_rhs(p: u64) -> u64 {
    if p == 2 {
        3
    } else {
        p - 1
    }
}

/// `C(p^f-1, p^(f-1)) ≡ p-1 (mod p^2)` for odd `p`, `≡ 3 (mod 4)` for `p = 2`.
pub fn verify_lemma(p: u64, f: u32) -> Result<CongruenceRecord> {
    require_prime(p)?;
    if f < 2 {
        return Err(Error::domain(format!("lemma needs f >= 2, got {f}")));
    }
    let top = power(p, f)? - 1;
    let kernel = PrimePowerBinomial::new(p, 2)?;
    let lhs = kernel.binom(top, p.pow(f - 1));
    Ok(CongruenceRecord::check(Location::Eq6, Params::pf(p, f), lhs, lemma_rhs(p), kernel.modulus()))
}

/// Sampling and size limits for the proof-chain checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLimits {
    /// Per-`i` ratio checks cover the whole range up to this many indices.
    pub sample_threshold: u64,
    /// Indices taken from each end of a sampled range.
    pub sample_edge: u64,
    /// Fixed-stride indices taken from the middle of a sampled range.
    pub sample_middle: u64,
    /// Largest sub-product (number of factors) evaluated in full.
    pub product_cap: u64,
}

impl Default for ChainLimits {
    fn default() -> Self {
        ChainLimits {
            sample_threshold: 10_000,
            sample_edge: 100,
            sample_middle: 100,
            product_cap: 1_000_000,
        }
    }
}

impl ChainLimits {
    /// Indices in `1..=last` to check: all of them, or the first and last
    /// `sample_edge` plus `sample_middle` evenly strided ones in between.
    pub fn sample(&self, last: u64) -> Vec<u64> {
        if last <= self.sample_threshold {
            return (1..=last).collect();
        }
        let edge = self.sample_edge;
        let mut out: Vec<u64> = (1..=edge).collect();
        let inner = last - 2 * edge;
        let stride = inner / (self.sample_middle + 1);
        if stride > 0 {
            out.extend((1..=self.sample_middle).map(|t| edge + t * stride));
        }
        out.extend(last - edge + 1..=last);
        out.dedup();
        out
    }
}

pub fn verify_lemma_chain(p: u64, f: u32) -> Result<SuiteReport> {
    verify_lemma_chain_with(p, f, &ChainLimits::default())
}

/// The mod-`p^2` chain behind the lemma at one `(p, f)`.
///
/// Sub-checks that need `f >= 3` are recorded as not applicable at `f = 2`.
/// The `f`-independent checks for odd `p` are emitted once, at `f = 2`.
pub fn verify_lemma_chain_with(p: u64, f: u32, limits: &ChainLimits) -> Result<SuiteReport> {
    require_prime(p)?;
    if f < 2 {
        return Err(Error::domain(format!("lemma chain needs f >= 2, got {f}")));
    }
    let pf = power(p, f)?;
    let top = pf - 1;
    let big_m = pf / p; // p^(f-1)
    let kernel = PrimePowerBinomial::new(p, 2)?;
    let p2 = kernel.modulus();
    let params = Params::pf(p, f);
    let mut records = Vec::new();

    let lhs7 = kernel.binom(top, big_m);
    let rhs7 = mul_mod(p - 1, kernel.binom(top, big_m - 1), p2);
    records.push(CongruenceRecord::check(Location::Eq7, params, lhs7, rhs7, p2));

    if f >= 3 {
        for i in limits.sample(big_m - 1) {
            if i % p == 0 {
                continue;
            }
            let num = (pf - i) % p2;
            let den = (big_m - i) % p2;
            let lhs = mul_mod(num, mod_inverse(den, p2)?, p2);
            let params = Params {
                i: Some(i),
                ..params
            };
            records.push(CongruenceRecord::check(Location::Eq9, params, lhs, 1, p2));
        }

        let small_m = big_m / p; // p^(f-2)
        let factors = small_m - 1;
        let rhs10 = kernel.binom(big_m - 1, small_m - 1);
        if factors <= limits.product_cap {
            let mut product = RatioTracker::new(p2)?;
            for j in 1..=factors {
                product.mul(pf - j * p);
                product.div(big_m - j * p);
            }
            records.push(CongruenceRecord::check(Location::Eq10, params, product.residue(), rhs10, p2));
        } else {
            records.push(CongruenceRecord::not_applicable(Location::Eq10, params, p2));
        }

        let lhs11 = kernel.binom(top, big_m - 1);
        records.push(CongruenceRecord::check(Location::Eq11, params, lhs11, rhs10, p2));
        let rhs12 = kernel.binom(p * p - 1, p - 1);
        records.push(CongruenceRecord::check(Location::Eq12, params, lhs11, rhs12, p2));
    } else {
        for loc in [Location::Eq9, Location::Eq10, Location::Eq11, Location::Eq12] {
            records.push(CongruenceRecord::not_applicable(loc, params, p2));
        }
    }

    if p >= 3 && f == 2 {
        let params = Params {
            p: Some(p),
            ..Default::default()
        };
        let lhs14 = kernel.binom(p * p - 1, p - 1);
        records.push(CongruenceRecord::check(Location::Eq14, params, lhs14, 1, p2));
        let lhs16 = kernel.binom(p * p - 1, p);
        records.push(CongruenceRecord::check(Location::Eq16, params, lhs16, p - 1, p2));
    }
    if p == 2 {
        records.push(CongruenceRecord::check(Location::Eq17, params, lhs7, 3, 4));
    }
    Ok(SuiteReport::from_records(records))
}

/// `C(s p^f - 1, p^f) ≡ s-1 (mod p)` for `s >= 2`, `p ∤ s`.
pub fn verify_eq21(s: u64, p: u64, f: u32) -> Result<CongruenceRecord> {
    require_prime(p)?;
    if s < 2 {
        return Err(Error::domain(format!("need s >= 2, got {s}")));
    }
    if s.is_multiple_of(p) {
        return Err(Error::domain(format!("{p} divides s={s}")));
    }
    let pf = power(p, f)?;
    let n = s
        .checked_mul(pf)
        .ok_or_else(|| Error::domain(format!("{s}·{p}^{f} exceeds the 64-bit input bound")))?;
    let params = Params {
        s: Some(s),
        ..Params::pf(p, f)
    };
    Ok(CongruenceRecord::check(Location::Eq21, params, lucas(n - 1, pf, p), (s - 1) % p, p))
}

/// Scan every `2 <= q <= n <= max_n`: the family of congruences holds iff
/// `q` is prime and `n` is a power of `q`.
///
/// Each record has `lhs` = whether the family holds and `rhs` = whether the
/// oracle predicts it (both as 0/1), and `k` = the first failing index.
/// A grid point where the family holds against the oracle aborts the scan
/// with [`Error::TheoremViolation`].
pub fn converse_scan(max_n: u64, jobs: usize) -> Result<SuiteReport> {
    let ns: Vec<u64> = (2..=max_n).collect();
    let rows = map_ordered(&ns, jobs, |&n| {
        (2..=n)
            .map(|q| {
                let c = theorem_classify(n, q)?;
                let predicted = c.q_is_prime && c.exponent_f.is_some();
                let params = Params {
                    n: Some(n),
                    q: Some(q),
                    k: c.verdict.first_failure.map(|w| w.index),
                    ..Default::default()
                };
                Ok(CongruenceRecord::check(
                    Location::Eq3,
                    params,
                    c.verdict.holds as u64,
                    predicted as u64,
                    2,
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SuiteReport::from_records(rows.into_iter().flatten().collect()))
}

/// Suites runnable over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Proposition,
    Lemma,
    LemmaChain,
    Eq21,
    Converse,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Proposition => "proposition",
            Suite::Lemma => "lemma",
            Suite::LemmaChain => "lemma-chain",
            Suite::Eq21 => "eq21",
            Suite::Converse => "converse",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Suite::Proposition,
            Suite::Lemma,
            Suite::LemmaChain,
            Suite::Eq21,
            Suite::Converse,
            Suite::All,
        ]
        .into_iter()
        .find(|x| x.name() == s)
        .ok_or_else(|| Error::domain(format!("unknown suite '{s}'")))
    }
}

/// Parameter ranges for [`run_suite`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteGrid {
    pub suite: Suite,
    /// Primes `p <= max_prime`.
    pub max_prime: u64,
    /// Exponents `f <= max_exponent`.
    pub max_exponent: u32,
    /// Cofactors `2 <= s <= max_s`.
    pub max_s: u64,
    /// Proposition rows are limited to `p^f <= max_power`.
    pub max_power: u64,
    /// Converse scan bound `n <= max_n`.
    pub max_n: u64,
    pub limits: ChainLimits,
    /// Records whose `p^f` is at most this are recomputed exactly.
    pub cross_check_max_power: u64,
    /// Stop cross-checking after this many records (`None`: no cap).
    pub cross_check_limit: Option<usize>,
}

impl Default for SuiteGrid {
    fn default() -> Self {
        SuiteGrid {
            suite: Suite::All,
            max_prime: 100,
            max_exponent: 8,
            max_s: 20,
            max_power: 100_000,
            max_n: 300,
            limits: ChainLimits::default(),
            cross_check_max_power: 10_000,
            cross_check_limit: None,
        }
    }
}

impl SuiteGrid {
    /// A grid that produces no records.
    pub fn empty(suite: Suite) -> Self {
        SuiteGrid {
            suite,
            max_prime: 1,
            max_exponent: 0,
            max_s: 1,
            max_power: 1,
            max_n: 1,
            ..Default::default()
        }
    }

    fn primes(&self) -> Vec<u64> {
        (2..=self.max_prime).filter(|&p| is_prime(p)).collect()
    }

    fn validate(&self) -> Result<()> {
        let Some(p) = self.primes().last().copied() else {
            return Ok(());
        };
        if self.max_exponent == 0 {
            return Ok(());
        }
        let top = power(p, self.max_exponent)?;
        if self.suite.includes(Suite::Eq21) && self.max_s >= 2 {
            top.checked_mul(self.max_s).ok_or_else(|| {
                Error::domain(format!(
                    "{}·{p}^{} exceeds the 64-bit input bound",
                    self.max_s, self.max_exponent
                ))
            })?;
        }
        Ok(())
    }
}

/// Apply `f` to every item on `jobs` workers, keeping input order.
fn map_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    if jobs <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(f).collect())
}

/// Run the selected suites over `grid`, then cross-check small records
/// against exact big-integer binomials.
///
/// Record order depends only on the grid: suites in declaration order, then
/// ascending `p`, `f`, `s` (or `n`, `q`).
pub fn run_suite(grid: &SuiteGrid, jobs: usize) -> Result<SuiteReport> {
    grid.validate()?;
    let primes = grid.primes();
    let mut report = SuiteReport {
        grid: Some(grid.clone()),
        covered_elsewhere: COVERED_ELSEWHERE
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        ..Default::default()
    };

    let pf_points = |min_f: u32, cap: u64| -> Vec<(u64, u32)> {
        primes
            .iter()
            .flat_map(|&p| {
                (min_f..=grid.max_exponent)
                    .take_while(move |&f| p.checked_pow(f).is_some_and(|v| v <= cap))
                    .map(move |f| (p, f))
            })
            .collect()
    };

    if grid.suite.includes(Suite::Proposition) {
        let points = pf_points(1, grid.max_power);
        for part in map_ordered(&points, jobs, |&(p, f)| verify_proposition(p, f))? {
            report.extend(part);
        }
    }
    if grid.suite.includes(Suite::Lemma) {
        let points = pf_points(2, u64::MAX);
        let records = map_ordered(&points, jobs, |&(p, f)| verify_lemma(p, f))?;
        report.extend(SuiteReport::from_records(records));
    }
    if grid.suite.includes(Suite::LemmaChain) {
        let points = pf_points(2, u64::MAX);
        for part in map_ordered(&points, jobs, |&(p, f)| verify_lemma_chain_with(p, f, &grid.limits))? {
            report.extend(part);
        }
    }
    if grid.suite.includes(Suite::Eq21) {
        if grid.max_s < 2 {
            report
                .warnings
                .push(format!("eq21 needs s >= 2; max_s={} yields no instances", grid.max_s));
        } else {
            let points: Vec<(u64, u32, u64)> = pf_points(1, u64::MAX)
                .into_iter()
                .flat_map(|(p, f)| (2..=grid.max_s).filter(move |s| s % p != 0).map(move |s| (p, f, s)))
                .collect();
            let records = map_ordered(&points, jobs, |&(p, f, s)| verify_eq21(s, p, f))?;
            report.extend(SuiteReport::from_records(records));
        }
    }
    if grid.suite.includes(Suite::Converse) {
        report.extend(converse_scan(grid.max_n, jobs)?);
    }

    report.cross_check = cross_check(&report.records, grid.cross_check_max_power, grid.cross_check_limit);
    Ok(report)
}

/// Recompute `lhs` from exact big integers for every eligible record whose
/// `p^f` is at most `max_power`.
pub fn cross_check(records: &[CongruenceRecord], max_power: u64, limit: Option<usize>) -> CrossCheck {
    let mut out = CrossCheck::default();
    let mut row = ExactRow::default();
    for r in records {
        if limit.is_some_and(|l| out.checked as usize >= l) {
            break;
        }
        let Some(lhs) = r.lhs else { continue };
        let Some(expected) = exact_lhs(r, max_power, &mut row) else {
            continue;
        };
        out.checked += 1;
        if expected != lhs {
            out.mismatches.push(r.clone());
        }
    }
    out
}

/// Exact `C(n, k)` for consecutive `k`, so proposition rows cost one big
/// multiply-divide per record.
#[derive(Default)]
struct ExactRow {
    n: u64,
    k: u64,
    value: Option<BigUint>,
}

impl ExactRow {
    fn get(&mut self, n: u64, k: u64) -> &BigUint {
        let advance = self.value.is_some() && (self.n == n && self.k + 1 == k);
        let same = self.value.is_some() && (self.n == n && self.k == k);
        if advance {
            let v = self.value.take().unwrap() * (n - self.k) / k;
            self.value = Some(v);
        } else if !same {
            self.value = Some(binom_exact(n, k as i64));
        }
        self.n = n;
        self.k = k;
        self.value.as_ref().unwrap()
    }
}

fn exact_lhs(r: &CongruenceRecord, max_power: u64, row: &mut ExactRow) -> Option<u64> {
    let p = r.params.p?;
    let m = r.modulus;
    let exact = |a: u64, b: u64| reduce(&binom_exact(a, b as i64), m);
    let pf = match r.params.f {
        Some(f) => p.checked_pow(f as u32)?,
        None => p * p,
    };
    if pf > max_power {
        return None;
    }
    let big_m = pf / p;
    Some(match r.location {
        Location::Eq1 | Location::Eq2 => reduce(row.get(pf - 1, r.params.k?), m),
        Location::Eq6 | Location::Eq7 | Location::Eq17 => exact(pf - 1, big_m),
        Location::Eq9 => {
            // smallest x in [0, p^2) with x (p^(f-1) - i) ≡ p^f - i, by search
            let i = r.params.i?;
            let (num, den) = ((pf - i) % m, (big_m - i) % m);
            (0..m).find(|&x| x * den % m == num)?
        }
        Location::Eq10 => {
            let (mut num, mut den) = (BigUint::one(), BigUint::one());
            for j in 1..big_m / p {
                num *= pf - j * p;
                den *= big_m - j * p;
            }
            debug_assert!((&num % &den).is_zero());
            reduce(&(num / den), m)
        }
        Location::Eq11 | Location::Eq12 => exact(pf - 1, big_m - 1),
        Location::Eq14 => exact(p * p - 1, p - 1),
        Location::Eq16 => exact(p * p - 1, p),
        Location::Eq21 => exact(r.params.s? * pf - 1, pf),
        Location::Eq3 => return None,
    })
}
