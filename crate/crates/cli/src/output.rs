//! Report envelopes and their JSON / CSV encodings.
//!
//! Every JSON document has the keys `command`, `version`, `params`, a body
//! (`verdict` or `records`), `totals` and `elapsed_ms`. Keys are emitted in
//! declaration order, so output is byte-stable apart from `elapsed_ms`.

use std::io::Write;

use binomlab::verify::{CongruenceRecord, CrossCheck, Totals};
use binomlab::{ClassificationResult, CriterionVerdict};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope<P, B> {
    pub command: String,
    pub version: String,
    pub params: P,
    #[serde(flatten)]
    pub body: B,
    pub elapsed_ms: u64,
}

impl<P, B> Envelope<P, B> {
    pub fn new(command: &str, params: P, body: B, elapsed_ms: u64) -> Self {
        Envelope {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            params,
            body,
            elapsed_ms,
        }
    }
}

/// Scan counts attached to single-verdict commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanTotals {
    pub checked: u64,
    pub failed: u64,
}

impl ScanTotals {
    pub fn of(v: &CriterionVerdict) -> Self {
        ScanTotals {
            checked: v.checked_count,
            failed: v.first_failure.is_some() as u64,
        }
    }
}

// ---- test ----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestParams {
    pub number: u64,
    pub criterion: String,
    pub modulus_form: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub prime: bool,
    /// Name of the scanned index (`k`, `m` or `n`) in the witness.
    pub index_name: String,
    #[serde(flatten)]
    pub scan: CriterionVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestBody {
    pub verdict: TestVerdict,
    pub totals: ScanTotals,
}

pub type TestOutput = Envelope<TestParams, TestBody>;

// ---- classify ------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub n: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyBody {
    pub verdict: ClassificationResult,
    pub totals: ScanTotals,
}

pub type ClassifyOutput = Envelope<ClassifyParams, ClassifyBody>;

// ---- row -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowParams {
    pub n: u64,
    pub m: u64,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowTotals {
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowBody {
    pub records: Vec<u64>,
    pub totals: RowTotals,
}

pub type RowOutput = Envelope<RowParams, RowBody>;

// ---- verify --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub suite: String,
    pub max_prime: u64,
    pub max_exponent: u32,
    pub max_s: u64,
    pub max_n: u64,
    pub max_power: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyBody {
    pub records: Vec<CongruenceRecord>,
    pub totals: Totals,
    pub cross_check: CrossCheck,
    pub covered_elsewhere: std::collections::BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

pub type VerifyOutput = Envelope<VerifyParams, VerifyBody>;

pub const VERIFY_CSV_HEADER: [&str; 12] =
    ["location", "p", "f", "k", "s", "i", "n", "q", "lhs", "rhs", "modulus", "pass"];

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn verify_csv_row(r: &CongruenceRecord) -> [String; 12] {
    let p = &r.params;
    [
        r.location.tag().to_string(),
        opt(p.p),
        opt(p.f),
        opt(p.k),
        opt(p.s),
        opt(p.i),
        opt(p.n),
        opt(p.q),
        opt(r.lhs),
        opt(r.rhs),
        r.modulus.to_string(),
        match r.pass {
            Some(true) => "true".into(),
            Some(false) => "false".into(),
            None => "n/a".into(),
        },
    ]
}

// ---- bench ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchParams {
    pub criteria: Vec<String>,
    pub start: u64,
    pub end: u64,
    pub repeat: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub criterion: String,
    pub inputs: u64,
    pub congruences_checked: u64,
    pub primes: u64,
    pub disagreements: u64,
    /// Wall time over all repeats; informational.
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchTotals {
    pub inputs: u64,
    pub congruences_checked: u64,
    pub disagreements: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchBody {
    pub records: Vec<BenchRecord>,
    pub totals: BenchTotals,
}

pub type BenchOutput = Envelope<BenchParams, BenchBody>;

// ---- writers -------------------------------------------------------------

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_csv<I, R>(out: &mut dyn Write, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
