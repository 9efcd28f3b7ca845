//! The `binomlab` command line.
//!
//! Exit codes: 0 success / prime / congruences hold, 1 composite / failing
//! congruence, 2 usage or domain error, 3 theorem violation.

pub mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use binomlab::verify::{ChainLimits, SuiteReport};
use binomlab::{
    is_prime, row_stream, run_suite, theorem_classify, Criterion, CriterionVerdict, Error,
    ModulusForm, Suite, SuiteGrid,
};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error as ThisError;

use output::*;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("theorem violation: {0}")]
    Violation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolation { .. } => CliError::Violation(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 3,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FormArg {
    #[default]
    RowIndex,
    PaperLiteral,
}

impl From<FormArg> for ModulusForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::RowIndex => ModulusForm::RowIndex,
            FormArg::PaperLiteral => ModulusForm::PaperLiteral,
        }
    }
}

impl FormArg {
    fn name(self) -> &'static str {
        match self {
            FormArg::RowIndex => "row-index",
            FormArg::PaperLiteral => "paper-literal",
        }
    }
}

/// Decimal integers only: no sign, no radix prefix.
fn decimal(s: &str) -> Result<u64, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("'{s}' is not a decimal integer"));
    }
    s.parse::<u64>()
        .map_err(|_| format!("'{s}' exceeds the 64-bit input bound"))
}

fn decimal_u32(s: &str) -> Result<u32, String> {
    let v = decimal(s)?;
    u32::try_from(v).map_err(|_| format!("'{s}' is too large"))
}

fn criterion_arg(s: &str) -> Result<Criterion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn suite_arg(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "binomlab", version, about = "Binomial congruence primality criteria")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = "BINOMLAB_JOBS", default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a number for primality with one criterion.
    Test {
        #[arg(value_parser = decimal)]
        number: u64,
        #[arg(long, value_parser = criterion_arg, default_value = "deutsch-gessel")]
        criterion: Criterion,
        /// Modulus used by mann-shanks and gould-greig.
        #[arg(long, value_enum, default_value_t = FormArg::RowIndex)]
        modulus_form: FormArg,
    },
    /// Check C(n-1, k) ≡ (-1)^k (mod q) for every k and classify (n, q).
    Classify {
        #[arg(value_parser = decimal)]
        n: u64,
        #[arg(value_parser = decimal)]
        q: u64,
    },
    /// Print C(n, k) mod m for k = 0..=min(limit, n).
    Row {
        #[arg(value_parser = decimal)]
        n: u64,
        #[arg(value_parser = decimal)]
        m: u64,
        #[arg(long, value_parser = decimal)]
        limit: Option<u64>,
    },
    /// Verify congruence families over a parameter grid.
    Verify {
        #[arg(long, value_parser = suite_arg, default_value = "all")]
        suite: Suite,
        #[arg(long, value_parser = decimal, default_value = "100")]
        max_prime: u64,
        #[arg(long, value_parser = decimal_u32, default_value = "8")]
        max_exponent: u32,
        #[arg(long, value_parser = decimal, default_value = "20")]
        max_s: u64,
        /// Bound for the converse scan over 2 <= q <= n <= max-n.
        #[arg(long, value_parser = decimal, default_value = "300")]
        max_n: u64,
        /// Proposition rows are limited to p^f <= max-power.
        #[arg(long, value_parser = decimal, default_value = "100000")]
        max_power: u64,
        /// Write the report here (atomically) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time criteria over a range and count checks and oracle disagreements.
    Bench {
        /// Comma-separated criterion names (default: all).
        #[arg(long, value_delimiter = ',', value_parser = criterion_arg)]
        criteria: Vec<Criterion>,
        /// Inclusive range A..B.
        #[arg(long, default_value = "2..1000")]
        range: String,
        #[arg(long, value_parser = decimal_u32, default_value = "1")]
        repeat: u32,
        #[arg(long, value_enum, default_value_t = FormArg::RowIndex)]
        modulus_form: FormArg,
    },
}

/// Run a parsed command, writing the report to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let start = Instant::now();
    let elapsed = || start.elapsed().as_millis() as u64;
    match &cli.command {
        Command::Test {
            number,
            criterion,
            modulus_form,
        } => cmd_test(*number, *criterion, *modulus_form, cli.format, out, elapsed),
        Command::Classify { n, q } => cmd_classify(*n, *q, cli.format, out, elapsed),
        Command::Row { n, m, limit } => cmd_row(*n, *m, *limit, cli.format, out, elapsed),
        Command::Verify {
            suite,
            max_prime,
            max_exponent,
            max_s,
            max_n,
            max_power,
            out: path,
        } => {
            let grid = SuiteGrid {
                suite: *suite,
                max_prime: *max_prime,
                max_exponent: *max_exponent,
                max_s: *max_s,
                max_n: *max_n,
                max_power: *max_power,
                limits: ChainLimits::default(),
                ..SuiteGrid::default()
            };
            match path {
                Some(path) => {
                    let mut buf = Vec::new();
                    let code = cmd_verify(&grid, cli.jobs, cli.format, &mut buf, elapsed)?;
                    write_atomic(path, &buf)?;
                    Ok(code)
                }
                None => cmd_verify(&grid, cli.jobs, cli.format, out, elapsed),
            }
        }
        Command::Bench {
            criteria,
            range,
            repeat,
            modulus_form,
        } => cmd_bench(criteria, range, *repeat, *modulus_form, cli.format, out, elapsed),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn index_name(c: Criterion) -> &'static str {
    match c {
        Criterion::DeutschGessel | Criterion::CaiGranville | Criterion::Piza => "k",
        Criterion::Babbage => "m",
        Criterion::MannShanks | Criterion::GouldGreig => "n",
    }
}

fn cmd_test(
    number: u64,
    criterion: Criterion,
    form: FormArg,
    format: Format,
    out: &mut dyn Write,
    elapsed: impl Fn() -> u64,
) -> Result<u8, CliError> {
    if !criterion.accepts(number) {
        let need = if criterion == Criterion::Piza {
            "an odd integer >= 3"
        } else {
            "an integer >= 2"
        };
        return Err(CliError::Usage(format!("{criterion} needs {need}, got {number}")));
    }
    let v = criterion.run_with(number, form.into())?;
    let name = index_name(criterion);
    match format {
        Format::Text => match &v.first_failure {
            None => writeln!(out, "prime")?,
            Some(w) => writeln!(out, "composite; {name}={}: {w}", w.index)?,
        },
        Format::Json => {
            let doc: TestOutput = Envelope::new(
                "test",
                TestParams {
                    number,
                    criterion: criterion.name().into(),
                    modulus_form: form.name().into(),
                },
                TestBody {
                    totals: ScanTotals::of(&v),
                    verdict: TestVerdict {
                        prime: v.holds,
                        index_name: name.into(),
                        scan: v.clone(),
                    },
                },
                elapsed(),
            );
            write_json(out, &doc)?;
        }
        Format::Csv => {
            let w = v.first_failure;
            write_csv(
                out,
                &["number", "criterion", "prime", "checked", "index", "lhs", "rhs", "modulus"],
                [[
                    number.to_string(),
                    criterion.name().to_string(),
                    v.holds.to_string(),
                    v.checked_count.to_string(),
                    w.map(|w| w.index.to_string()).unwrap_or_default(),
                    w.map(|w| w.lhs.to_string()).unwrap_or_default(),
                    w.map(|w| w.rhs.to_string()).unwrap_or_default(),
                    w.map(|w| w.modulus.to_string()).unwrap_or_default(),
                ]],
            )?;
        }
    }
    Ok(if v.holds { 0 } else { 1 })
}

fn cmd_classify(
    n: u64,
    q: u64,
    format: Format,
    out: &mut dyn Write,
    elapsed: impl Fn() -> u64,
) -> Result<u8, CliError> {
    if n < 2 || q < 2 {
        return Err(CliError::Usage(format!("classify needs n, q >= 2, got n={n}, q={q}")));
    }
    let c = theorem_classify(n, q)?;
    let v = &c.verdict;
    match format {
        Format::Text => match (&v.first_failure, c.exponent_f) {
            (None, Some(f)) => writeln!(out, "holds; q={q} prime; n={q}^{f}")?,
            // theorem_classify rejects a holding family without a power
            (None, None) => unreachable!("holding family without n = q^f"),
            (Some(w), _) => writeln!(out, "fails at k={} ({} ≠ {} mod {})", w.index, w.lhs, w.rhs, w.modulus)?,
        },
        Format::Json => {
            let doc: ClassifyOutput = Envelope::new(
                "classify",
                ClassifyParams { n, q },
                ClassifyBody {
                    totals: ScanTotals::of(v),
                    verdict: c.clone(),
                },
                elapsed(),
            );
            write_json(out, &doc)?;
        }
        Format::Csv => {
            let w = v.first_failure;
            write_csv(
                out,
                &["n", "q", "holds", "q_is_prime", "f", "checked", "index", "lhs", "rhs", "modulus"],
                [[
                    n.to_string(),
                    q.to_string(),
                    v.holds.to_string(),
                    c.q_is_prime.to_string(),
                    c.exponent_f.map(|f| f.to_string()).unwrap_or_default(),
                    v.checked_count.to_string(),
                    w.map(|w| w.index.to_string()).unwrap_or_default(),
                    w.map(|w| w.lhs.to_string()).unwrap_or_default(),
                    w.map(|w| w.rhs.to_string()).unwrap_or_default(),
                    w.map(|w| w.modulus.to_string()).unwrap_or_default(),
                ]],
            )?;
        }
    }
    Ok(if v.holds { 0 } else { 1 })
}

fn cmd_row(
    n: u64,
    m: u64,
    limit: Option<u64>,
    format: Format,
    out: &mut dyn Write,
    elapsed: impl Fn() -> u64,
) -> Result<u8, CliError> {
    if m == 0 {
        return Err(CliError::Usage("modulus must be at least 1".into()));
    }
    let last = limit.map_or(n, |l| l.min(n));
    let residues = row_stream(n, m)?.take(last as usize + 1);
    match format {
        Format::Text => {
            for r in residues {
                writeln!(out, "{r}")?;
            }
        }
        Format::Json => {
            let records: Vec<u64> = residues.collect();
            let doc: RowOutput = Envelope::new(
                "row",
                RowParams { n, m, limit },
                RowBody {
                    totals: RowTotals {
                        count: records.len() as u64,
                    },
                    records,
                },
                elapsed(),
            );
            write_json(out, &doc)?;
        }
        Format::Csv => {
            let rows = residues.enumerate().map(|(k, r)| [k.to_string(), r.to_string()]);
            write_csv(out, &["k", "residue"], rows)?;
        }
    }
    Ok(0)
}

fn cmd_verify(
    grid: &SuiteGrid,
    jobs: usize,
    format: Format,
    out: &mut dyn Write,
    elapsed: impl Fn() -> u64,
) -> Result<u8, CliError> {
    let report = run_suite(grid, jobs.max(1))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match format {
        Format::Text => write_verify_text(out, grid, &report)?,
        Format::Json => {
            let doc: VerifyOutput = Envelope::new(
                "verify",
                VerifyParams {
                    suite: grid.suite.name().into(),
                    max_prime: grid.max_prime,
                    max_exponent: grid.max_exponent,
                    max_s: grid.max_s,
                    max_n: grid.max_n,
                    max_power: grid.max_power,
                },
                VerifyBody {
                    records: report.records.clone(),
                    totals: report.totals,
                    cross_check: report.cross_check.clone(),
                    covered_elsewhere: report.covered_elsewhere.clone(),
                    warnings: report.warnings.clone(),
                },
                elapsed(),
            );
            write_json(out, &doc)?;
        }
        Format::Csv => {
            write_csv(out, &VERIFY_CSV_HEADER, report.records.iter().map(verify_csv_row))?;
        }
    }
    Ok(if report.is_clean() { 0 } else { 1 })
}

fn write_verify_text(out: &mut dyn Write, grid: &SuiteGrid, report: &SuiteReport) -> Result<(), CliError> {
    writeln!(
        out,
        "suite {}: primes <= {}, f <= {}, s <= {}, n <= {}, proposition p^f <= {}",
        grid.suite.name(),
        grid.max_prime,
        grid.max_exponent,
        grid.max_s,
        grid.max_n,
        grid.max_power
    )?;
    let mut by_location = std::collections::BTreeMap::new();
    for r in &report.records {
        let e = by_location.entry(r.location).or_insert([0u64; 3]);
        match r.pass {
            Some(true) => e[0] += 1,
            Some(false) => e[1] += 1,
            None => e[2] += 1,
        }
    }
    for (loc, [pass, fail, na]) in by_location {
        writeln!(out, "{:<5} passed {pass}, failed {fail}, n/a {na}", loc.tag())?;
    }
    for r in report.records.iter().filter(|r| r.failed()) {
        let row = verify_csv_row(r);
        writeln!(out, "FAIL {}", row.join(","))?;
    }
    for r in &report.cross_check.mismatches {
        let row = verify_csv_row(r);
        writeln!(out, "ORACLE MISMATCH {}", row.join(","))?;
    }
    let t = report.totals;
    writeln!(
        out,
        "total: {} records, {} checked, {} passed, {} failed, {} n/a; oracle cross-check {} records, {} mismatches",
        report.records.len(),
        t.checked,
        t.passed,
        t.failed,
        t.not_applicable,
        report.cross_check.checked,
        report.cross_check.mismatches.len()
    )?;
    Ok(())
}

fn parse_range(s: &str) -> Result<(u64, u64), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| CliError::Usage(format!("range '{s}' is not of the form A..B")))?;
    let a = decimal(a.trim()).map_err(CliError::Usage)?;
    let b = decimal(b.trim()).map_err(CliError::Usage)?;
    if a > b {
        return Err(CliError::Usage(format!("range {a}..{b} is empty")));
    }
    Ok((a, b))
}

fn cmd_bench(
    criteria: &[Criterion],
    range: &str,
    repeat: u32,
    form: FormArg,
    format: Format,
    out: &mut dyn Write,
    elapsed: impl Fn() -> u64,
) -> Result<u8, CliError> {
    let (lo, hi) = parse_range(range)?;
    if repeat == 0 {
        return Err(CliError::Usage("repeat must be at least 1".into()));
    }
    let criteria = if criteria.is_empty() {
        Criterion::ALL.to_vec()
    } else {
        criteria.to_vec()
    };
    let mut records = Vec::new();
    for &c in &criteria {
        let inputs: Vec<u64> = (lo..=hi).filter(|&n| c.accepts(n)).collect();
        let started = Instant::now();
        let mut verdicts: Vec<CriterionVerdict> = Vec::new();
        for round in 0..repeat {
            let run: Vec<CriterionVerdict> = inputs
                .iter()
                .map(|&n| c.run_with(n, form.into()))
                .collect::<Result<_, _>>()?;
            if round == 0 {
                verdicts = run;
            }
        }
        let wall = started.elapsed().as_millis() as u64;
        records.push(BenchRecord {
            criterion: c.name().into(),
            inputs: inputs.len() as u64,
            congruences_checked: verdicts.iter().map(|v| v.checked_count).sum(),
            primes: verdicts.iter().filter(|v| v.holds).count() as u64,
            disagreements: inputs
                .iter()
                .zip(&verdicts)
                .filter(|(&n, v)| v.holds != is_prime(n))
                .count() as u64,
            elapsed_ms: wall,
        });
    }
    let totals = BenchTotals {
        inputs: records.iter().map(|r| r.inputs).sum(),
        congruences_checked: records.iter().map(|r| r.congruences_checked).sum(),
        disagreements: records.iter().map(|r| r.disagreements).sum(),
    };
    match format {
        Format::Text => {
            writeln!(out, "range {lo}..{hi}, repeat {repeat}")?;
            for r in &records {
                writeln!(
                    out,
                    "{:<15} inputs {:>8}  checked {:>12}  primes {:>7}  disagreements {}  {} ms",
                    r.criterion, r.inputs, r.congruences_checked, r.primes, r.disagreements, r.elapsed_ms
                )?;
            }
        }
        Format::Json => {
            let doc: BenchOutput = Envelope::new(
                "bench",
                BenchParams {
                    criteria: criteria.iter().map(|c| c.name().to_string()).collect(),
                    start: lo,
                    end: hi,
                    repeat,
                },
                BenchBody { records, totals },
                elapsed(),
            );
            write_json(out, &doc)?;
        }
        Format::Csv => {
            let rows = records.iter().map(|r| {
                [
                    r.criterion.clone(),
                    r.inputs.to_string(),
                    r.congruences_checked.to_string(),
                    r.primes.to_string(),
                    r.disagreements.to_string(),
                    r.elapsed_ms.to_string(),
                ]
            });
            write_csv(
                out,
                &["criterion", "inputs", "congruences_checked", "primes", "disagreements", "elapsed_ms"],
                rows,
            )?;
        }
    }
    Ok(if totals.disagreements == 0 { 0 } else { 1 })
}
