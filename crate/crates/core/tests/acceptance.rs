//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use binomlab::criteria::first_disagreement;
use binomlab::verify::{ChainLimits, CrossCheck};
use binomlab::{
    binom_mod, cai_granville_test, row_stream, run_suite, theorem_classify, verify_lemma,
    verify_proposition, Criterion, Error, ModulusForm, Suite, SuiteGrid, SuiteReport,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TIME_LIMIT: Duration = Duration::from_secs(120);

// ---- independent oracles -------------------------------------------------

fn oracle_is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn oracle_is_power(n: u64, q: u64) -> bool {
    let mut x = q;
    while x < n {
        x = match x.checked_mul(q) {
            Some(v) => v,
            None => return false,
        };
    }
    x == n
}

/// Exact `C(a, b)` by the multiplicative formula over big integers.
fn oracle_binom(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    (0..b).fold(BigUint::from(1u32), |acc, j| acc * (a - j) / (j + 1))
}

fn oracle_mod(a: u64, b: u64, m: u64) -> u64 {
    let r = oracle_binom(a, b) % m;
    r.iter_u64_digits().next().unwrap_or(0)
}

// ---- bookkeeping ---------------------------------------------------------

struct Outcome {
    pass: bool,
    detail: String,
    theorem_violations: usize,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            theorem_violations: 0,
        }
    }
}

fn report_outcome(report: &SuiteReport) -> (bool, String) {
    let CrossCheck { checked, mismatches } = &report.cross_check;
    let ok = report.totals.failed == 0 && mismatches.is_empty() && report.totals.checked > 0;
    (
        ok,
        format!(
            "{} checked, {} failed, {} n/a; oracle cross-check {} records, {} mismatches",
            report.totals.checked,
            report.totals.failed,
            report.totals.not_applicable,
            checked,
            mismatches.len()
        ),
    )
}

// ---- criteria ------------------------------------------------------------

fn theorem_biconditional() -> Outcome {
    let start = Instant::now();
    let (mut mismatches, mut violations, mut holding) = (0u64, 0usize, 0u64);
    for n in 2..=2000u64 {
        for q in 2..=n {
            let predicted = oracle_is_prime(q) && oracle_is_power(n, q);
            match theorem_classify(n, q) {
                Ok(c) => {
                    holding += c.verdict.holds as u64;
                    if c.verdict.holds != predicted {
                        mismatches += 1;
                    }
                }
                Err(Error::TheoremViolation { .. }) => {
                    violations += 1;
                    mismatches += 1;
                }
                Err(e) => panic!("classify({n}, {q}): {e}"),
            }
        }
    }
    let elapsed = start.elapsed();
    let mut o = Outcome::new(
        mismatches == 0 && elapsed < TIME_LIMIT,
        format!("{holding} holding pairs, {mismatches} mismatches, {:.2?}", elapsed),
    );
    o.theorem_violations = violations;
    o
}

fn proposition() -> Outcome {
    let (mut records, mut failed) = (0usize, 0u64);
    for p in (2..=50u64).filter(|&p| oracle_is_prime(p)) {
        for f in (1u32..).take_while(|&f| p.pow(f) <= 100_000) {
            let r = verify_proposition(p, f).expect("valid grid point");
            assert_eq!(r.records.len() as u64, p.pow(f));
            records += r.records.len();
            failed += r.totals.failed;
        }
    }
    Outcome::new(failed == 0, format!("{records} congruences, {failed} failures"))
}

fn lemma() -> Outcome {
    let (mut count, mut failed, mut exact_checked, mut exact_bad) = (0, 0, 0, 0);
    for p in (2..=100u64).filter(|&p| oracle_is_prime(p)) {
        for f in 2..=8u32 {
            let r = verify_lemma(p, f).expect("valid grid point");
            count += 1;
            let want = if p == 2 { 3 } else { p - 1 };
            if r.rhs != Some(want) || r.modulus != p * p || !r.passed() {
                failed += 1;
            }
            let pf = p.pow(f);
            if pf <= 10_000 {
                exact_checked += 1;
                if Some(oracle_mod(pf - 1, pf / p, p * p)) != r.lhs {
                    exact_bad += 1;
                }
            }
        }
    }
    Outcome::new(
        failed == 0 && exact_bad == 0,
        format!("{count} instances, {failed} failures; {exact_checked} exact, {exact_bad} mismatches"),
    )
}

fn lemma_chain() -> Outcome {
    let grid = SuiteGrid {
        suite: Suite::LemmaChain,
        max_prime: 30,
        max_exponent: 5,
        limits: ChainLimits::default(),
        ..SuiteGrid::empty(Suite::LemmaChain)
    };
    let report = run_suite(&grid, 1).expect("valid grid");
    let (ok, detail) = report_outcome(&report);
    let tags: std::collections::BTreeSet<_> = report.records.iter().map(|r| r.location.tag()).collect();
    let all_present = ["eq7", "eq9", "eq10", "eq11", "eq12", "eq14", "eq16", "eq17"]
        .iter()
        .all(|t| tags.contains(t));
    Outcome::new(ok && all_present, detail)
}

fn eq21() -> Outcome {
    let grid = SuiteGrid {
        max_prime: 30,
        max_exponent: 4,
        max_s: 20,
        ..SuiteGrid::empty(Suite::Eq21)
    };
    let report = run_suite(&grid, 1).expect("valid grid");
    let expected: usize = (2..=30u64)
        .filter(|&p| oracle_is_prime(p))
        .map(|p| 4 * (2..=20u64).filter(|s| s % p != 0).count())
        .sum();
    let (ok, detail) = report_outcome(&report);
    Outcome::new(ok && report.records.len() == expected, detail)
}

fn criteria_agreement() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for c in [
        Criterion::DeutschGessel,
        Criterion::Babbage,
        Criterion::Piza,
        Criterion::MannShanks,
        Criterion::GouldGreig,
    ] {
        let mut bad = 0;
        for n in (2..=5000u64).filter(|&n| c.accepts(n)) {
            if c.run(n).expect("in domain").holds != oracle_is_prime(n) {
                bad += 1;
            }
        }
        ok &= bad == 0;
        lines.push(format!("{c}: {bad}"));
    }
    Outcome::new(ok, format!("disagreements {}", lines.join(", ")))
}

fn cai_granville_range() -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for n in 2..=100_000u64 {
        if cai_granville_test(n).expect("n >= 2").holds != oracle_is_prime(n) {
            bad += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        bad == 0 && elapsed < TIME_LIMIT,
        format!("{bad} disagreements, {:.2?}", elapsed),
    )
}

fn kernel_equivalence() -> Outcome {
    let mut bad = 0u64;
    let mut count = 0u64;
    for a in 0..=300u64 {
        let row: Vec<BigUint> = (0..=a).map(|b| oracle_binom(a, b)).collect();
        for (b, exact) in row.iter().enumerate() {
            for m in 1..=60u64 {
                count += 1;
                let want = (exact % m).iter_u64_digits().next().unwrap_or(0);
                if binom_mod(a, b as u64, m).unwrap() != want {
                    bad += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut row_bad = 0u64;
    for _ in 0..50 {
        let n = rng.gen_range(0..=2000u64);
        let m = rng.gen_range(1..=10_000u64);
        for (k, r) in row_stream(n, m).unwrap().enumerate() {
            if r != binom_mod(n, k as u64, m).unwrap() {
                row_bad += 1;
            }
        }
    }
    Outcome::new(
        bad == 0 && row_bad == 0,
        format!("{count} residues, {bad} mismatches; 50 random rows, {row_bad} mismatches"),
    )
}

fn modulus_form_discrepancy() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for c in [Criterion::MannShanks, Criterion::GouldGreig] {
        match first_disagreement(c, ModulusForm::PaperLiteral, 2, 100).unwrap() {
            Some((k, v)) => {
                let w = v.first_failure.map_or("no witness".to_string(), |w| {
                    format!("n={}: {} ≠ {} (mod {})", w.index, w.lhs, w.rhs, w.modulus)
                });
                notes.push(format!(
                    "{c} (mod k) first disagrees at k={k} (prime={}, verdict={}; {w})",
                    oracle_is_prime(k),
                    v.holds
                ));
            }
            None => {
                ok = false;
                notes.push(format!("{c} (mod k) agrees with primality on 2..=100"));
            }
        }
        let row_index = first_disagreement(c, ModulusForm::RowIndex, 2, 100).unwrap();
        ok &= row_index.is_none();
    }
    Outcome::new(ok, notes.join("; "))
}

type Check = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Check> = vec![
        (1, "converse biconditional, n <= 2000", theorem_biconditional),
        (2, "p^f - 1 row alternates mod p", proposition),
        (3, "C(p^f-1, p^(f-1)) mod p^2", lemma),
        (4, "mod p^2 proof chain", lemma_chain),
        (5, "C(s p^f - 1, p^f) ≡ s-1 mod p", eq21),
        (6, "criteria agree with primality, 2..5000", criteria_agreement),
        (7, "shortened range, 2..100000", cai_granville_range),
        (8, "kernel oracle equivalence", kernel_equivalence),
        (9, "modulus-form discrepancy", modulus_form_discrepancy),
    ];
    let mut all_pass = true;
    let mut violations = 0;
    for (id, name, run) in criteria {
        let o = run();
        violations += o.theorem_violations;
        all_pass &= o.pass;
        println!("[{}] criterion {id}: {name}: {}", verdict(o.pass), o.detail);
    }
    let pass = violations == 0;
    all_pass &= pass;
    println!(
        "[{}] criterion 10: no theorem violation across 1-5: {violations} violations",
        verdict(pass)
    );
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
