use std::process::{Command, Output};

use binomlab_cli::output::{
    BenchOutput, ClassifyOutput, RowOutput, TestOutput, VerifyOutput, VERIFY_CSV_HEADER,
};
use binomlab_cli::{run, Cli};
use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binomlab"))
        .args(args)
        .env_remove("BINOMLAB_JOBS")
        .output()
        .expect("spawn binomlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Run in-process, returning (exit code, stdout).
fn run_args(args: &[&str]) -> (u8, String) {
    let cli = Cli::try_parse_from(std::iter::once("binomlab").chain(args.iter().copied())).unwrap();
    let mut buf = Vec::new();
    let code = run(&cli, &mut buf).unwrap();
    (code, String::from_utf8(buf).unwrap())
}

fn json<T: DeserializeOwned>(args: &[&str]) -> (u8, T, String) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, text) = run_args(&full);
    (code, serde_json::from_str(&text).unwrap(), text)
}

fn round_trips<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(doc: &T) {
    let again: T = serde_json::from_str(&serde_json::to_string(doc).unwrap()).unwrap();
    assert_eq!(&again, doc);
}

fn without_elapsed(text: &str) -> serde_json::Value {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("elapsed_ms");
                map.values_mut().for_each(strip);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    strip(&mut v);
    v
}

#[test]
fn test_prime_and_composite() {
    let o = bin(&["test", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "prime\n");

    let o = bin(&["test", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "composite; k=2: 5 ≠ 1 (mod 8)\n");
}

#[test]
fn test_rejects_out_of_domain_input() {
    let o = bin(&["test", "8", "--criterion", "piza"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    for bad in ["0x10", "-3", "1e3", "18446744073709551616"] {
        assert_eq!(bin(&["test", bad]).status.code(), Some(2), "{bad}");
    }
    assert_eq!(bin(&["test", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["test", "7", "--criterion", "nope"]).status.code(), Some(2));
}

#[test]
fn test_every_criterion_names_its_index() {
    for (crit, n, prefix) in [
        ("deutsch-gessel", "8", "composite; k="),
        ("cai-granville", "25", "composite; k=5:"),
        ("babbage", "4", "composite; m=2:"),
        ("piza", "9", "composite; k=3:"),
        ("mann-shanks", "9", "composite; n=3:"),
        ("gould-greig", "9", "composite; n=3:"),
    ] {
        let o = bin(&["test", n, "--criterion", crit]);
        assert_eq!(o.status.code(), Some(1), "{crit}");
        assert!(stdout(&o).starts_with(prefix), "{crit}: {}", stdout(&o));
        let o = bin(&["test", "13", "--criterion", crit]);
        assert_eq!(o.status.code(), Some(0), "{crit}");
    }
}

#[test]
fn classify_examples() {
    let o = bin(&["classify", "9", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "holds; q=3 prime; n=3^2\n");

    let o = bin(&["classify", "9", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("fails at k=3"));

    let o = bin(&["classify", "4", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "holds; q=2 prime; n=2^2\n");

    assert_eq!(bin(&["classify", "1", "2"]).status.code(), Some(2));
}

#[test]
fn row_examples() {
    assert_eq!(stdout(&bin(&["row", "4", "6"])), "1\n4\n0\n4\n1\n");
    assert_eq!(stdout(&bin(&["row", "8", "3"])), "1\n2\n1\n2\n1\n2\n1\n2\n1\n");
    assert_eq!(stdout(&bin(&["row", "0", "5"])), "1\n");
    assert_eq!(stdout(&bin(&["row", "10", "7", "--limit", "2"])), "1\n3\n3\n");
    assert_eq!(bin(&["row", "4", "0"]).status.code(), Some(2));
}

#[test]
fn verify_lemma_grid() {
    let (code, doc, _) = json::<VerifyOutput>(&[
        "verify", "--suite", "lemma", "--max-prime", "7", "--max-exponent", "3",
    ]);
    assert_eq!(code, 0);
    // primes {2,3,5,7} x f in {2,3}
    assert_eq!(doc.body.records.len(), 8);
    assert_eq!(doc.body.totals.failed, 0);
    assert!(doc.body.records.iter().all(|r| r.location.tag() == "eq6"));
    round_trips(&doc);
}

#[test]
fn verify_converse_is_clean() {
    let o = bin(&["verify", "--suite", "converse", "--max-n", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(" 0 failed"));
}

#[test]
fn verify_eq21_with_no_instances_warns() {
    let o = bin(&["verify", "--suite", "eq21", "--max-prime", "5", "--max-s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let (code, doc, _) = json::<VerifyOutput>(&["verify", "--suite", "eq21", "--max-prime", "5", "--max-s", "1"]);
    assert_eq!(code, 0);
    assert!(doc.body.records.is_empty());
    assert_eq!(doc.body.warnings.len(), 1);
}

#[test]
fn verify_csv_matches_json() {
    let args = ["verify", "--suite", "all", "--max-prime", "11", "--max-exponent", "3", "--max-s", "6", "--max-n", "40"];
    let (_, doc, _) = json::<VerifyOutput>(&args);
    let mut csv_args = vec!["--format", "csv"];
    csv_args.extend_from_slice(&args);
    let (code, text) = run_args(&csv_args);
    assert_eq!(code, 0);

    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, VERIFY_CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), doc.body.records.len());
    for (row, rec) in rows.iter().zip(&doc.body.records) {
        assert_eq!(&row[0], rec.location.tag());
        assert_eq!(row[8].parse::<u64>().ok(), rec.lhs);
        assert_eq!(row[9].parse::<u64>().ok(), rec.rhs);
        assert_eq!(row[10].parse::<u64>().unwrap(), rec.modulus);
        let pass = match &row[11] {
            "true" => Some(true),
            "false" => Some(false),
            "n/a" => None,
            other => panic!("bad pass column {other}"),
        };
        assert_eq!(pass, rec.pass);
    }
}

#[test]
fn verify_output_independent_of_jobs_and_reruns() {
    let args = ["verify", "--suite", "all", "--max-prime", "13", "--max-exponent", "3", "--max-n", "60"];
    let (_, _, one) = json::<VerifyOutput>(&args);
    let (_, _, again) = json::<VerifyOutput>(&args);
    let mut par = vec!["--jobs", "4"];
    par.extend_from_slice(&args);
    let (_, _, four) = json::<VerifyOutput>(&par);
    assert_eq!(without_elapsed(&one), without_elapsed(&again));
    assert_eq!(without_elapsed(&one), without_elapsed(&four));
}

#[test]
fn verify_out_writes_file_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("report.json");
    let p = path.to_str().unwrap();
    let o = bin(&["--format", "json", "verify", "--suite", "lemma", "--max-prime", "5", "--max-exponent", "2", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: VerifyOutput = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc.body.records.len(), 3);
    // no temporary files left beside the report
    let entries = std::fs::read_dir(path.parent().unwrap()).unwrap().count();
    assert_eq!(entries, 1);
}

#[test]
fn bench_cai_granville_checks_fewer() {
    let (code, doc, _) = json::<BenchOutput>(&[
        "bench", "--criteria", "deutsch-gessel,cai-granville", "--range", "2..1000",
    ]);
    assert_eq!(code, 0);
    let [dg, cg] = &doc.body.records[..] else { panic!("two records expected") };
    assert_eq!(dg.criterion, "deutsch-gessel");
    assert_eq!(cg.criterion, "cai-granville");
    assert!(cg.congruences_checked < dg.congruences_checked);
    assert_eq!(dg.primes, 168);
    assert_eq!(cg.primes, 168);
    round_trips(&doc);
}

#[test]
fn bench_babbage_agrees() {
    let (code, doc, _) = json::<BenchOutput>(&["bench", "--criteria", "babbage", "--range", "2..50"]);
    assert_eq!(code, 0);
    assert_eq!(doc.body.totals.disagreements, 0);
    assert_eq!(doc.body.records[0].inputs, 49);
}

#[test]
fn bench_rejects_empty_range() {
    assert_eq!(bin(&["bench", "--range", "5..4"]).status.code(), Some(2));
    assert_eq!(bin(&["bench", "--range", "5"]).status.code(), Some(2));
}

#[test]
fn bench_literal_form_reports_disagreements() {
    let o = bin(&["bench", "--criteria", "mann-shanks", "--range", "2..20", "--modulus-form", "paper-literal"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_documents_round_trip() {
    let (_, t, _) = json::<TestOutput>(&["test", "8"]);
    assert_eq!(t.command, "test");
    assert!(!t.body.verdict.prime);
    let w = t.body.verdict.scan.first_failure.unwrap();
    assert_eq!((w.index, w.lhs, w.rhs, w.modulus), (2, 5, 1, 8));
    round_trips(&t);

    let (_, c, _) = json::<ClassifyOutput>(&["classify", "9", "3"]);
    assert_eq!(c.body.verdict.exponent_f, Some(2));
    round_trips(&c);

    let (_, r, _) = json::<RowOutput>(&["row", "4", "6"]);
    assert_eq!(r.body.records, vec![1, 4, 0, 4, 1]);
    assert_eq!(r.body.totals.count, 5);
    round_trips(&r);
}

#[test]
fn text_csv_and_json_agree_on_test() {
    let (_, text) = run_args(&["--format", "csv", "test", "25", "--criterion", "cai-granville"]);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let row = rd.records().next().unwrap().unwrap();
    let (_, doc, _) = json::<TestOutput>(&["test", "25", "--criterion", "cai-granville"]);
    let w = doc.body.verdict.scan.first_failure.unwrap();
    assert_eq!(&row[2], "false");
    assert_eq!(row[3].parse::<u64>().unwrap(), doc.body.totals.checked);
    assert_eq!(
        [&row[4], &row[5], &row[6], &row[7]],
        [w.index, w.lhs, w.rhs, w.modulus].map(|x| x.to_string()).each_ref().map(String::as_str)
    );
}
