mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lexchoice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexchoice"))
        .args(args)
        .env_remove("LEXCHOICE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const GRID: &str = "{ windows = [4], orders = [1, 2], omit = [] }";

/// Synthetic corpus with counts already computed into `<dir>/counts`.
fn counted_fixture() -> (TempDir, common::Fixture) {
    let tmp = tempfile::tempdir().unwrap();
    let fx = common::write_fixture(tmp.path(), 7, GRID);
    let counts = fx.dir.join("counts");
    let o = lexchoice(&["stats", p(&fx.training), "--out", p(&counts)]);
    assert!(o.status.success(), "{}", stderr(&o));
    (tmp, fx)
}

#[test]
fn stats_matches_hand_enumeration() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("tiny.txt");
    fs::write(&corpus, "x/NN y/JJ z/NN ./.\nx/NN z/NN\n").unwrap();
    let out = tmp.path().join("st");
    let o = lexchoice(&["stats", p(&corpus), "--out", p(&out), "--window", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "N=6 vocabulary=4 pairs=3");
    let pairs = fs::read_to_string(out.join("pairs.tsv")).unwrap();
    assert_eq!(pairs, "N=6\tK=1\tCROSS=false\nx\ty\t1\nx\tz\t1\ny\tz\t1\n");
    let vocab = fs::read_to_string(out.join("vocab.tsv")).unwrap();
    assert!(vocab.starts_with("N=6\nF=800\n"), "{vocab}");
    assert!(vocab.contains("\nx\t2\t2\n"));
}

#[test]
fn stats_on_empty_corpus_reports_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("empty.txt");
    fs::write(&corpus, "").unwrap();
    let o = lexchoice(&["stats", p(&corpus), "--out", p(&tmp.path().join("e"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "N=0 vocabulary=0 pairs=0");
}

#[test]
fn stats_reports_malformed_line() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("bad.txt");
    fs::write(&corpus, "a/NN b/NN\nc/NN broken\n").unwrap();
    let o = lexchoice(&["stats", p(&corpus), "--out", p(&tmp.path().join("e"))]);
    assert!(!o.status.success());
    let msg = stderr(&o);
    assert!(msg.contains("bad.txt") && msg.contains('2'), "{msg}");
}

#[test]
fn stats_rerun_is_byte_identical() {
    let (_tmp, fx) = counted_fixture();
    let again = fx.dir.join("again");
    let o = lexchoice(&["stats", p(&fx.training), "--out", p(&again)]);
    assert!(o.status.success());
    for f in ["vocab.tsv", "pairs.tsv"] {
        assert_eq!(fs::read(fx.dir.join("counts").join(f)).unwrap(), fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn build_respects_order() {
    let (_tmp, fx) = counted_fixture();
    let counts = fx.dir.join("counts");
    let nets = fx.dir.join("nets");
    let o = lexchoice(&["build", "--counts", p(&counts), "--root", "task", "--order", "2", "--out", p(&nets)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "task\tnodes=3\tedges=2");
    let net = fs::read_to_string(nets.join("task.net")).unwrap();
    assert!(net.contains("NODE task 0\nNODE difficult 1\nNODE learn 2\n"), "{net}");

    let o = lexchoice(&["build", "--counts", p(&counts), "--root", "task", "--order", "1", "--out", p(&nets)]);
    assert_eq!(stdout(&o).trim(), "task\tnodes=2\tedges=1");

    let o = lexchoice(&["build", "--counts", p(&counts), "--root", "task", "--order", "0", "--out", p(&nets)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "task\tnodes=1\tedges=0");
    let net = fs::read_to_string(nets.join("task.net")).unwrap();
    assert!(!net.contains("EDGE"), "{net}");
}

#[test]
fn build_flags_truncation() {
    let (_tmp, fx) = counted_fixture();
    let o = lexchoice(&[
        "build",
        "--counts",
        p(&fx.dir.join("counts")),
        "--root",
        "job",
        "--depth-caps",
        "2,1",
        "--out",
        p(&fx.dir.join("nets")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "job\tnodes=2\tedges=1\ttruncated");
    let net = fs::read_to_string(fx.dir.join("nets").join("job.net")).unwrap();
    assert!(net.contains("TRUNCATED true"));
}

#[test]
fn build_continues_past_bad_roots() {
    let (_tmp, fx) = counted_fixture();
    let nets = fx.dir.join("nets");
    let o = lexchoice(&[
        "build",
        "--counts",
        p(&fx.dir.join("counts")),
        "--root",
        "job",
        "--root",
        "nosuch",
        "--root",
        "the",
        "--root",
        "task",
        "--out",
        p(&nets),
    ]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("`nosuch`") && err.contains("`the`"), "{err}");
    assert!(nets.join("job.net").exists() && nets.join("task.net").exists());
    assert!(!nets.join("nosuch.net").exists());
}

#[test]
fn choose_ranks_and_explains() {
    let (_tmp, fx) = counted_fixture();
    let nets = fx.dir.join("nets");
    let o = lexchoice(&[
        "build",
        "--counts",
        p(&fx.dir.join("counts")),
        "--root",
        "job",
        "--root",
        "task",
        "--out",
        p(&nets),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = lexchoice(&["choose", "--networks", p(&nets), "--candidates", "job,task", "--sentence", "we/PRP ___/NN learn/VB it/PRP"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("1\ttask\t"), "{text}");
    assert!(text.contains("learn\tsig=") && text.contains("order=2"), "{text}");
    assert!(text.trim_end().ends_with("winner: task"), "{text}");

    let o = lexchoice(&["choose", "--networks", p(&nets), "--candidates", "job,task", "--sentence", "no evidence ___ here", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["winner"], "job");
    assert_eq!(v["baseline_fallback"], true);
    assert_eq!(v["ranking"][0]["score"], 0.0);

    let o = lexchoice(&["choose", "--networks", p(&nets), "--candidates", "job,duty", "--sentence", "a ___"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("`duty`"), "{}", stderr(&o));
}

#[test]
fn evaluate_refuses_overlapping_corpora() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = common::write_fixture(tmp.path(), 7, GRID);
    let o = lexchoice(&[
        "evaluate",
        "--config",
        p(&fx.config),
        "--held-out",
        p(&fx.training),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("also a training corpus"), "{}", stderr(&o));
    assert!(!fx.dir.join("report.tsv").exists());
}

#[test]
fn evaluate_reads_config_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = common::write_fixture(tmp.path(), 7, GRID);
    let o = Command::new(env!("CARGO_BIN_EXE_lexchoice"))
        .arg("evaluate")
        .env("LEXCHOICE_CONFIG", &fx.config)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(fx.dir.join("report.tsv")).unwrap();
    assert_eq!(stdout(&o), report);
    let cell = |label: &str| {
        let line = report.lines().find(|l| l.starts_with(&format!("{label}\t"))).unwrap();
        line.split('\t').nth(1).unwrap().to_string()
    };
    assert_eq!(cell("Set"), "3");
    assert_eq!(cell("Size"), "100");
    assert_eq!(cell("Baseline"), "50.0%");
    assert_eq!(cell("Narrow 1"), "50.0%^a");
    assert_eq!(cell("Narrow 2"), "100.0%");
    let log = fs::read_to_string(fx.dir.join("instances.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 200);
    for line in log.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}
