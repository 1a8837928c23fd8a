use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn srgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgen")).args(args).output().unwrap()
}

fn status(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn generate_writes_report_tests_and_manifest() {
    let out = tempfile::tempdir().unwrap();
    let bank = corpus("bank_account.sub");
    let o = srgen(&["generate", bank.to_str().unwrap(), "--repr", "focal", "--seed", "1", "--budget", "50000", "--out", out.path().to_str().unwrap()]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = out.path().join("bank_account/focal/seed-1");
    let report = json(&dir.join("report.json"));
    assert_eq!(report["representation"], "focal");
    assert_eq!(report["seed"], 1);
    assert_eq!(report["goals"]["total"], 16);
    assert_eq!(report["mutants"]["total"], 37);
    assert!(fs::read_to_string(dir.join("bank_account.focal.tests")).unwrap().starts_with("// focal tests for unit BankAccount"));
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["config"]["tolerance"], 0.01);
    assert_eq!(manifest["overrides"], serde_json::json!(["--budget=50000"]));
}

#[test]
fn evaluate_agrees_with_generate() {
    let out = tempfile::tempdir().unwrap();
    let sub = corpus("inventory.sub");
    let o = srgen(&["generate", sub.to_str().unwrap(), "--repr", "baseline", "--seed", "4", "--out", out.path().to_str().unwrap()]);
    assert_eq!(status(&o), 0);
    let dir = out.path().join("inventory/baseline/seed-4");
    let report = json(&dir.join("report.json"));
    let tests = dir.join("inventory.baseline.tests");
    let o = srgen(&["evaluate", sub.to_str().unwrap(), tests.to_str().unwrap()]);
    assert_eq!(status(&o), 0);
    let ev: Value = serde_json::from_slice(&o.stdout).unwrap();
    for k in ["goals", "coverage", "mutants", "mutation_score", "sr_rate", "mean_coherence", "tests"] {
        assert_eq!(ev[k], report[k], "{k}");
    }
}

#[test]
fn failing_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let tests = dir.path().join("bad.tests");
    fs::write(
        &tests,
        "test wrong focal getBalance {\n  var a: string = \"x\";\n  var b: float = 10.0;\n  var acc: BankAccount = new BankAccount(a, b);\n  var got: float = acc.getBalance();\n  assert got == 11.0;\n}\n",
    )
    .unwrap();
    let o = srgen(&["evaluate", corpus("bank_account.sub").to_str().unwrap(), tests.to_str().unwrap()]);
    assert_eq!(status(&o), 1);
    let ev: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(ev["failing_assertions"].as_array().unwrap().len(), 1);
}

#[test]
fn unreadable_inputs_exit_two() {
    assert_eq!(status(&srgen(&["generate", "no/such/file.sub"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sub");
    fs::write(&bad, "unit {").unwrap();
    assert_eq!(status(&srgen(&["generate", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])), 2);
    let tests = dir.path().join("x.tests");
    fs::write(&tests, "test t { nonsense }").unwrap();
    assert_eq!(status(&srgen(&["evaluate", corpus("bank_account.sub").to_str().unwrap(), tests.to_str().unwrap()])), 2);
}

#[test]
fn bad_configuration_exits_three() {
    let bank = corpus("bank_account.sub");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = srgen(&["generate", bank.to_str().unwrap(), "--repr", "bogus", "--out", d]);
    assert_eq!(status(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("baseline") && err.contains("focal"), "{err}");
    assert_eq!(status(&srgen(&["generate", bank.to_str().unwrap(), "--population", "7", "--out", d])), 3);
    assert_eq!(status(&srgen(&["generate", bank.to_str().unwrap(), "--crossover-rate", "1.5", "--out", d])), 3);
    assert_eq!(status(&srgen(&["generate", bank.to_str().unwrap(), "--max-len", "3", "--out", d])), 3);
    assert_eq!(status(&srgen(&["generate", bank.to_str().unwrap(), "--operators", "XYZ", "--out", d])), 3);
    // nothing left behind
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn help_exits_zero() {
    assert_eq!(status(&srgen(&["--help"])), 0);
    assert_eq!(status(&srgen(&["--version"])), 0);
}

#[test]
fn mutants_listing() {
    let o = srgen(&["mutants", corpus("bank_account.sub").to_str().unwrap()]);
    assert_eq!(status(&o), 0);
    let lines: Vec<Value> = String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 37);
    for (i, m) in lines.iter().enumerate() {
        assert_eq!(m["id"], i);
        for k in ["method", "operator", "location", "description"] {
            assert!(m[k].is_string());
        }
    }
    let o = srgen(&["mutants", corpus("bank_account.sub").to_str().unwrap(), "--operators", "neg"]);
    assert!(String::from_utf8(o.stdout).unwrap().lines().all(|l| l.contains("\"NEG\"")));
}

#[test]
fn compare_one_subject_two_seeds() {
    let out = tempfile::tempdir().unwrap();
    let o = srgen(&[
        "compare",
        corpus("triangle.sub").to_str().unwrap(),
        "--seeds",
        "1..2",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for repr in ["baseline", "focal"] {
        for seed in 1..=2 {
            assert!(out.path().join(format!("triangle/{repr}/seed-{seed}/report.json")).exists());
        }
    }
    let mut rd = csv::Reader::from_path(out.path().join("comparison.csv")).unwrap();
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["subject", "representation", "seed", "coverage", "mutation_score", "sr_rate", "mean_coherence", "n_tests", "evals_used"]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4 + 2);
    assert_eq!(rows[0].iter().take(3).collect::<Vec<_>>(), ["triangle", "baseline", "1"]);
    assert_eq!(&rows[4][2], "summary");
    assert!(json(&out.path().join("comparison.json"))["unmatched"].as_array().unwrap().is_empty());
}

#[test]
fn compare_records_failed_rows() {
    let out = tempfile::tempdir().unwrap();
    let bad = out.path().join("broken.sub");
    fs::write(&bad, "unit Broken {").unwrap();
    let o = srgen(&["compare", bad.to_str().unwrap(), "--seeds", "1", "--out", out.path().join("o").to_str().unwrap()]);
    assert_eq!(status(&o), 1);
    let text = fs::read_to_string(out.path().join("o/comparison.csv")).unwrap();
    assert!(text.contains("broken,baseline,1,failed,failed,failed,failed,failed,failed"), "{text}");
    assert_eq!(json(&out.path().join("o/comparison.json"))["unmatched"], serde_json::json!(["broken"]));
}

#[test]
fn split_writes_a_second_suite() {
    let out = tempfile::tempdir().unwrap();
    let o = srgen(&[
        "generate",
        corpus("bank_account.sub").to_str().unwrap(),
        "--repr",
        "baseline",
        "--seed",
        "1",
        "--split",
        "--dump-traces",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(status(&o), 0);
    let dir = out.path().join("bank_account/baseline/seed-1");
    let report = json(&dir.join("report.json"));
    assert_eq!(report["split"]["tests_file"], "bank_account.baseline.split.tests");
    assert_eq!(report["split"]["metrics"]["sr_rate"], 1.0);
    assert!(dir.join("bank_account.baseline.split.tests").exists());
    let traces = json(&dir.join("traces.json"));
    assert_eq!(traces.as_array().unwrap().len(), report["tests"].as_array().unwrap().len());
}
