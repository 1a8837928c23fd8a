//! Acceptance criteria, one line each. Runs without the test harness so the
//! lines are always printed; exits nonzero if any criterion fails.

mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use srgen_core::assertions::{candidate_assertions, select_unique_killers};
use srgen_core::chromosome::{crossover, mutate, validate, Factory, FactoryConfig, Representation, Statement, TestCase};
use srgen_core::emitter::parse_tests;
use srgen_core::mutation::{run_kill_analysis, MutantSet};
use srgen_core::runtime::{execute_test, focal_window, harvest_observations, run, Limits, ObsKind, Observed, Value as RtValue};
use srgen_core::search::{run_search, SearchConfig};
use srgen_core::subject::{parse_subject, GoalIndex, SubjectUnit, CONSTRUCTOR};
use support::cover::optimal_cover;
use support::oracle::{hit_of, hits};

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_dir() -> PathBuf {
    root().join("corpus")
}

struct Subject {
    stem: String,
    path: PathBuf,
    unit: SubjectUnit,
    tolerance: f64,
}

fn corpus() -> Vec<Subject> {
    let m: Value = serde_json::from_str(&fs::read_to_string(corpus_dir().join("manifest.json")).unwrap()).unwrap();
    m["subjects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let file = s["file"].as_str().unwrap();
            let path = corpus_dir().join(file);
            let unit = parse_subject(&fs::read_to_string(&path).unwrap()).unwrap();
            Subject {
                stem: file.trim_end_matches(".sub").into(),
                path,
                unit,
                tolerance: s["tolerance"].as_f64().unwrap(),
            }
        })
        .collect()
}

fn srgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgen")).args(args).output().unwrap()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn repr_name(r: Representation) -> &'static str {
    r.name()
}

/// The full compare run over the corpus that several criteria read.
struct CorpusRun {
    out: PathBuf,
    elapsed: Duration,
    status: i32,
}

impl CorpusRun {
    fn dir(&self, stem: &str, repr: Representation, seed: u64) -> PathBuf {
        self.out.join(stem).join(repr_name(repr)).join(format!("seed-{seed}"))
    }

    fn report(&self, stem: &str, repr: Representation, seed: u64) -> Value {
        json_file(&self.dir(stem, repr, seed).join("report.json"))
    }

    fn tests_file(&self, stem: &str, repr: Representation, seed: u64) -> PathBuf {
        self.dir(stem, repr, seed).join(format!("{stem}.{}.tests", repr_name(repr)))
    }
}

type Verdict = (bool, String);

fn criterion_1(run: &CorpusRun, subjects: &[Subject], scratch: &Path) -> Verdict {
    let bank = subjects.iter().find(|s| s.stem == "bank_account").unwrap();
    let mut seeds_ok = 0;
    for seed in SEEDS {
        let text = fs::read_to_string(run.tests_file("bank_account", Representation::Focal, seed)).unwrap();
        let parsed = parse_tests(&bank.unit, &text, bank.tolerance).unwrap();
        let found = parsed.iter().any(|p| {
            let t = &p.test;
            let Some(Statement::Method { receiver, method, .. }) = t.statements.last() else { return false };
            method == "deposit"
                && t.focal_method.as_deref() == Some("deposit")
                && p.assertions.iter().any(|a| {
                    a.at.kind == ObsKind::InspectorValue
                        && a.at.inspector.as_deref() == Some("getBalance")
                        && a.at.receiver == Some(*receiver)
                        && matches!(a.expected, Observed::Value(RtValue::Float(_)))
                        && a.tolerance == 0.01
                })
        });
        if found {
            seeds_ok += 1;
        }
    }
    // the fixture's deposit semantics, through evaluate
    let by_hand = scratch.join("deposit.tests");
    fs::write(
        &by_hand,
        "test testDepositToAccount focal deposit {\n  var owner: string = \"X\";\n  var initial: float = 100.00;\n  var account: BankAccount = new BankAccount(owner, initial);\n  var amount: float = 50.00;\n  account.deposit(amount);\n  assert account.getBalance() == 150.00;\n}\n",
    )
    .unwrap();
    let o = srgen(&["evaluate", bank.path.to_str().unwrap(), by_hand.to_str().unwrap()]);
    let ev: Value = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    let by_hand_ok = o.status.code() == Some(0) && ev["failing_assertions"].as_array().is_some_and(|a| a.is_empty());
    (
        seeds_ok == 10 && by_hand_ok,
        format!("{seeds_ok}/10 focal BankAccount suites assert getBalance within 0.01 after deposit; 100.00 + 50.00 == 150.00 holds: {by_hand_ok}"),
    )
}

fn criterion_2(subjects: &[Subject], scratch: &Path) -> Verdict {
    let bank = subjects.iter().find(|s| s.stem == "bank_account").unwrap();
    let t17 = scratch.join("test17.tests");
    fs::write(
        &t17,
        "test test17 {\n  var owner: string = \"\";\n  var initial: float = 0.0;\n  var bankAccount0: BankAccount = new BankAccount(owner, initial);\n  bankAccount0.closeAccount();\n  var amount: float = 665.49;\n  bankAccount0.deposit(amount);\n  var fee: float = 0.05;\n  bankAccount0.transferFunds(bankAccount0, fee);\n  assert bankAccount0.getBalance() == 665.49 within 0.01;\n}\n",
    )
    .unwrap();
    let o = srgen(&["evaluate", bank.path.to_str().unwrap(), t17.to_str().unwrap()]);
    let ev: Value = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    let rec = &ev["tests"][0];
    let responsible: Vec<&str> = rec["responsible_methods"].as_array().map(|a| a.iter().filter_map(Value::as_str).collect()).unwrap_or_default();
    let coherence = rec["coherence"].as_f64().unwrap_or(1.0);
    (
        o.status.code() == Some(0) && responsible.len() >= 2 && coherence < 1.0,
        format!("responsible methods {responsible:?}, coherence {coherence}, sr_rate {}", ev["sr_rate"]),
    )
}

fn criterion_3(run: &CorpusRun, subjects: &[Subject]) -> Verdict {
    let mut worst = 10;
    let mut over_budget = 0;
    let mut detail = Vec::new();
    for s in subjects {
        for repr in Representation::ALL {
            let full = SEEDS
                .filter(|&seed| {
                    let r = run.report(&s.stem, repr, seed);
                    if r["budget_used"].as_u64().unwrap() > 50_000 {
                        over_budget += 1;
                    }
                    r["goals"]["covered"] == r["goals"]["total"]
                })
                .count();
            worst = worst.min(full);
            detail.push(format!("{}/{}={full}", s.stem, repr_name(repr)));
        }
    }
    let small = subjects.iter().all(|s| GoalIndex::new(&s.unit).len() <= 25);
    let secs = run.elapsed.as_secs_f64();
    (
        run.status == 0 && subjects.len() >= 5 && small && worst >= 8 && over_budget == 0 && secs < 600.0,
        format!("{} subjects, fewest fully covered seeds {worst}/10, compare took {secs:.1}s ({})", subjects.len(), detail.join(" ")),
    )
}

fn focal_reports(run: &CorpusRun, subjects: &[Subject]) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    for s in subjects {
        for seed in SEEDS {
            out.push((format!("{} seed {seed}", s.stem), run.report(&s.stem, Representation::Focal, seed)));
        }
    }
    out
}

fn criterion_4(run: &CorpusRun, subjects: &[Subject]) -> Verdict {
    let mut bad = Vec::new();
    let mut tests = 0;
    for (name, r) in focal_reports(run, subjects) {
        let ok_tests = r["tests"].as_array().unwrap().iter().all(|t| {
            tests += 1;
            t["focal_method"].is_string() && t["responsible_methods"].as_array().unwrap().len() <= 1
        });
        if r["sr_rate"].as_f64() != Some(1.0) || !ok_tests {
            bad.push(name);
        }
    }
    (bad.is_empty(), format!("{tests} focal tests, suites with sr_rate != 1.0 or a test without exactly one focal method: {bad:?}"))
}

fn criterion_5(run: &CorpusRun, subjects: &[Subject]) -> Verdict {
    let bad: Vec<String> = focal_reports(run, subjects)
        .into_iter()
        .filter(|(_, r)| r["mean_coherence"].as_f64() != Some(1.0))
        .map(|(n, _)| n)
        .collect();
    (bad.is_empty(), format!("focal suites with mean_coherence != 1.0: {bad:?}"))
}

const CFG: FactoryConfig = FactoryConfig { max_len: 40, init_len: 8 };

/// A random test: a fresh one, then a few mutations.
fn random_test(f: &Factory, goals: &GoalIndex, repr: Representation, rng: &mut ChaCha8Rng) -> TestCase {
    let g = goals.goal(rng.random_range(0..goals.len()));
    let mut t = f.random_test(repr, g, rng);
    for _ in 0..rng.random_range(0..4) {
        mutate(f, &mut t, rng);
    }
    t
}

fn criterion_6(subjects: &[Subject]) -> Verdict {
    let limits = Limits::default();
    let mut mismatches = 0;
    let mut checked = 0;
    for (k, s) in subjects.iter().enumerate() {
        let goals = GoalIndex::new(&s.unit);
        let f = Factory::new(&s.unit, CFG).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(600 + k as u64);
        for i in 0..1000 {
            let repr = if i % 2 == 0 { Representation::Baseline } else { Representation::Focal };
            let t = random_test(&f, &goals, repr, &mut rng);
            let trace = execute_test(&s.unit, &goals, &t, limits);
            let core: BTreeSet<_> = trace.covered(focal_window(&t)).into_iter().map(|(g, _)| hit_of(&goals, g)).collect();
            if core != hits(&s.unit, &t, limits.step_limit) {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    (mismatches == 0, format!("{checked} random tests, {mismatches} mismatches"))
}

fn criterion_7(subjects: &[Subject]) -> Verdict {
    let sanity = {
        let s = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        optimal_cover(&[s(&[1, 2]), s(&[2]), s(&[3])]) == (s(&[1, 2, 3]), 2)
    };
    let limits = Limits::default();
    let mut instances = 0;
    let mut mismatches = 0;
    let mut larger = 0;
    for (k, s) in subjects.iter().enumerate() {
        let goals = GoalIndex::new(&s.unit);
        let all = MutantSet::new(&s.unit);
        // instances: one per (test, method) with at most 20 mutants in it
        let mut by_method: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, m) in all.mutants.iter().enumerate() {
            by_method.entry(m.method.as_str()).or_default().push(i);
        }
        let subsets: Vec<MutantSet> = by_method
            .values()
            .filter(|ix| ix.len() <= 20)
            .map(|ix| MutantSet {
                mutants: ix.iter().map(|&i| all.mutants[i].clone()).collect(),
                units: ix.iter().map(|&i| all.units[i].clone()).collect(),
            })
            .collect();
        let mut tests = Vec::new();
        for repr in Representation::ALL {
            for seed in SEEDS {
                let cfg = SearchConfig { seed, representation: repr, ..SearchConfig::default() };
                tests.extend(run_search(&s.unit, &goals, &cfg).unwrap().0.tests());
            }
        }
        let f = Factory::new(&s.unit, CFG).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(700 + k as u64);
        for i in 0..100 {
            let repr = if i % 2 == 0 { Representation::Baseline } else { Representation::Focal };
            tests.push(random_test(&f, &goals, repr, &mut rng));
        }
        for t in &tests {
            let mut exec = run(&s.unit, &goals, t, limits);
            let cands = candidate_assertions(&harvest_observations(&mut exec, &s.unit, t), s.tolerance);
            if cands.is_empty() || cands.len() > 12 {
                continue;
            }
            for ms in &subsets {
                let matrix = run_kill_analysis(&goals, t, &cands, ms, limits);
                let mut cands = cands.clone();
                for (i, a) in cands.iter_mut().enumerate() {
                    a.killed = matrix.kills(i);
                }
                let kept = select_unique_killers(&cands, None);
                let greedy: BTreeSet<usize> = kept.iter().flat_map(|&i| cands[i].killed.iter().copied()).collect();
                let sets: Vec<BTreeSet<usize>> = cands.iter().map(|a| a.killed.clone()).collect();
                let (optimal, size) = optimal_cover(&sets);
                instances += 1;
                if greedy != optimal {
                    mismatches += 1;
                }
                if kept.len() > size {
                    larger += 1;
                }
            }
        }
    }
    (
        sanity && instances > 0 && mismatches == 0,
        format!("{instances} instances, {mismatches} covered-set mismatches ({larger} where greedy kept more assertions than the optimum)"),
    )
}

fn focal_intact(t: &TestCase, method: &str) -> bool {
    t.focal_method.as_deref() == Some(method)
        && match t.statements.last() {
            Some(Statement::Method { method: m, .. }) => m == method,
            Some(Statement::Constructor { .. }) => method == CONSTRUCTOR,
            _ => false,
        }
}

fn criterion_8(subjects: &[Subject]) -> Verdict {
    let mut detail = Vec::new();
    let mut ok = true;
    for repr in Representation::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + repr as u64);
        let mut applications = 0;
        let mut violations = 0;
        let mut focal_cases = 0;
        let mut focal_kept = 0;
        while applications < 10_000 {
            let s = &subjects[applications % subjects.len()];
            let goals = GoalIndex::new(&s.unit);
            let f = Factory::new(&s.unit, CFG).unwrap();
            let a = f.random_test(repr, goals.goal(rng.random_range(0..goals.len())), &mut rng);
            let b = f.random_test(repr, goals.goal(rng.random_range(0..goals.len())), &mut rng);
            let mut results = Vec::new();
            if rng.random_bool(0.5) {
                let mut m = a.clone();
                mutate(&f, &mut m, &mut rng);
                results.push((a.focal_method.clone(), m));
            } else {
                let (c, d) = crossover(&f, &a, &b, &mut rng);
                results.push((a.focal_method.clone(), c));
                results.push((b.focal_method.clone(), d));
            }
            applications += 1;
            for (focal, t) in results {
                if !validate(&s.unit, &t, CFG.max_len).is_empty() {
                    violations += 1;
                }
                if let Some(m) = focal {
                    focal_cases += 1;
                    if focal_intact(&t, &m) {
                        focal_kept += 1;
                    }
                }
            }
        }
        ok &= violations == 0 && focal_kept == focal_cases;
        detail.push(format!("{}: {applications} applications, {violations} violations, focal kept {focal_kept}/{focal_cases}", repr_name(repr)));
    }
    (ok, detail.join("; "))
}

fn criterion_9(subjects: &[Subject], scratch: &Path) -> Verdict {
    let mut same = 0;
    let mut total = 0;
    for s in subjects {
        for repr in Representation::ALL {
            total += 1;
            let a = scratch.join("det-a");
            let b = scratch.join("det-b");
            let o = srgen(&["generate", s.path.to_str().unwrap(), "--repr", repr_name(repr), "--seed", "7", "--out", a.to_str().unwrap()]);
            if o.status.code() != Some(0) {
                continue;
            }
            let dir_a = a.join(&s.stem).join(repr_name(repr)).join("seed-7");
            // the second run is rebuilt from the first run's manifest
            let m = json_file(&dir_a.join("manifest.json"));
            let seed = m["seed"].to_string();
            let mut args: Vec<String> = vec![
                "generate".into(),
                m["subject"].as_str().unwrap().into(),
                "--repr".into(),
                m["representation"].as_str().unwrap().into(),
                "--seed".into(),
                seed,
            ];
            args.extend(m["overrides"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_owned()));
            args.extend(["--out".into(), b.to_str().unwrap().into()]);
            let o = Command::new(env!("CARGO_BIN_EXE_srgen")).args(&args).output().unwrap();
            if o.status.code() != Some(0) {
                continue;
            }
            let dir_b = b.join(&s.stem).join(repr_name(repr)).join("seed-7");
            let tests = format!("{}.{}.tests", s.stem, repr_name(repr));
            let eq = |f: &str| fs::read(dir_a.join(f)).unwrap() == fs::read(dir_b.join(f)).unwrap();
            if eq("report.json") && eq(&tests) {
                same += 1;
            }
        }
    }
    (same == total, format!("{same}/{total} run pairs byte-identical in report and rendered suite"))
}

fn criterion_10(run: &CorpusRun, subjects: &[Subject]) -> Verdict {
    let mut suites = 0;
    let mut failing = Vec::new();
    for s in subjects {
        for repr in Representation::ALL {
            for seed in SEEDS {
                suites += 1;
                let tests = run.tests_file(&s.stem, repr, seed);
                let o = srgen(&["evaluate", s.path.to_str().unwrap(), tests.to_str().unwrap()]);
                let ev: Value = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
                let clean = o.status.code() == Some(0) && ev["failing_assertions"].as_array().is_some_and(|a| a.is_empty());
                if !clean || !run.report(&s.stem, repr, seed)["failing_assertions"].as_array().unwrap().is_empty() {
                    failing.push(format!("{} {} seed {seed}", s.stem, repr_name(repr)));
                }
            }
        }
    }
    (failing.is_empty(), format!("{suites} suites re-run on their subject, failing: {failing:?}"))
}

fn main() {
    // `cargo test -- --list` and filters come through here too
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let scratch = tempfile::tempdir().unwrap();
    let subjects = corpus();

    let out = scratch.path().join("compare");
    let started = Instant::now();
    let o = srgen(&["compare", "--corpus", corpus_dir().to_str().unwrap(), "--seeds", "1..10", "--out", out.to_str().unwrap()]);
    let run = CorpusRun { out, elapsed: started.elapsed(), status: o.status.code().unwrap_or(-1) };
    if run.status != 0 {
        eprintln!("{}", String::from_utf8_lossy(&o.stderr));
    }

    let results: Vec<(&str, Verdict)> = vec![
        ("deposit test reproduction", criterion_1(&run, &subjects, scratch.path())),
        ("multi-method test diagnosis", criterion_2(&subjects, scratch.path())),
        ("effectiveness at desk scale", criterion_3(&run, &subjects)),
        ("single responsibility by construction", criterion_4(&run, &subjects)),
        ("coherence by construction", criterion_5(&run, &subjects)),
        ("coverage-oracle equivalence", criterion_6(&subjects)),
        ("greedy-cover oracle", criterion_7(&subjects)),
        ("operator closure", criterion_8(&subjects)),
        ("determinism", criterion_9(&subjects, scratch.path())),
        ("no false positives", criterion_10(&run, &subjects)),
    ];
    let mut failed = 0;
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if *ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
