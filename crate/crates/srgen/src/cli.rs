//! `srgen` subcommands.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use srgen_core::assertions::DEFAULT_TOLERANCE;
use srgen_core::chromosome::Representation;
use srgen_core::emitter::{parse_tests, Style};
use srgen_core::metrics::{compare, ComparisonTable, RunRow, RunSummary};
use srgen_core::mutation::{MutantSet, Operator};
use srgen_core::pipeline::{evaluate_suite, generate, GenerateConfig, Generated, PipelineError};
use srgen_core::runtime::Limits;
use srgen_core::search::SearchConfig;
use srgen_core::subject::GoalIndex;

use crate::io::{self, Failure, Subject, EXIT_CONFIG, EXIT_EVAL_FAILURE, EXIT_OK};
use crate::report::{dump_traces, EffectiveConfig, EvaluateReport, MetricsSection, Report, RunManifest, SplitSection};

#[derive(Debug, Parser)]
#[command(name = "srgen", version, about = "Search-based unit test generation with focal-method tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a test suite for one subject, representation and seed.
    Generate(GenerateArgs),
    /// Generate under both representations over many seeds and summarize.
    Compare(CompareArgs),
    /// List the mutants of a subject as JSON lines.
    Mutants(MutantsArgs),
    /// Re-run a rendered test file against a subject and its mutants.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Repr {
    Baseline,
    Focal,
}

impl From<Repr> for Representation {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Baseline => Representation::Baseline,
            Repr::Focal => Representation::Focal,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct Tuning {
    /// Search budget in test executions.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    /// Statements in a freshly sampled test.
    #[arg(long)]
    init_len: Option<usize>,
    /// Interpreter steps per test execution before it times out.
    #[arg(long)]
    step_limit: Option<u64>,
    /// Absolute tolerance for real-valued assertions. Defaults to the
    /// corpus manifest entry, then 1e-6.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    crossover_rate: Option<f64>,
    /// Mutation operators to use, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_operator)]
    operators: Option<Vec<Operator>>,
    /// Split statement-list tests that several methods are responsible for.
    #[arg(long)]
    split: bool,
    /// Leave out the arrange/act/assert comments.
    #[arg(long)]
    no_aaa: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_operator(s: &str) -> Result<Operator, String> {
    s.parse()
}

#[derive(Debug, Args)]
struct GenerateArgs {
    subject: PathBuf,
    #[arg(long, value_enum, default_value = "focal")]
    repr: Repr,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the per-test execution traces.
    #[arg(long)]
    dump_traces: bool,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct CompareArgs {
    subjects: Vec<PathBuf>,
    /// Use every `.sub` file of a directory.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// `1..10`, or a comma list of seeds and ranges.
    #[arg(long, default_value = "1..10")]
    seeds: String,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct MutantsArgs {
    subject: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_operator)]
    operators: Option<Vec<Operator>>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    subject: PathBuf,
    tests: PathBuf,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    step_limit: Option<u64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_operator)]
    operators: Option<Vec<Operator>>,
}

/// Runs the tool on an argument list (program name first) and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Mutants(a) => cmd_mutants(a),
        Command::Evaluate(a) => cmd_evaluate(a),
    };
    match result {
        Ok(status) => status,
        Err(f) => {
            eprintln!("srgen: {:#}", f.error);
            f.status
        }
    }
}

fn tolerance_for(flag: Option<f64>, subject: &Path) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => io::manifest_tolerance(subject).map_err(Failure::input)?.unwrap_or(DEFAULT_TOLERANCE),
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::config(anyhow!("tolerance {tol} must be finite and non-negative")));
    }
    Ok(tol)
}

fn limits(step_limit: Option<u64>) -> Result<Limits, Failure> {
    let mut l = Limits::default();
    if let Some(s) = step_limit {
        if s == 0 {
            return Err(Failure::config(anyhow!("step limit must be positive")));
        }
        l.step_limit = s;
    }
    Ok(l)
}

/// The configuration a tuning flag set gives, before the subject's
/// tolerance is known.
fn base_config(t: &Tuning) -> Result<GenerateConfig, Failure> {
    let mut cfg = GenerateConfig::default();
    let s: &mut SearchConfig = &mut cfg.search;
    if let Some(v) = t.budget {
        s.max_evaluations = v;
    }
    if let Some(v) = t.population {
        s.population_size = v;
    }
    if let Some(v) = t.max_len {
        s.max_len = v;
    }
    if let Some(v) = t.init_len {
        s.init_len = v;
    }
    if let Some(v) = t.crossover_rate {
        s.crossover_rate = v;
    }
    s.limits = limits(t.step_limit)?;
    s.validate().map_err(|e| Failure::config(e.into()))?;
    if s.init_len < 2 || s.init_len > s.max_len {
        return Err(Failure::config(anyhow!("initial length {} must be between 2 and the maximum length {}", s.init_len, s.max_len)));
    }
    if let Some(ops) = &t.operators {
        let mut ops = ops.clone();
        ops.sort();
        ops.dedup();
        cfg.operators = ops;
    }
    cfg.split = t.split;
    cfg.style = Style { aaa_comments: !t.no_aaa };
    Ok(cfg)
}

/// Flags as typed, for the run manifest.
fn overrides(t: &Tuning) -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |name: &str, v: Option<String>| {
        if let Some(v) = v {
            out.push(format!("--{name}={v}"));
        }
    };
    push("budget", t.budget.map(|v| v.to_string()));
    push("population", t.population.map(|v| v.to_string()));
    push("max-len", t.max_len.map(|v| v.to_string()));
    push("init-len", t.init_len.map(|v| v.to_string()));
    push("step-limit", t.step_limit.map(|v| v.to_string()));
    push("tolerance", t.tolerance.map(|v| v.to_string()));
    push("crossover-rate", t.crossover_rate.map(|v| v.to_string()));
    push(
        "operators",
        t.operators.as_ref().map(|o| o.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")),
    );
    if t.split {
        out.push("--split".into());
    }
    if t.no_aaa {
        out.push("--no-aaa".into());
    }
    out
}

struct Cell<'a> {
    subject: &'a Subject,
    repr: Representation,
    seed: u64,
    cfg: GenerateConfig,
    out: &'a Path,
    overrides: Vec<String>,
    dump_traces: bool,
}

/// One run: search, assertions, files. The run directory is removed again
/// when anything fails.
fn run_cell(c: &Cell) -> Result<Generated, Failure> {
    let mut cfg = c.cfg.clone();
    cfg.search.seed = c.seed;
    cfg.search.representation = c.repr;
    cfg.split &= c.repr == Representation::Baseline;
    let generated = generate(&c.subject.unit, &cfg).map_err(|e| match e {
        PipelineError::Config(e) => Failure::config(e.into()),
        e @ PipelineError::Reparse(_) => Failure { status: EXIT_EVAL_FAILURE, error: e.into() },
    })?;
    let dir = io::run_dir(c.out, &c.subject.stem, c.repr, c.seed);
    if let Err(e) = write_run(c, &cfg, &generated, &dir) {
        let _ = fs::remove_dir_all(&dir);
        return Err(Failure::input(e));
    }
    Ok(generated)
}

fn write_run(c: &Cell, cfg: &GenerateConfig, g: &Generated, dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let write = |name: &str, text: &str| -> anyhow::Result<()> {
        let p = dir.join(name);
        fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))
    };
    let subject = c.subject.path.display().to_string();
    let tests_name = io::tests_file_name(&c.subject.stem, c.repr);
    write(&tests_name, &g.rendered.text())?;

    let mut report = Report::new(&subject, c.repr, c.seed, &g.stats, &g.evaluation);
    if let Some(s) = &g.split {
        let name = format!("{}.{}.split.tests", c.subject.stem, c.repr);
        write(&name, &s.rendered.text())?;
        report.split = Some(SplitSection {
            tests_file: name,
            n_tests: s.evaluation.suite.len(),
            notes: s.notes.clone(),
            metrics: MetricsSection::new(&s.evaluation),
        });
    }
    write("report.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;

    if c.dump_traces {
        let traces = dump_traces(&c.subject.unit, &g.evaluation, cfg.search.limits);
        write("traces.json", &(serde_json::to_string_pretty(&traces)? + "\n"))?;
    }

    let manifest = RunManifest {
        subject,
        representation: c.repr,
        seed: c.seed,
        overrides: c.overrides.clone(),
        config: EffectiveConfig::new(cfg),
        output_dir: dir.display().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    write("manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Result<i32, Failure> {
    let subject = io::load_subject(&a.subject).map_err(Failure::input)?;
    let mut cfg = base_config(&a.tuning)?;
    cfg.tolerance = tolerance_for(a.tuning.tolerance, &subject.path)?;
    let repr: Representation = a.repr.into();
    if cfg.split && repr != Representation::Baseline {
        eprintln!("srgen: --split only applies to baseline suites, ignored");
    }
    let cell = Cell {
        subject: &subject,
        repr,
        seed: a.seed,
        cfg,
        out: &a.tuning.out,
        overrides: overrides(&a.tuning),
        dump_traces: a.dump_traces,
    };
    let g = run_cell(&cell)?;
    let m = &g.evaluation.metrics;
    println!(
        "{}: {} tests, coverage {:.3}, mutation score {:.3}, sr rate {:.3}, coherence {:.3} -> {}",
        subject.stem,
        g.evaluation.suite.len(),
        m.coverage,
        m.mutation_score,
        m.sr_rate,
        m.mean_coherence,
        io::run_dir(&a.tuning.out, &subject.stem, repr, a.seed).display()
    );
    if !g.evaluation.failing.is_empty() {
        eprintln!("srgen: {} assertions fail on the original subject", g.evaluation.failing.len());
        return Ok(EXIT_EVAL_FAILURE);
    }
    Ok(EXIT_OK)
}

const CSV_HEADER: [&str; 9] =
    ["subject", "representation", "seed", "coverage", "mutation_score", "sr_rate", "mean_coherence", "n_tests", "evals_used"];

fn cmd_compare(a: CompareArgs) -> Result<i32, Failure> {
    let seeds = io::parse_seeds(&a.seeds).map_err(Failure::config)?;
    let mut files = a.subjects.clone();
    if let Some(dir) = &a.corpus {
        files.extend(io::corpus_files(dir).map_err(Failure::input)?);
    }
    if files.is_empty() {
        return Err(Failure::config(anyhow!("no subjects given (pass files or --corpus DIR)")));
    }
    let base = base_config(&a.tuning)?;
    if let Some(t) = a.tuning.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::config(anyhow!("tolerance {t} must be finite and non-negative")));
        }
    }
    let overrides = overrides(&a.tuning);

    // A subject that does not load fails all of its cells.
    let subjects: Vec<(String, anyhow::Result<(Subject, f64)>)> = files
        .iter()
        .map(|p| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string());
            let loaded = io::load_subject(p).and_then(|s| {
                let tol = match a.tuning.tolerance {
                    Some(t) => t,
                    None => io::manifest_tolerance(p)?.unwrap_or(DEFAULT_TOLERANCE),
                };
                Ok((s, tol))
            });
            (stem, loaded)
        })
        .collect();

    let mut jobs = Vec::new();
    for (i, _) in subjects.iter().enumerate() {
        for repr in Representation::ALL {
            for &seed in &seeds {
                jobs.push((i, repr, seed));
            }
        }
    }

    let threads = std::env::var("SRGEN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::config(anyhow!("cannot start worker threads: {e}")))?;
    let rows: Vec<RunRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, repr, seed)| {
                let (stem, loaded) = &subjects[i];
                let summary = match loaded {
                    Err(e) => {
                        eprintln!("srgen: {stem} {repr} seed {seed}: {e:#}");
                        None
                    }
                    Ok((subject, tol)) => {
                        let mut cfg = base.clone();
                        cfg.tolerance = *tol;
                        let cell = Cell {
                            subject,
                            repr,
                            seed,
                            cfg,
                            out: &a.tuning.out,
                            overrides: overrides.clone(),
                            dump_traces: false,
                        };
                        match run_cell(&cell) {
                            Ok(g) if g.evaluation.failing.is_empty() => Some(summarize(&g)),
                            Ok(g) => {
                                eprintln!(
                                    "srgen: {stem} {repr} seed {seed}: {} assertions fail on the original subject",
                                    g.evaluation.failing.len()
                                );
                                None
                            }
                            Err(f) => {
                                eprintln!("srgen: {stem} {repr} seed {seed}: {:#}", f.error);
                                None
                            }
                        }
                    }
                };
                RunRow { subject: stem.clone(), representation: repr, seed, summary }
            })
            .collect()
    });

    let table = compare(rows);
    write_comparison(&a.tuning.out, &table).map_err(Failure::input)?;
    let failed = table.rows.iter().filter(|r| r.summary.is_none()).count();
    println!(
        "{} runs, {} failed; {}",
        table.rows.len(),
        failed,
        a.tuning.out.join("comparison.csv").display()
    );
    Ok(if failed > 0 { EXIT_EVAL_FAILURE } else { EXIT_OK })
}

fn summarize(g: &Generated) -> RunSummary {
    let m = &g.evaluation.metrics;
    RunSummary {
        coverage: m.coverage,
        mutation_score: m.mutation_score,
        sr_rate: m.sr_rate,
        mean_coherence: m.mean_coherence,
        n_tests: g.evaluation.suite.len(),
        evals_used: g.stats.evaluations,
    }
}

/// Per-run rows, then one row of medians per (subject, representation)
/// with `summary` in the seed column. Failed runs read `failed`.
fn write_comparison(out: &Path, t: &ComparisonTable) -> anyhow::Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let path = out.join("comparison.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(CSV_HEADER)?;
    for r in &t.rows {
        let mut rec = vec![r.subject.clone(), r.representation.to_string(), r.seed.to_string()];
        match &r.summary {
            Some(s) => rec.extend([
                s.coverage.to_string(),
                s.mutation_score.to_string(),
                s.sr_rate.to_string(),
                s.mean_coherence.to_string(),
                s.n_tests.to_string(),
                s.evals_used.to_string(),
            ]),
            None => rec.extend(std::iter::repeat_n("failed".to_string(), 6)),
        }
        w.write_record(&rec)?;
    }
    for s in &t.summary {
        w.write_record([
            s.subject.clone(),
            s.representation.to_string(),
            "summary".into(),
            s.coverage.median.to_string(),
            s.mutation_score.median.to_string(),
            s.sr_rate.median.to_string(),
            s.mean_coherence.median.to_string(),
            s.n_tests.median.to_string(),
            s.evals_used.median.to_string(),
        ])?;
    }
    w.flush()?;
    let json = out.join("comparison.json");
    fs::write(&json, serde_json::to_string_pretty(t)? + "\n").with_context(|| format!("cannot write {}", json.display()))?;
    Ok(())
}

fn cmd_mutants(a: MutantsArgs) -> Result<i32, Failure> {
    let subject = io::load_subject(&a.subject).map_err(Failure::input)?;
    let ops = a.operators.unwrap_or_else(|| Operator::ALL.to_vec());
    let set = MutantSet::with_operators(&subject.unit, &ops);
    let mut out = String::new();
    for m in &set.mutants {
        out.push_str(&serde_json::to_string(m).map_err(|e| Failure::input(e.into()))?);
        out.push('\n');
    }
    print!("{out}");
    Ok(EXIT_OK)
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<i32, Failure> {
    let subject = io::load_subject(&a.subject).map_err(Failure::input)?;
    let tol = tolerance_for(a.tolerance, &subject.path)?;
    let limits = limits(a.step_limit)?;
    let text = fs::read_to_string(&a.tests)
        .with_context(|| format!("cannot read {}", a.tests.display()))
        .map_err(Failure::input)?;
    let parsed = parse_tests(&subject.unit, &text, tol)
        .map_err(|e| Failure::input(anyhow!("{}:{e}", a.tests.display())))?;
    let ops = a.operators.unwrap_or_else(|| Operator::ALL.to_vec());
    let mutants = MutantSet::with_operators(&subject.unit, &ops);
    let goals = GoalIndex::new(&subject.unit);
    let tests = parsed.into_iter().map(|p| (p.name, p.test, p.assertions)).collect();
    let e = evaluate_suite(&subject.unit, &goals, tests, &mutants, limits);
    let report = EvaluateReport {
        subject: subject.path.display().to_string(),
        tests_file: a.tests.display().to_string(),
        metrics: MetricsSection::new(&e),
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.into()))?);
    if !e.failing.is_empty() {
        eprintln!("srgen: {} assertions fail on the original subject", e.failing.len());
        return Ok(EXIT_EVAL_FAILURE);
    }
    Ok(EXIT_OK)
}
