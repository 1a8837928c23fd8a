//! JSON documents written next to every run.

use serde::{Deserialize, Serialize};
use srgen_core::chromosome::Representation;
use srgen_core::metrics::{SuiteMetrics, TestRecord};
use srgen_core::pipeline::{Evaluation, GenerateConfig};
use srgen_core::runtime::{execute_test, focal_window, Limits};
use srgen_core::search::{CurvePoint, SearchStats};
use srgen_core::subject::{GoalIndex, SubjectUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub total: usize,
    pub covered: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillTally {
    pub total: usize,
    pub killed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSection {
    pub generations: usize,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSection {
    pub tests_file: String,
    pub n_tests: usize,
    pub notes: Vec<String>,
    pub metrics: MetricsSection,
}

/// Suite-level numbers shared by generation reports and `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSection {
    pub goals: Tally,
    pub coverage: f64,
    pub mutants: KillTally,
    pub mutation_score: f64,
    pub sr_rate: f64,
    pub mean_coherence: f64,
    pub no_mutants: bool,
    pub empty_suite: bool,
    pub failing_assertions: Vec<FailingAssertion>,
    pub tests: Vec<TestRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailingAssertion {
    pub test: String,
    pub assertion: usize,
}

impl MetricsSection {
    pub fn new(e: &Evaluation) -> Self {
        let m: &SuiteMetrics = &e.metrics;
        MetricsSection {
            goals: Tally { total: m.goals_total, covered: m.goals_covered },
            coverage: m.coverage,
            mutants: KillTally { total: m.mutants_total, killed: m.mutants_killed },
            mutation_score: m.mutation_score,
            sr_rate: m.sr_rate,
            mean_coherence: m.mean_coherence,
            no_mutants: m.no_mutants,
            empty_suite: m.empty_suite,
            failing_assertions: e
                .failing
                .iter()
                .map(|(test, assertion)| FailingAssertion { test: test.clone(), assertion: *assertion })
                .collect(),
            tests: m.tests.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    pub representation: Representation,
    pub seed: u64,
    pub budget_used: u64,
    #[serde(flatten)]
    pub metrics: MetricsSection,
    pub search: SearchSection,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub split: Option<SplitSection>,
}

impl Report {
    pub fn new(subject: &str, repr: Representation, seed: u64, stats: &SearchStats, e: &Evaluation) -> Self {
        Report {
            subject: subject.into(),
            representation: repr,
            seed,
            budget_used: stats.evaluations,
            metrics: MetricsSection::new(e),
            search: SearchSection { generations: stats.generations, curve: stats.curve.clone() },
            split: None,
        }
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subject: String,
    pub representation: Representation,
    pub seed: u64,
    /// Flags given on the command line, as typed.
    pub overrides: Vec<String>,
    pub config: EffectiveConfig,
    pub output_dir: String,
    pub tool_version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveConfig {
    pub population: usize,
    pub budget: u64,
    pub crossover_rate: f64,
    pub max_len: usize,
    pub init_len: usize,
    pub step_limit: u64,
    pub tolerance: f64,
    pub operators: Vec<String>,
    pub split: bool,
    pub aaa_comments: bool,
}

impl EffectiveConfig {
    pub fn new(cfg: &GenerateConfig) -> Self {
        let s = &cfg.search;
        EffectiveConfig {
            population: s.population_size,
            budget: s.max_evaluations,
            crossover_rate: s.crossover_rate,
            max_len: s.max_len,
            init_len: s.init_len,
            step_limit: s.limits.step_limit,
            tolerance: cfg.tolerance,
            operators: cfg.operators.iter().map(|o| o.to_string()).collect(),
            split: cfg.split,
            aaa_comments: cfg.style.aaa_comments,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDump {
    pub test: String,
    pub steps: u64,
    pub timeout: bool,
    pub covered: Vec<usize>,
    /// (goal id, smallest distance) for every goal evaluated in the
    /// counted statements.
    pub distances: Vec<(usize, f64)>,
}

pub fn dump_traces(unit: &SubjectUnit, e: &Evaluation, limits: Limits) -> Vec<TraceDump> {
    let goals = GoalIndex::new(unit);
    e.suite
        .iter()
        .zip(&e.names)
        .map(|(t, name)| {
            let tr = execute_test(unit, &goals, &t.test, limits);
            let w = focal_window(&t.test);
            let dist = tr.branch_min_distance(w.clone());
            TraceDump {
                test: name.clone(),
                steps: tr.steps,
                timeout: tr.timeout,
                covered: tr.covered(w).into_iter().map(|(g, _)| g).collect(),
                distances: dist.iter().enumerate().filter(|(_, d)| d.is_finite()).map(|(g, d)| (g, *d)).collect(),
            }
        })
        .collect()
}

/// What `evaluate` prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub subject: String,
    pub tests_file: String,
    #[serde(flatten)]
    pub metrics: MetricsSection,
}
