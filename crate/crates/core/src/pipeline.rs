//! Search, assertion generation, rendering and evaluation wired together.
//!
//! Generation renders its suite, reads the text back and evaluates what it
//! read, so the report of a run is exactly what `evaluate` computes on the
//! emitted file.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::assertions::{generate_assertions, group_by_method, recheck, split_test, AssertedTest, Assertion};
use crate::chromosome::{Representation, TestCase};
use crate::emitter::{parse_tests, render_suite, test_names, RenderedSuite, Style, TestParseError};
use crate::metrics::{responsible_methods, suite_metrics, SuiteMetrics};
use crate::mutation::{MutantSet, Operator};
use crate::runtime::Limits;
use crate::search::{run_search, Archive, ConfigError, SearchConfig, SearchStats};
use crate::subject::{GoalIndex, SubjectUnit};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateConfig {
    pub search: SearchConfig,
    pub tolerance: f64,
    pub operators: Vec<Operator>,
    pub style: Style,
    /// Also split statement-list tests with several responsibilities.
    pub split: bool,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            search: SearchConfig::default(),
            tolerance: crate::assertions::DEFAULT_TOLERANCE,
            operators: Operator::ALL.to_vec(),
            style: Style::default(),
            split: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    Config(ConfigError),
    /// The emitted text did not read back; a bug, never an input problem.
    Reparse(TestParseError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Config(e) => e.fmt(f),
            PipelineError::Reparse(e) => write!(f, "emitted suite does not read back: {e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

/// A suite after kill analysis, with its metrics.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub suite: Vec<AssertedTest>,
    pub names: Vec<String>,
    pub metrics: SuiteMetrics,
    /// (test name, assertion id) of every assertion failing on the
    /// original subject.
    pub failing: Vec<(String, usize)>,
}

/// Kill analysis and metrics for tests read from a file.
pub fn evaluate_suite(
    unit: &SubjectUnit,
    goals: &GoalIndex,
    tests: Vec<(String, TestCase, Vec<Assertion>)>,
    mutants: &MutantSet,
    limits: Limits,
) -> Evaluation {
    let mut suite = Vec::with_capacity(tests.len());
    let mut names = Vec::with_capacity(tests.len());
    let mut failing = Vec::new();
    for (name, test, mut assertions) in tests {
        let (matrix, bad) = recheck(unit, goals, &test, &mut assertions, mutants, limits);
        failing.extend(bad.into_iter().map(|id| (name.clone(), id)));
        suite.push(AssertedTest { test, assertions, matrix });
        names.push(name);
    }
    let metrics = suite_metrics(unit, goals, &suite, &names, &mutants.mutants, limits);
    Evaluation { suite, names, metrics, failing }
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub rendered: RenderedSuite,
    pub evaluation: Evaluation,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub archive: Archive,
    pub stats: SearchStats,
    pub rendered: RenderedSuite,
    pub evaluation: Evaluation,
    pub split: Option<SplitOutcome>,
}

fn render_and_read(
    unit: &SubjectUnit,
    goals: &GoalIndex,
    suite: &[AssertedTest],
    repr: Representation,
    mutants: &MutantSet,
    cfg: &GenerateConfig,
) -> Result<(RenderedSuite, Evaluation), PipelineError> {
    let rendered = render_suite(unit, suite, repr, cfg.style);
    let parsed = parse_tests(unit, &rendered.text(), cfg.tolerance).map_err(PipelineError::Reparse)?;
    let tests = parsed.into_iter().map(|p| (p.name, p.test, p.assertions)).collect();
    let evaluation = evaluate_suite(unit, goals, tests, mutants, cfg.search.limits);
    Ok((rendered, evaluation))
}

/// The full run for one subject, representation and seed.
pub fn generate(unit: &SubjectUnit, cfg: &GenerateConfig) -> Result<Generated, PipelineError> {
    let goals = GoalIndex::new(unit);
    let (archive, stats) = run_search(unit, &goals, &cfg.search).map_err(PipelineError::Config)?;
    let mutants = MutantSet::with_operators(unit, &cfg.operators);
    let limits = cfg.search.limits;
    let suite: Vec<AssertedTest> = archive
        .tests()
        .iter()
        .map(|t| generate_assertions(unit, &goals, t, &mutants, limits, cfg.tolerance))
        .collect();
    let repr = cfg.search.representation;
    let (rendered, evaluation) = render_and_read(unit, &goals, &suite, repr, &mutants, cfg)?;

    let split = if cfg.split && repr == Representation::Baseline {
        let mut pieces = Vec::new();
        let mut notes = Vec::new();
        for (t, name) in suite.iter().zip(&evaluation.names) {
            if responsible_methods(unit, t, &mutants.mutants).len() < 2 {
                continue;
            }
            let groups = group_by_method(&t.assertions, &mutants.mutants, unit);
            let s = split_test(unit, &goals, &t.test, &groups, &mutants, limits, cfg.tolerance, cfg.search.max_len);
            notes.extend(s.notes.into_iter().map(|n| alloc::format!("{name}: {n}")));
            pieces.extend(s.tests);
        }
        let (rendered, evaluation) = render_and_read(unit, &goals, &pieces, Representation::Focal, &mutants, cfg)?;
        Some(SplitOutcome { rendered, evaluation, notes })
    } else {
        None
    };
    Ok(Generated { archive, stats, rendered, evaluation, split })
}

/// Names the emitter gives a list of tests.
pub fn names_of(tests: &[TestCase]) -> Vec<String> {
    test_names(&tests.iter().collect::<Vec<_>>())
}
