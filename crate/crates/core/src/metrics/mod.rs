//! Suite metrics and the cross-representation comparison.

mod compare;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::assertions::{in_scope, inferred_focal, AssertedTest, Assertion};
use crate::mutation::{mutation_score, Mutant};
use crate::runtime::{execute_test, focal_window, Limits};
use crate::subject::{static_call_closure, GoalIndex, SubjectUnit};

pub use compare::{compare, quantile, RunRow, RunSummary, Stat, SummaryRow, ComparisonTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub name: String,
    pub focal_method: Option<String>,
    /// The method coherence is measured against: the focal method, or the
    /// one a reader would infer for a statement list.
    pub inferred_focal: Option<String>,
    pub n_statements: usize,
    pub n_assertions: usize,
    pub fallback: bool,
    /// Every method enclosing a mutant the assertions kill.
    pub killed_methods: BTreeSet<String>,
    pub responsible_methods: BTreeSet<String>,
    pub coherence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteMetrics {
    pub goals_total: usize,
    pub goals_covered: usize,
    pub coverage: f64,
    pub mutants_total: usize,
    pub mutants_killed: usize,
    pub mutation_score: f64,
    pub no_mutants: bool,
    pub sr_rate: f64,
    pub mean_coherence: f64,
    pub empty_suite: bool,
    pub tests: Vec<TestRecord>,
}

/// Enclosing methods of every mutant killed by the test's assertions,
/// fallback assertions aside.
pub fn killed_methods(t: &AssertedTest, mutants: &[Mutant]) -> BTreeSet<String> {
    t.assertions
        .iter()
        .filter(|a| !a.fallback)
        .flat_map(|a| a.killed.iter().map(|&m| mutants[m].method.clone()))
        .collect()
}

/// Methods one assertion holds to account. In a test declaring a focal
/// method, an assertion killing a mutant in the focal call closure answers
/// for the focal method alone; the other mutants it kills sit in setup
/// code. Otherwise it answers for every method it kills a mutant in.
pub fn assertion_responsibility(unit: &SubjectUnit, t: &AssertedTest, a: &Assertion, mutants: &[Mutant]) -> BTreeSet<String> {
    if let Some(focal) = t.test.focal_method.as_deref() {
        let scope = static_call_closure(unit, focal).unwrap_or_default();
        if in_scope(a, mutants, &scope) {
            return BTreeSet::from([String::from(focal)]);
        }
    }
    a.killed.iter().map(|&m| mutants[m].method.clone()).collect()
}

/// Union of the non-fallback assertions' responsibilities.
pub fn responsible_methods(unit: &SubjectUnit, t: &AssertedTest, mutants: &[Mutant]) -> BTreeSet<String> {
    t.assertions
        .iter()
        .filter(|a| !a.fallback)
        .flat_map(|a| assertion_responsibility(unit, t, a, mutants))
        .collect()
}

/// Share of non-fallback assertions answering only for methods inside the
/// call closure of the (inferred) focal method, and for at least one;
/// 1.0 when there are none. For a focal test this is the share killing a
/// mutant in the closure.
pub fn coherence(unit: &SubjectUnit, t: &AssertedTest, mutants: &[Mutant]) -> f64 {
    let counted: Vec<_> = t.assertions.iter().filter(|a| !a.fallback).collect();
    if counted.is_empty() {
        return 1.0;
    }
    let scope = inferred_focal(&t.test)
        .and_then(|(_, m)| static_call_closure(unit, m).ok())
        .unwrap_or_default();
    let hits = counted
        .iter()
        .filter(|a| {
            let r = assertion_responsibility(unit, t, a, mutants);
            !r.is_empty() && r.is_subset(&scope)
        })
        .count();
    hits as f64 / counted.len() as f64
}

/// Metrics of a suite whose kill matrices are complete. `names` are the
/// emitted test names, one per test.
pub fn suite_metrics(
    unit: &SubjectUnit,
    goals: &GoalIndex,
    suite: &[AssertedTest],
    names: &[String],
    mutants: &[Mutant],
    limits: Limits,
) -> SuiteMetrics {
    let mut covered = BTreeSet::new();
    for t in suite {
        let trace = execute_test(unit, goals, &t.test, limits);
        covered.extend(trace.covered(focal_window(&t.test)).into_iter().map(|(g, _)| g));
    }
    let matrices: Vec<_> = suite.iter().map(|t| t.matrix.clone()).collect();
    let score = mutation_score(&matrices, mutants.len());
    let tests: Vec<TestRecord> = suite
        .iter()
        .zip(names)
        .map(|(t, name)| TestRecord {
            name: name.clone(),
            focal_method: t.test.focal_method.clone(),
            inferred_focal: inferred_focal(&t.test).map(|(_, m)| m.into()),
            n_statements: t.test.len(),
            n_assertions: t.assertions.len(),
            fallback: t.assertions.iter().any(|a| a.fallback),
            killed_methods: killed_methods(t, mutants),
            responsible_methods: responsible_methods(unit, t, mutants),
            coherence: coherence(unit, t, mutants),
        })
        .collect();
    let n = tests.len();
    let (sr_rate, mean_coherence) = if n == 0 {
        (0.0, 0.0)
    } else {
        let sr = tests.iter().filter(|r| r.responsible_methods.len() <= 1).count() as f64 / n as f64;
        let coh = tests.iter().map(|r| r.coherence).sum::<f64>() / n as f64;
        (sr, coh)
    };
    let goals_total = goals.len();
    SuiteMetrics {
        goals_total,
        goals_covered: covered.len(),
        coverage: if n == 0 || goals_total == 0 { 0.0 } else { covered.len() as f64 / goals_total as f64 },
        mutants_total: score.total,
        mutants_killed: score.killed,
        mutation_score: if n == 0 { 0.0 } else { score.score },
        no_mutants: score.no_mutants,
        sr_rate,
        mean_coherence,
        empty_suite: n == 0,
        tests,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subject::parse_subject;

    #[test]
    fn empty_suite_reports_zeros() {
        let u = parse_subject("unit Empty { constructor() {} }").unwrap();
        let idx = GoalIndex::new(&u);
        let m = suite_metrics(&u, &idx, &[], &[], &[], Limits::default());
        assert!(m.empty_suite);
        assert_eq!((m.coverage, m.sr_rate, m.mean_coherence), (0.0, 0.0, 0.0));
    }
}
