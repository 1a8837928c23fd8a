//! Assertions from observations: candidates, the greedy unique-killer
//! cover, the focal-scope filter, per-method grouping and the split of
//! multi-responsibility tests.

mod split;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chromosome::{Representation, Statement, TestCase};
use crate::mutation::{run_kill_analysis, KillMatrix, Mutant, MutantSet};
use crate::runtime::{harvest_observations, run, ObsKind, ObsRef, Observation, Observed, Limits, Value};
use crate::subject::{static_call_closure, GoalIndex, SubjectUnit, CONSTRUCTOR};

pub use split::{split_test, Split};

/// Default absolute tolerance for real-valued comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub id: usize,
    pub at: ObsRef,
    /// The value observed on the original subject, exactly.
    pub expected: Observed,
    pub tolerance: f64,
    /// Mutants this assertion kills, filled from a kill matrix.
    pub killed: BTreeSet<usize>,
    /// Kept only because nothing else survived selection.
    pub fallback: bool,
}

impl Assertion {
    /// Whether an observation, typically from a mutant run, agrees with the
    /// expectation.
    pub fn holds(&self, got: &Observed) -> bool {
        match (&self.expected, got) {
            (Observed::Value(a), Observed::Value(b)) => a.matches(b, self.tolerance),
            (a, b) => a == b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionGroup {
    pub method: String,
    pub assertions: Vec<usize>,
}

/// One assertion per observation that can be written down as a literal:
/// references, nulls, non-finite reals and timeouts are skipped.
pub fn candidate_assertions(observations: &[Observation], tolerance: f64) -> Vec<Assertion> {
    observations
        .iter()
        .filter(|o| match &o.value {
            Observed::Value(Value::Ref(_) | Value::None) | Observed::Timeout => false,
            Observed::Value(Value::Float(f)) => f.is_finite(),
            _ => true,
        })
        .enumerate()
        .map(|(id, o)| Assertion {
            id,
            at: o.at.clone(),
            expected: o.value.clone(),
            tolerance,
            killed: BTreeSet::new(),
            fallback: false,
        })
        .collect()
}

/// The statement a reader would take as the behavior under test: the
/// focal statement, or for a statement list the last method call (the
/// last constructor call if there is none).
pub fn inferred_focal(test: &TestCase) -> Option<(usize, &str)> {
    if let (Some(i), Some(m)) = (test.focal_index(), test.focal_method.as_deref()) {
        return Some((i, m));
    }
    let last = |ctor: bool| {
        test.statements.iter().enumerate().rev().find_map(|(i, s)| match s {
            Statement::Method { method, .. } if !ctor => Some((i, method.as_str())),
            Statement::Constructor { .. } if ctor => Some((i, CONSTRUCTOR)),
            _ => None,
        })
    };
    last(false).or_else(|| last(true))
}

/// Index of the candidate on the focal statement's outcome: its return
/// value when it has one, else its exception status.
pub fn fallback_candidate(test: &TestCase, candidates: &[Assertion]) -> Option<usize> {
    let (stmt, _) = inferred_focal(test)?;
    let on = |k: ObsKind| candidates.iter().position(|a| a.at.kind == k && a.at.stmt == stmt && a.at.receiver.is_none());
    on(ObsKind::StatementReturn).or_else(|| on(ObsKind::ExceptionStatus))
}

/// Greedy set cover over the candidates' kill sets: take the candidate
/// adding the most uncovered mutants (lowest index on ties) until none adds
/// any. Returns candidate indices in pick order. An empty cover falls back
/// to `fallback` when given.
pub fn select_unique_killers(candidates: &[Assertion], fallback: Option<usize>) -> Vec<usize> {
    let mut covered = BTreeSet::new();
    let mut kept = Vec::new();
    loop {
        let best = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| !kept.contains(i))
            .map(|(i, a)| (i, a.killed.difference(&covered).count()))
            .filter(|&(_, gain)| gain > 0)
            .fold(None, |acc: Option<(usize, usize)>, (i, g)| match acc {
                Some((_, bg)) if bg >= g => acc,
                _ => Some((i, g)),
            });
        let Some((i, _)) = best else { break };
        covered.extend(candidates[i].killed.iter().copied());
        kept.push(i);
    }
    if kept.is_empty() {
        kept.extend(fallback);
    }
    kept
}

/// Keeps the assertions that kill at least one mutant enclosed by a method
/// in `scope`. The fallback is always kept.
pub fn filter_focal(kept: &[usize], candidates: &[Assertion], mutants: &[Mutant], scope: &BTreeSet<String>) -> Vec<usize> {
    kept.iter()
        .copied()
        .filter(|&i| candidates[i].fallback || in_scope(&candidates[i], mutants, scope))
        .collect()
}

pub(crate) fn in_scope(a: &Assertion, mutants: &[Mutant], scope: &BTreeSet<String>) -> bool {
    a.killed.iter().any(|&m| scope.contains(&mutants[m].method))
}

/// One group per method enclosing a killed mutant, in declaration order
/// (constructor first). Assertion ids are listed in the order given.
pub fn group_by_method(kept: &[Assertion], mutants: &[Mutant], unit: &SubjectUnit) -> Vec<AssertionGroup> {
    unit.callables()
        .filter_map(|(_, m)| {
            let ids: Vec<usize> = kept
                .iter()
                .filter(|a| a.killed.iter().any(|&k| mutants[k].method == m.name))
                .map(|a| a.id)
                .collect();
            (!ids.is_empty()).then(|| AssertionGroup { method: m.name.clone(), assertions: ids })
        })
        .collect()
}

/// A test with its final assertions and their kill matrix rows.
#[derive(Debug, Clone)]
pub struct AssertedTest {
    pub test: TestCase,
    /// Renumbered 0.. in the order they are emitted.
    pub assertions: Vec<Assertion>,
    pub matrix: KillMatrix,
}

/// Observation harvesting, candidates, kill analysis, greedy cover and,
/// for focal tests, the focal-scope filter. Surviving assertions keep
/// observation order.
pub fn generate_assertions(
    unit: &SubjectUnit,
    goals: &GoalIndex,
    test: &TestCase,
    mutants: &MutantSet,
    limits: Limits,
    tolerance: f64,
) -> AssertedTest {
    let mut exec = run(unit, goals, test, limits);
    let obs = harvest_observations(&mut exec, unit, test);
    let mut cands = candidate_assertions(&obs, tolerance);
    let matrix = run_kill_analysis(goals, test, &cands, mutants, limits);
    for (i, a) in cands.iter_mut().enumerate() {
        a.killed = matrix.kills(i);
    }
    let mut kept = select_unique_killers(&cands, None);
    if test.repr == Representation::Focal {
        let focal = test.focal_method.as_deref().expect("focal test names its method");
        let scope = static_call_closure(unit, focal).expect("focal method exists");
        kept = filter_focal(&kept, &cands, &mutants.mutants, &scope);
    }
    // Also applied when the filter emptied a non-empty cover.
    if kept.is_empty() {
        if let Some(f) = fallback_candidate(test, &cands) {
            cands[f].fallback = true;
            kept.push(f);
        }
    }
    kept.sort_unstable();
    let assertions = kept
        .iter()
        .enumerate()
        .map(|(id, &i)| Assertion { id, ..cands[i].clone() })
        .collect();
    AssertedTest { test: test.clone(), assertions, matrix: matrix.select(&kept) }
}

/// Re-derives kill sets for assertions read back from a file and checks
/// them on the original subject. Returns the matrix and the ids of
/// assertions that fail on the original.
pub fn recheck(
    unit: &SubjectUnit,
    goals: &GoalIndex,
    test: &TestCase,
    assertions: &mut [Assertion],
    mutants: &MutantSet,
    limits: Limits,
) -> (KillMatrix, Vec<usize>) {
    let mut exec = run(unit, goals, test, limits);
    let failing = assertions
        .iter()
        .filter(|a| !crate::runtime::observe(&mut exec, &a.at).is_some_and(|o| a.holds(&o)))
        .map(|a| a.id)
        .collect();
    let matrix = run_kill_analysis(goals, test, assertions, mutants, limits);
    for (i, a) in assertions.iter_mut().enumerate() {
        a.killed = matrix.kills(i);
    }
    (matrix, failing)
}
