use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{generate_assertions, AssertedTest, AssertionGroup};
use crate::chromosome::{validate, Representation, Statement, TestCase};
use crate::mutation::MutantSet;
use crate::runtime::{observe, run, Limits};
use crate::subject::{GoalIndex, SubjectUnit, CONSTRUCTOR};

#[derive(Debug, Clone, Default)]
pub struct Split {
    pub tests: Vec<AssertedTest>,
    /// One line per group that produced no test.
    pub notes: Vec<String>,
}

/// One focal test per group: the statement list cut after the last direct
/// call of the group's method, which becomes the focal statement. The
/// assertions are generated afresh for the cut test and checked on the
/// original subject.
#[allow(clippy::too_many_arguments)]
pub fn split_test(
    unit: &SubjectUnit,
    goals: &GoalIndex,
    test: &TestCase,
    groups: &[AssertionGroup],
    mutants: &MutantSet,
    limits: Limits,
    tolerance: f64,
    max_len: usize,
) -> Split {
    let mut out = Split::default();
    for g in groups {
        let last = test.statements.iter().rposition(|s| match s {
            Statement::Method { method, .. } => *method == g.method,
            Statement::Constructor { .. } => g.method == CONSTRUCTOR,
            _ => false,
        });
        let Some(last) = last else {
            out.notes.push(format!("{}: never called directly, no test", g.method));
            continue;
        };
        let mut t = TestCase::new(Representation::Focal, Some(g.method.clone()));
        t.statements.extend_from_slice(&test.statements[..=last]);
        if !validate(unit, &t, max_len).is_empty() {
            out.notes.push(format!("{}: cut test is not a valid focal test, dropped", g.method));
            continue;
        }
        let asserted = generate_assertions(unit, goals, &t, mutants, limits, tolerance);
        let mut exec = run(unit, goals, &t, limits);
        if asserted.assertions.iter().any(|a| !observe(&mut exec, &a.at).is_some_and(|o| a.holds(&o))) {
            out.notes.push(format!("{}: assertions fail on the original subject, dropped", g.method));
            continue;
        }
        out.tests.push(asserted);
    }
    out
}
