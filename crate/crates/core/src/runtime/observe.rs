use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Execution, InspectorResult, Outcome, Value};
use crate::chromosome::{Representation, Statement, TestCase, VarRef};
use crate::subject::{Kind, SubjectUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObsKind {
    StatementReturn,
    InspectorValue,
    ExceptionStatus,
}

/// Where an observation is taken. `stmt` is 0-based; inspector
/// observations are taken after statement `stmt` on variable `receiver`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObsRef {
    pub kind: ObsKind,
    pub stmt: usize,
    pub receiver: Option<VarRef>,
    pub inspector: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum Observed {
    Value(Value),
    /// Completed without an exception (exception-status observations).
    Normal,
    Thrown(String),
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub at: ObsRef,
    pub value: Observed,
}

/// Observations of a finished execution.
///
/// Statement lists observe every value-returning call, the status of a
/// statement that threw, and every inspector on every live instance at the
/// end. Focal tests observe only the focal call: its return value, its
/// status, and the inspectors of the instances it touched (receiver and
/// reference arguments), taken on the post-state even after a throw.
pub fn harvest_observations(exec: &mut Execution<'_>, unit: &SubjectUnit, test: &TestCase) -> Vec<Observation> {
    let mut out = Vec::new();
    let n = test.len();
    if n == 0 || exec.trace.timeout {
        return out;
    }
    let (from, instances): (usize, Vec<VarRef>) = match test.repr {
        Representation::Baseline => {
            let live = (0..n)
                .filter(|&v| test.var_kind(unit, v) == Some(Kind::Unit) && matches!(exec.var(v), Some(Value::Ref(_))))
                .collect();
            (0, live)
        }
        Representation::Focal => {
            let f = n - 1;
            if exec.trace.outcomes[f] == Outcome::Skipped {
                return out;
            }
            let mut touched = Vec::new();
            match &test.statements[f] {
                Statement::Constructor { .. } => touched.push(f),
                Statement::Method { receiver, args, .. } => {
                    touched.push(*receiver);
                    touched.extend(args.iter().copied().filter(|&a| test.var_kind(unit, a) == Some(Kind::Unit)));
                }
                _ => {}
            }
            let mut seen = Vec::new();
            touched.retain(|v| {
                let fresh = matches!(exec.var(*v), Some(Value::Ref(_))) && !seen.contains(v);
                seen.push(*v);
                fresh
            });
            (f, touched)
        }
    };
    for i in from..n {
        let returns = matches!(&test.statements[i], Statement::Method { method, .. }
            if unit.method(method).is_some_and(|m| m.ret.is_some()));
        let status_wanted = test.repr == Representation::Focal;
        match &exec.trace.outcomes[i] {
            Outcome::Normal(v) => {
                if returns {
                    out.push(Observation { at: obs(ObsKind::StatementReturn, i), value: Observed::Value(v.clone()) });
                }
                if status_wanted {
                    out.push(Observation { at: obs(ObsKind::ExceptionStatus, i), value: Observed::Normal });
                }
            }
            Outcome::Exception(t) => {
                out.push(Observation { at: obs(ObsKind::ExceptionStatus, i), value: Observed::Thrown(t.clone()) });
            }
            Outcome::Skipped | Outcome::Timeout => {}
        }
    }
    let at = n - 1;
    for v in instances {
        for insp in unit.inspectors() {
            let r = ObsRef { kind: ObsKind::InspectorValue, stmt: at, receiver: Some(v), inspector: Some(insp.name.clone()) };
            if let Some(value) = observe(exec, &r) {
                out.push(Observation { at: r, value });
            }
        }
    }
    out
}

fn obs(kind: ObsKind, stmt: usize) -> ObsRef {
    ObsRef { kind, stmt, receiver: None, inspector: None }
}

/// Takes observation `r` on an execution, possibly of a mutant. `None`
/// means the observation point was never reached.
pub fn observe(exec: &mut Execution<'_>, r: &ObsRef) -> Option<Observed> {
    if exec.trace.timeout {
        return Some(Observed::Timeout);
    }
    let outcome = exec.trace.outcomes.get(r.stmt)?;
    match r.kind {
        ObsKind::StatementReturn => match outcome {
            Outcome::Normal(v) => Some(Observed::Value(v.clone())),
            Outcome::Exception(t) => Some(Observed::Thrown(t.clone())),
            Outcome::Timeout => Some(Observed::Timeout),
            Outcome::Skipped => None,
        },
        ObsKind::ExceptionStatus => match outcome {
            Outcome::Normal(_) => Some(Observed::Normal),
            Outcome::Exception(t) => Some(Observed::Thrown(t.clone())),
            Outcome::Timeout => Some(Observed::Timeout),
            Outcome::Skipped => None,
        },
        ObsKind::InspectorValue => {
            let recv = exec.var(r.receiver?)?.clone();
            Some(match exec.inspect(&recv, r.inspector.as_deref()?) {
                InspectorResult::Value(v) => Observed::Value(v),
                InspectorResult::Thrown(t) => Observed::Thrown(t),
                InspectorResult::Timeout => Observed::Timeout,
            })
        }
    }
}
