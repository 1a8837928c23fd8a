use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Representation, Statement, TestCase, DANGLING};
use crate::subject::{Kind, SubjectUnit, CONSTRUCTOR};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Length { len: usize, max: usize },
    /// Reference to a later, missing or non-defining statement.
    BadReference { stmt: usize, slot: usize },
    KindMismatch { stmt: usize, slot: usize },
    Arity { stmt: usize },
    UnknownMethod { stmt: usize, name: String },
    PrivateField { stmt: usize, name: String },
    SelfAssignment { stmt: usize },
    FocalShape,
    FocalOnBaseline,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Length { len, max } => write!(f, "length {len} outside 1..={max}"),
            Violation::BadReference { stmt, slot } => write!(f, "statement {stmt}: slot {slot} refers to no earlier variable"),
            Violation::KindMismatch { stmt, slot } => write!(f, "statement {stmt}: slot {slot} has the wrong kind"),
            Violation::Arity { stmt } => write!(f, "statement {stmt}: wrong number of arguments"),
            Violation::UnknownMethod { stmt, name } => write!(f, "statement {stmt}: unknown method `{name}`"),
            Violation::PrivateField { stmt, name } => write!(f, "statement {stmt}: field `{name}` is not public"),
            Violation::SelfAssignment { stmt } => write!(f, "statement {stmt}: assignment to itself"),
            Violation::FocalShape => f.write_str("last statement does not invoke the focal method"),
            Violation::FocalOnBaseline => f.write_str("baseline test carries a focal method"),
        }
    }
}

/// Checks every chromosome invariant; an empty result means well-formed.
pub fn validate(unit: &SubjectUnit, t: &TestCase, max_len: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = t.statements.len();
    if n == 0 || n > max_len {
        out.push(Violation::Length { len: n, max: max_len });
    }
    for (i, s) in t.statements.iter().enumerate() {
        match s {
            Statement::Method { method, .. } if unit.method(method).is_none() => {
                out.push(Violation::UnknownMethod { stmt: i, name: method.clone() });
                continue;
            }
            Statement::Field { field, .. } if !unit.field(field).is_some_and(|f| f.public) => {
                out.push(Violation::PrivateField { stmt: i, name: field.clone() });
                continue;
            }
            _ => {}
        }
        let refs = s.refs();
        let kinds = s.slot_kinds(unit).unwrap_or_default();
        if refs.len() != kinds.len() {
            out.push(Violation::Arity { stmt: i });
            continue;
        }
        let mut assigned: Vec<Kind> = Vec::new();
        for (slot, (&r, want)) in refs.iter().zip(&kinds).enumerate() {
            let got = if r == DANGLING || r >= i { None } else { t.var_kind(unit, r) };
            let Some(got) = got else {
                out.push(Violation::BadReference { stmt: i, slot });
                continue;
            };
            match want {
                Some(w) if *w != got => out.push(Violation::KindMismatch { stmt: i, slot }),
                Some(_) => {}
                None => assigned.push(got),
            }
        }
        if let Statement::Assignment { target, source } = s {
            if assigned.len() == 2 && assigned[0] != assigned[1] {
                out.push(Violation::KindMismatch { stmt: i, slot: 1 });
            }
            if target == source {
                out.push(Violation::SelfAssignment { stmt: i });
            }
        }
    }
    match (t.repr, &t.focal_method) {
        (Representation::Baseline, Some(_)) => out.push(Violation::FocalOnBaseline),
        (Representation::Baseline, None) => {}
        (Representation::Focal, None) => out.push(Violation::FocalShape),
        (Representation::Focal, Some(focal)) => {
            let ok = match t.statements.last() {
                Some(Statement::Method { method, .. }) => method == focal && n >= 2,
                Some(Statement::Constructor { .. }) => focal == CONSTRUCTOR,
                _ => false,
            };
            if !ok {
                out.push(Violation::FocalShape);
            }
        }
    }
    out
}
