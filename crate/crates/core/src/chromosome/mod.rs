//! Test-case chromosomes and their genetic operators.
//!
//! A test is a list of statements. Variables are not named: a statement
//! refers to the value another statement produced by that statement's
//! index, so `Method { receiver: 2, .. }` calls on whatever statement 2
//! built. Assignments overwrite their target and define nothing.

mod factory;
mod ops;
mod repair;
mod validate;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::subject::{Kind, Literal, SubjectUnit, CONSTRUCTOR};

pub use factory::{Factory, FactoryConfig, FactoryError};
pub use ops::{crossover, mutate};
pub use repair::repair;
pub use validate::{validate, Violation};

/// Index of the statement whose result a reference points at.
pub type VarRef = usize;

/// Placeholder for a reference whose target was removed; repair rebinds or
/// drops every statement holding one.
pub const DANGLING: VarRef = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Baseline,
    Focal,
}

impl Representation {
    pub const ALL: [Representation; 2] = [Representation::Baseline, Representation::Focal];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Baseline => "baseline",
            Representation::Focal => "focal",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRepresentation(pub String);

impl fmt::Display for UnknownRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown representation `{}` (expected baseline or focal)", self.0)
    }
}

impl FromStr for Representation {
    type Err = UnknownRepresentation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Representation::Baseline),
            "focal" => Ok(Representation::Focal),
            _ => Err(UnknownRepresentation(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Primitive(Literal),
    Constructor { args: Vec<VarRef> },
    /// Read of a public field.
    Field { receiver: VarRef, field: String },
    Method { receiver: VarRef, method: String, args: Vec<VarRef> },
    Assignment { target: VarRef, source: VarRef },
}

impl Statement {
    /// Kind of the variable the statement defines, if any.
    pub fn defines(&self, unit: &SubjectUnit) -> Option<Kind> {
        match self {
            Statement::Primitive(l) => Some(l.kind()),
            Statement::Constructor { .. } => Some(Kind::Unit),
            Statement::Field { field, .. } => unit.field(field).map(|f| f.kind),
            Statement::Method { method, .. } => unit.method(method).and_then(|m| m.ret),
            Statement::Assignment { .. } => None,
        }
    }

    /// Every reference the statement holds, in slot order.
    pub fn refs(&self) -> Vec<VarRef> {
        match self {
            Statement::Primitive(_) => Vec::new(),
            Statement::Constructor { args } => args.clone(),
            Statement::Field { receiver, .. } => alloc::vec![*receiver],
            Statement::Method { receiver, args, .. } => {
                let mut v = alloc::vec![*receiver];
                v.extend_from_slice(args);
                v
            }
            Statement::Assignment { target, source } => alloc::vec![*target, *source],
        }
    }

    pub fn refs_mut(&mut self) -> Vec<&mut VarRef> {
        match self {
            Statement::Primitive(_) => Vec::new(),
            Statement::Constructor { args } => args.iter_mut().collect(),
            Statement::Field { receiver, .. } => alloc::vec![receiver],
            Statement::Method { receiver, args, .. } => {
                let mut v = alloc::vec![receiver];
                v.extend(args.iter_mut());
                v
            }
            Statement::Assignment { target, source } => alloc::vec![target, source],
        }
    }

    /// Kind each reference slot must have, parallel to `refs`. `None` for
    /// assignment slots, whose kinds only need to agree with each other.
    pub fn slot_kinds(&self, unit: &SubjectUnit) -> Option<Vec<Option<Kind>>> {
        Some(match self {
            Statement::Primitive(_) => Vec::new(),
            Statement::Constructor { .. } => unit.constructor.params.iter().map(|p| Some(p.kind)).collect(),
            Statement::Field { .. } => alloc::vec![Some(Kind::Unit)],
            Statement::Method { method, .. } => {
                let m = unit.method(method)?;
                let mut v = alloc::vec![Some(Kind::Unit)];
                v.extend(m.params.iter().map(|p| Some(p.kind)));
                v
            }
            Statement::Assignment { .. } => alloc::vec![None, None],
        })
    }

    /// Name of the callable a statement invokes.
    pub fn callee(&self) -> Option<&str> {
        match self {
            Statement::Constructor { .. } => Some(CONSTRUCTOR),
            Statement::Method { method, .. } => Some(method),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub repr: Representation,
    pub statements: Vec<Statement>,
    /// Set iff `repr` is focal; the last statement invokes it.
    pub focal_method: Option<String>,
}

impl TestCase {
    pub fn new(repr: Representation, focal_method: Option<String>) -> Self {
        TestCase { repr, statements: Vec::new(), focal_method }
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn focal_index(&self) -> Option<usize> {
        match self.repr {
            Representation::Focal if !self.statements.is_empty() => Some(self.statements.len() - 1),
            _ => None,
        }
    }

    /// Statements that may be deleted or moved by the operators.
    pub fn setup_len(&self) -> usize {
        match self.repr {
            Representation::Baseline => self.statements.len(),
            Representation::Focal => self.statements.len().saturating_sub(1),
        }
    }

    /// Kind of variable `v`, if statement `v` defines one.
    pub fn var_kind(&self, unit: &SubjectUnit, v: VarRef) -> Option<Kind> {
        self.statements.get(v).and_then(|s| s.defines(unit))
    }

    /// Variables of kind `k` defined strictly before `pos`.
    pub fn vars_before(&self, unit: &SubjectUnit, pos: usize, k: Kind) -> Vec<VarRef> {
        (0..pos.min(self.statements.len())).filter(|&i| self.var_kind(unit, i) == Some(k)).collect()
    }

    /// Inserts a statement, shifting later references.
    pub fn insert(&mut self, pos: usize, s: Statement) {
        for later in &mut self.statements[pos..] {
            for r in later.refs_mut() {
                if *r != DANGLING && *r >= pos {
                    *r += 1;
                }
            }
        }
        self.statements.insert(pos, s);
    }

    /// Removes a statement; references to it become `DANGLING`, later ones
    /// shift down.
    pub fn remove(&mut self, pos: usize) -> Statement {
        let s = self.statements.remove(pos);
        for later in &mut self.statements[pos..] {
            for r in later.refs_mut() {
                if *r == pos {
                    *r = DANGLING;
                } else if *r != DANGLING && *r > pos {
                    *r -= 1;
                }
            }
        }
        s
    }

    /// Whether any later statement refers to statement `v`.
    pub fn is_used(&self, v: VarRef) -> bool {
        self.statements[v + 1..].iter().any(|s| s.refs().contains(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representation_parses() {
        assert_eq!("focal".parse(), Ok(Representation::Focal));
        assert!("bogus".parse::<Representation>().is_err());
    }

    #[test]
    fn insert_and_remove_shift_references() {
        let mut t = TestCase::new(Representation::Baseline, None);
        t.statements.push(Statement::Primitive(Literal::Int(1)));
        t.statements.push(Statement::Constructor { args: alloc::vec![0] });
        t.statements.push(Statement::Method { receiver: 1, method: "m".into(), args: alloc::vec![0] });
        t.insert(1, Statement::Primitive(Literal::Int(2)));
        assert_eq!(t.statements[3].refs(), [2, 0]);
        t.remove(0);
        assert_eq!(t.statements[2].refs(), [1, DANGLING]);
        assert_eq!(t.statements[1].refs(), [DANGLING]);
    }
}
