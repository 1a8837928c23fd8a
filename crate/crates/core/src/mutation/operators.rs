use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::subject::{
    print_literal, BinOp, CallableId, Expr, Literal, Stmt, SubjectUnit, UnOp, ARITHMETIC_OPS, RELATIONAL_OPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// Arithmetic operator replacement.
    AOR,
    /// Relational operator replacement.
    ROR,
    /// Logical connector replacement.
    LCR,
    /// Constant replacement.
    CRP,
    /// Condition negation.
    NEG,
}

impl Operator {
    pub const ALL: [Operator; 5] = [Operator::AOR, Operator::ROR, Operator::LCR, Operator::CRP, Operator::NEG];
}

impl core::str::FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Operator::ALL
            .into_iter()
            .find(|o| format!("{o}").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown mutation operator `{s}` (expected AOR, ROR, LCR, CRP or NEG)"))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Replacement {
    Op(BinOp),
    Literal(Literal),
    Negate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mutant {
    pub id: usize,
    /// Enclosing method, `"constructor"` for the constructor.
    pub method: String,
    pub operator: Operator,
    /// Path from the method body down to the mutated node.
    pub location: String,
    pub description: String,
    #[serde(skip)]
    pub callable: CallableId,
    /// Preorder index of the mutated expression within the callable body.
    #[serde(skip)]
    pub node: usize,
    #[serde(skip)]
    pub replacement: Replacement,
}

/// All first-order mutants of a unit, in callable order, then expression
/// preorder, then operator table order. A conditional's negation comes
/// before the mutants inside it. Mutants with identical effect are kept.
pub fn generate_mutants(unit: &SubjectUnit) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (cid, m) in unit.callables() {
        let mut g = Gen { out: &mut out, callable: cid, method: &m.name, node: 0 };
        g.block(&m.body, &m.name);
    }
    out
}

struct Gen<'a> {
    out: &'a mut Vec<Mutant>,
    callable: CallableId,
    method: &'a str,
    node: usize,
}

impl Gen<'_> {
    fn push(&mut self, node: usize, operator: Operator, location: &str, description: String, replacement: Replacement) {
        self.out.push(Mutant {
            id: self.out.len(),
            method: self.method.into(),
            operator,
            location: location.into(),
            description,
            callable: self.callable,
            node,
            replacement,
        });
    }

    fn block(&mut self, body: &[Stmt], path: &str) {
        for (i, s) in body.iter().enumerate() {
            let here = format!("{path}.s{i}");
            match s {
                Stmt::Var { init: e, .. } => self.expr(e, &format!("{here}.init")),
                Stmt::Assign { value: e, .. } | Stmt::SetField { value: e, .. } => self.expr(e, &format!("{here}.value")),
                Stmt::Call(e) => self.expr(e, &format!("{here}.call")),
                Stmt::Return(Some(e)) => self.expr(e, &format!("{here}.ret")),
                Stmt::Return(None) | Stmt::Throw(_) => {}
                Stmt::If { cond, then_body, else_body, .. } => {
                    let at = format!("{here}.cond");
                    self.push(self.node, Operator::NEG, &at, "negate if condition".into(), Replacement::Negate);
                    self.expr(cond, &at);
                    self.block(then_body, &format!("{here}.then"));
                    if let Some(e) = else_body {
                        self.block(e, &format!("{here}.else"));
                    }
                }
                Stmt::While { cond, body, .. } => {
                    let at = format!("{here}.cond");
                    self.push(self.node, Operator::NEG, &at, "negate while condition".into(), Replacement::Negate);
                    self.expr(cond, &at);
                    self.block(body, &format!("{here}.body"));
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr, path: &str) {
        let node = self.node;
        self.node += 1;
        match e {
            Expr::Lit(l) => {
                let reps: Vec<Literal> = match l {
                    Literal::Int(c) => alloc::vec![
                        Literal::Int(c.wrapping_add(1)),
                        Literal::Int(c.wrapping_sub(1)),
                        Literal::Int(0)
                    ],
                    Literal::Float(c) => {
                        alloc::vec![Literal::Float(c + 1.0), Literal::Float(c - 1.0), Literal::Float(0.0)]
                    }
                    Literal::Bool(b) => alloc::vec![Literal::Bool(!b)],
                    Literal::Str(_) => Vec::new(),
                };
                for r in reps {
                    let d = format!("replace {} with {}", print_literal(l), print_literal(&r));
                    self.push(node, Operator::CRP, path, d, Replacement::Literal(r));
                }
            }
            Expr::Local(_) | Expr::Field(_) => {}
            Expr::Call { args, .. } => {
                for (i, a) in args.iter().enumerate() {
                    self.expr(a, &format!("{path}.arg{i}"));
                }
            }
            Expr::Binary { op, operand, lhs, rhs } => {
                let (operator, table): (Operator, &[BinOp]) = if op.is_arithmetic() {
                    (Operator::AOR, &ARITHMETIC_OPS)
                } else if op.is_logical() {
                    (Operator::LCR, &[BinOp::And, BinOp::Or])
                } else if operand.is_numeric() {
                    (Operator::ROR, &RELATIONAL_OPS)
                } else {
                    (Operator::ROR, &[BinOp::Eq, BinOp::Ne])
                };
                for &r in table.iter().filter(|r| *r != op) {
                    let d = format!("replace {} with {}", op.symbol(), r.symbol());
                    self.push(node, operator, path, d, Replacement::Op(r));
                }
                self.expr(lhs, &format!("{path}.lhs"));
                self.expr(rhs, &format!("{path}.rhs"));
            }
            Expr::Unary { operand, .. } => self.expr(operand, &format!("{path}.operand")),
        }
    }
}

/// What `apply` overwrote, for `revert`.
#[derive(Debug, Clone, PartialEq)]
pub struct Undo {
    callable: CallableId,
    node: usize,
    original: Expr,
}

/// Applies a mutant in place.
pub fn apply(unit: &mut SubjectUnit, m: &Mutant) -> Undo {
    let body = &mut unit.callable_mut(m.callable).body;
    let e = nth_expr(body, m.node).expect("mutant site exists");
    let original = e.clone();
    match (&m.replacement, e) {
        (Replacement::Op(r), Expr::Binary { op, .. }) => *op = *r,
        (Replacement::Literal(l), e @ Expr::Lit(_)) => *e = Expr::Lit(l.clone()),
        (Replacement::Negate, e) => {
            let inner = core::mem::replace(e, Expr::Lit(Literal::Bool(false)));
            *e = Expr::Unary { op: UnOp::Not, operand: Box::new(inner) };
        }
        _ => panic!("mutant {} does not match its site", m.id),
    }
    Undo { callable: m.callable, node: m.node, original }
}

pub fn revert(unit: &mut SubjectUnit, undo: Undo) {
    let body = &mut unit.callable_mut(undo.callable).body;
    *nth_expr(body, undo.node).expect("mutant site exists") = undo.original;
}

/// A copy of the unit with the mutant applied.
pub fn mutant_unit(unit: &SubjectUnit, m: &Mutant) -> SubjectUnit {
    let mut u = unit.clone();
    apply(&mut u, m);
    u
}

/// The `k`-th expression node of a body in the preorder `walk_exprs` uses.
fn nth_expr(body: &mut [Stmt], k: usize) -> Option<&mut Expr> {
    let mut left = k;
    stmts(body, &mut left)
}

fn stmts<'a>(body: &'a mut [Stmt], left: &mut usize) -> Option<&'a mut Expr> {
    for s in body {
        let found = match s {
            Stmt::Var { init: e, .. }
            | Stmt::Assign { value: e, .. }
            | Stmt::SetField { value: e, .. }
            | Stmt::Call(e)
            | Stmt::Return(Some(e)) => expr(e, left),
            Stmt::Return(None) | Stmt::Throw(_) => None,
            Stmt::If { cond, then_body, else_body, .. } => expr(cond, left)
                .or_else(|| stmts(then_body, left))
                .or_else(|| else_body.as_mut().and_then(|b| stmts(b, left))),
            Stmt::While { cond, body, .. } => expr(cond, left).or_else(|| stmts(body, left)),
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

fn expr<'a>(e: &'a mut Expr, left: &mut usize) -> Option<&'a mut Expr> {
    if *left == 0 {
        return Some(e);
    }
    *left -= 1;
    match e {
        Expr::Lit(_) | Expr::Local(_) | Expr::Field(_) => None,
        Expr::Call { args, .. } => args.iter_mut().find_map(|a| expr(a, left)),
        Expr::Binary { lhs, rhs, .. } => expr(lhs, left).or_else(|| expr(rhs, left)),
        Expr::Unary { operand, .. } => expr(operand, left),
    }
}
