use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::distance::{leaf, K};
use super::Value;
use crate::chromosome::{Representation, Statement, TestCase, VarRef};
use crate::subject::{BinOp, CallableId, Expr, GoalId, GoalIndex, Kind, Receiver, Stmt, SubjectUnit, UnOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub step_limit: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { step_limit: 100_000 }
    }
}

/// Calls nested deeper than this raise "stack overflow".
pub const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum Outcome {
    Normal(Value),
    Exception(String),
    Skipped,
    /// The step limit ran out during this statement.
    Timeout,
}

/// What one execution of a test left behind. Distances are kept per
/// statement so that coverage can be restricted to a window of statements.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecTrace {
    pub n_goals: usize,
    pub outcomes: Vec<Outcome>,
    /// Statement-major: entry `s * n_goals + g` is the smallest distance to
    /// goal `g` seen while statement `s` ran, infinite when not evaluated.
    dist: Vec<f64>,
    pub steps: u64,
    pub timeout: bool,
}

impl ExecTrace {
    pub fn distance(&self, stmt: usize, goal: GoalId) -> f64 {
        self.dist[stmt * self.n_goals + goal]
    }

    /// Smallest distance per goal over a window of statements.
    pub fn branch_min_distance(&self, window: Range<usize>) -> Vec<f64> {
        let mut out = alloc::vec![f64::INFINITY; self.n_goals];
        for s in window {
            for (g, d) in self.dist[s * self.n_goals..(s + 1) * self.n_goals].iter().enumerate() {
                if *d < out[g] {
                    out[g] = *d;
                }
            }
        }
        out
    }

    /// First statement within the window that covered `goal`.
    pub fn covering_stmt(&self, goal: GoalId, window: Range<usize>) -> Option<usize> {
        window.into_iter().find(|&s| self.distance(s, goal) == 0.0)
    }

    /// Covered goals in the window, each with its first covering statement.
    pub fn covered(&self, window: Range<usize>) -> Vec<(GoalId, usize)> {
        (0..self.n_goals).filter_map(|g| self.covering_stmt(g, window.clone()).map(|s| (g, s))).collect()
    }
}

/// Statements whose execution counts toward coverage: all of them for the
/// statement list, only the focal call (and what it calls) otherwise.
pub fn focal_window(t: &TestCase) -> Range<usize> {
    match t.repr {
        Representation::Baseline => 0..t.len(),
        Representation::Focal => t.len().saturating_sub(1)..t.len(),
    }
}

pub(crate) enum Raise {
    Throw(String),
    Timeout,
}

enum Flow {
    Next,
    Return(Value),
}

struct Frame<'a> {
    this: usize,
    locals: Vec<(&'a str, Value)>,
}

impl<'a> Frame<'a> {
    fn get(&self, name: &str) -> Value {
        self.locals.iter().rev().find(|(n, _)| *n == name).map(|(_, v)| v.clone()).unwrap_or(Value::None)
    }

    fn set(&mut self, name: &str, v: Value) {
        if let Some(slot) = self.locals.iter_mut().rev().find(|(n, _)| *n == name) {
            slot.1 = v;
        }
    }
}

pub(crate) struct Machine<'a> {
    unit: &'a SubjectUnit,
    goals: &'a GoalIndex,
    pub heap: Vec<Vec<Value>>,
    steps: u64,
    limit: u64,
    depth: usize,
    /// Offset into `dist` of the statement being recorded.
    rec: Option<usize>,
    dist: Vec<f64>,
}

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Result<(), Raise> {
        self.steps += 1;
        if self.steps > self.limit {
            Err(Raise::Timeout)
        } else {
            Ok(())
        }
    }

    fn record(&mut self, goal: GoalId, d: f64) {
        if let Some(base) = self.rec {
            let slot = &mut self.dist[base + goal];
            if d < *slot {
                *slot = d;
            }
        }
    }

    pub fn construct(&mut self, args: Vec<Value>) -> Result<Value, Raise> {
        let h = self.heap.len();
        self.heap.push(self.unit.fields.iter().map(|f| Value::default_for(f.kind)).collect());
        self.call(0, h, args)?;
        Ok(Value::Ref(h))
    }

    pub fn call(&mut self, id: CallableId, this: usize, args: Vec<Value>) -> Result<Value, Raise> {
        self.tick()?;
        if self.depth >= MAX_DEPTH {
            return Err(Raise::Throw("stack overflow".into()));
        }
        let unit = self.unit;
        let m = unit.callable(id);
        self.record(self.goals.entry_goal(id), 0.0);
        let mut frame = Frame { this, locals: m.params.iter().map(|p| p.name.as_str()).zip(args).collect() };
        self.depth += 1;
        let flow = self.block(&m.body, &mut frame);
        self.depth -= 1;
        match flow? {
            Flow::Return(v) => Ok(v),
            Flow::Next if m.ret.is_some() => Err(Raise::Throw("missing return".into())),
            Flow::Next => Ok(Value::None),
        }
    }

    fn block(&mut self, body: &'a [Stmt], frame: &mut Frame<'a>) -> Result<Flow, Raise> {
        let mark = frame.locals.len();
        let r = self.stmts(body, frame);
        frame.locals.truncate(mark);
        r
    }

    fn stmts(&mut self, body: &'a [Stmt], frame: &mut Frame<'a>) -> Result<Flow, Raise> {
        for s in body {
            self.tick()?;
            match s {
                Stmt::Var { name, init, .. } => {
                    let v = self.eval(init, frame)?;
                    frame.locals.push((name.as_str(), v));
                }
                Stmt::Assign { name, value } => {
                    let v = self.eval(value, frame)?;
                    frame.set(name, v);
                }
                Stmt::SetField { field, value } => {
                    let v = self.eval(value, frame)?;
                    let idx = self.unit.field_index(field).expect("resolved field");
                    self.heap[frame.this][idx] = v;
                }
                Stmt::If { id, cond, then_body, else_body } => {
                    let taken = self.condition(*id, cond, frame)?;
                    let flow = if taken {
                        self.block(then_body, frame)?
                    } else if let Some(e) = else_body {
                        self.block(e, frame)?
                    } else {
                        Flow::Next
                    };
                    if let Flow::Return(_) = flow {
                        return Ok(flow);
                    }
                }
                Stmt::While { id, cond, body } => loop {
                    self.tick()?;
                    if !self.condition(*id, cond, frame)? {
                        break;
                    }
                    if let Flow::Return(v) = self.block(body, frame)? {
                        return Ok(Flow::Return(v));
                    }
                },
                Stmt::Return(e) => {
                    let v = match e {
                        Some(e) => self.eval(e, frame)?,
                        None => Value::None,
                    };
                    return Ok(Flow::Return(v));
                }
                Stmt::Throw(t) => return Err(Raise::Throw(t.clone())),
                Stmt::Call(e) => {
                    self.eval(e, frame)?;
                }
            }
        }
        Ok(Flow::Next)
    }

    fn condition(&mut self, id: usize, cond: &'a Expr, frame: &mut Frame<'a>) -> Result<bool, Raise> {
        let (taken, dt, df) = self.cond(cond, frame)?;
        let (t, f) = self.goals.branch_goals(id);
        self.record(t, dt);
        self.record(f, df);
        Ok(taken)
    }

    /// Evaluates a boolean expression along with its true and false
    /// distances. Operands skipped by short-circuiting count as `K`.
    fn cond(&mut self, e: &'a Expr, frame: &mut Frame<'a>) -> Result<(bool, f64, f64), Raise> {
        match e {
            Expr::Binary { op: BinOp::And, lhs, rhs, .. } => {
                let (a, at, af) = self.cond(lhs, frame)?;
                if !a {
                    return Ok((false, at + K, 0.0));
                }
                let (b, bt, bf) = self.cond(rhs, frame)?;
                Ok((b, at + bt, af.min(bf)))
            }
            Expr::Binary { op: BinOp::Or, lhs, rhs, .. } => {
                let (a, at, af) = self.cond(lhs, frame)?;
                if a {
                    return Ok((true, 0.0, af + K));
                }
                let (b, bt, bf) = self.cond(rhs, frame)?;
                Ok((b, at.min(bt), af + bf))
            }
            Expr::Binary { op, operand, lhs, rhs } if op.is_relational() => {
                let l = self.eval(lhs, frame)?;
                let r = self.eval(rhs, frame)?;
                let taken = compare(*op, *operand, &l, &r);
                let (dt, df) = leaf(*op, &l, &r, taken);
                Ok((taken, dt, df))
            }
            Expr::Unary { op: UnOp::Not, operand } => {
                let (a, at, af) = self.cond(operand, frame)?;
                Ok((!a, af, at))
            }
            _ => {
                let b = self.eval(e, frame)?.as_bool();
                Ok(if b { (true, 0.0, K) } else { (false, K, 0.0) })
            }
        }
    }

    fn eval(&mut self, e: &'a Expr, frame: &mut Frame<'a>) -> Result<Value, Raise> {
        match e {
            Expr::Lit(l) => Ok(Value::from_literal(l)),
            Expr::Local(n) => Ok(frame.get(n)),
            Expr::Field(f) => {
                let idx = self.unit.field_index(f).expect("resolved field");
                Ok(self.heap[frame.this][idx].clone())
            }
            Expr::Call { recv, method, args } => {
                let this = match recv {
                    Receiver::This => frame.this,
                    Receiver::Var(v) => match frame.get(v) {
                        Value::Ref(h) => h,
                        _ => return Err(Raise::Throw("null".into())),
                    },
                };
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, frame)?);
                }
                let id = self.unit.callable_id(method).expect("resolved method");
                self.call(id, this, vals)
            }
            Expr::Binary { op: BinOp::And, lhs, rhs, .. } => {
                Ok(Value::Bool(self.eval(lhs, frame)?.as_bool() && self.eval(rhs, frame)?.as_bool()))
            }
            Expr::Binary { op: BinOp::Or, lhs, rhs, .. } => {
                Ok(Value::Bool(self.eval(lhs, frame)?.as_bool() || self.eval(rhs, frame)?.as_bool()))
            }
            Expr::Binary { op, operand, lhs, rhs } => {
                let l = self.eval(lhs, frame)?;
                let r = self.eval(rhs, frame)?;
                if op.is_arithmetic() {
                    arith(*op, *operand, &l, &r)
                } else {
                    Ok(Value::Bool(compare(*op, *operand, &l, &r)))
                }
            }
            Expr::Unary { op, operand } => {
                let v = self.eval(operand, frame)?;
                Ok(match (op, v) {
                    (UnOp::Neg, Value::Int(x)) => Value::Int(x.wrapping_neg()),
                    (UnOp::Neg, Value::Float(x)) => Value::Float(-x),
                    (UnOp::Not, Value::Bool(b)) => Value::Bool(!b),
                    (_, other) => other,
                })
            }
        }
    }
}

pub(crate) fn arith(op: BinOp, operand: Kind, l: &Value, r: &Value) -> Result<Value, Raise> {
    if operand == Kind::Float {
        let (a, b) = (l.as_f64().unwrap_or(f64::NAN), r.as_f64().unwrap_or(f64::NAN));
        return Ok(Value::Float(match op {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            _ => a % b,
        }));
    }
    let (Value::Int(a), Value::Int(b)) = (l, r) else {
        return Err(Raise::Throw("arith".into()));
    };
    Ok(Value::Int(match op {
        BinOp::Add => a.wrapping_add(*b),
        BinOp::Sub => a.wrapping_sub(*b),
        BinOp::Mul => a.wrapping_mul(*b),
        BinOp::Div if *b == 0 => return Err(Raise::Throw("arith".into())),
        BinOp::Div => a.wrapping_div(*b),
        _ if *b == 0 => return Err(Raise::Throw("arith".into())),
        _ => a.wrapping_rem(*b),
    }))
}

/// Truth of a comparison; integers compare exactly.
pub(crate) fn compare(op: BinOp, operand: Kind, l: &Value, r: &Value) -> bool {
    if let (Kind::Int, Value::Int(a), Value::Int(b)) = (operand, l, r) {
        return match op {
            BinOp::Lt => a < b,
            BinOp::Le => a <= b,
            BinOp::Gt => a > b,
            BinOp::Ge => a >= b,
            BinOp::Eq => a == b,
            _ => a != b,
        };
    }
    if let (Some(a), Some(b)) = (l.as_f64(), r.as_f64()) {
        return match op {
            BinOp::Lt => a < b,
            BinOp::Le => a <= b,
            BinOp::Gt => a > b,
            BinOp::Ge => a >= b,
            BinOp::Eq => a == b,
            _ => a != b,
        };
    }
    match op {
        BinOp::Eq => l == r,
        BinOp::Ne => l != r,
        _ => false,
    }
}

/// A finished execution: the trace plus the end state, kept around so that
/// inspectors can be called on it afterwards.
pub struct Execution<'a> {
    pub trace: ExecTrace,
    machine: Machine<'a>,
    /// Current value of each statement's variable, if it defined one and
    /// ran to completion.
    vars: Vec<Option<Value>>,
    limits: Limits,
}

/// Runs every statement of `test` in order, recording per-statement branch
/// distances. An exception or timeout skips the remaining statements.
pub fn run<'a>(unit: &'a SubjectUnit, goals: &'a GoalIndex, test: &TestCase, limits: Limits) -> Execution<'a> {
    let n = test.len();
    let g = goals.len();
    let mut m = Machine {
        unit,
        goals,
        heap: Vec::new(),
        steps: 0,
        limit: limits.step_limit,
        depth: 0,
        rec: None,
        dist: alloc::vec![f64::INFINITY; n * g],
    };
    let mut vars: Vec<Option<Value>> = alloc::vec![None; n];
    let mut outcomes = Vec::with_capacity(n);
    let mut stopped = false;
    let mut timeout = false;
    for (i, s) in test.statements.iter().enumerate() {
        if stopped {
            outcomes.push(Outcome::Skipped);
            continue;
        }
        m.rec = Some(i * g);
        let r = m.tick().and_then(|()| statement(&mut m, &mut vars, s));
        match r {
            Ok(v) => {
                if s.defines(unit).is_some() {
                    vars[i] = Some(v.clone());
                }
                outcomes.push(Outcome::Normal(v));
            }
            Err(Raise::Throw(t)) => {
                outcomes.push(Outcome::Exception(t));
                stopped = true;
            }
            Err(Raise::Timeout) => {
                outcomes.push(Outcome::Timeout);
                stopped = true;
                timeout = true;
            }
        }
    }
    m.rec = None;
    let trace = ExecTrace { n_goals: g, outcomes, dist: core::mem::take(&mut m.dist), steps: m.steps.min(limits.step_limit), timeout };
    Execution { trace, machine: m, vars, limits }
}

/// `run` without the end state.
pub fn execute_test(unit: &SubjectUnit, goals: &GoalIndex, test: &TestCase, limits: Limits) -> ExecTrace {
    run(unit, goals, test, limits).trace
}

fn var(vars: &[Option<Value>], v: VarRef) -> Value {
    vars.get(v).cloned().flatten().unwrap_or(Value::None)
}

fn statement(m: &mut Machine<'_>, vars: &mut [Option<Value>], s: &Statement) -> Result<Value, Raise> {
    match s {
        Statement::Primitive(l) => Ok(Value::from_literal(l)),
        Statement::Constructor { args } => m.construct(args.iter().map(|&a| var(vars, a)).collect()),
        Statement::Field { receiver, field } => match var(vars, *receiver) {
            Value::Ref(h) => {
                let idx = m.unit.field_index(field).expect("validated field");
                Ok(m.heap[h][idx].clone())
            }
            _ => Err(Raise::Throw("null".into())),
        },
        Statement::Method { receiver, method, args } => match var(vars, *receiver) {
            Value::Ref(h) => {
                let id = m.unit.callable_id(method).expect("validated method");
                m.call(id, h, args.iter().map(|&a| var(vars, a)).collect())
            }
            _ => Err(Raise::Throw("null".into())),
        },
        Statement::Assignment { target, source } => {
            vars[*target] = Some(var(vars, *source));
            Ok(Value::None)
        }
    }
}

/// Result of calling an inspector after the fact.
pub enum InspectorResult {
    Value(Value),
    Thrown(String),
    Timeout,
}

impl<'a> Execution<'a> {
    /// Current value of a variable; `None` if its statement never completed.
    pub fn var(&self, v: VarRef) -> Option<&Value> {
        self.vars.get(v).and_then(Option::as_ref)
    }

    /// Calls a parameterless method on an instance without recording
    /// coverage, under a fresh step budget.
    pub fn inspect(&mut self, receiver: &Value, method: &str) -> InspectorResult {
        let Value::Ref(h) = *receiver else {
            return InspectorResult::Thrown("null".to_string());
        };
        let Some(id) = self.machine.unit.callable_id(method) else {
            return InspectorResult::Thrown("missing method".to_string());
        };
        self.machine.steps = 0;
        self.machine.limit = self.limits.step_limit;
        self.machine.depth = 0;
        match self.machine.call(id, h, Vec::new()) {
            Ok(v) => InspectorResult::Value(v),
            Err(Raise::Throw(t)) => InspectorResult::Thrown(t),
            Err(Raise::Timeout) => InspectorResult::Timeout,
        }
    }
}
