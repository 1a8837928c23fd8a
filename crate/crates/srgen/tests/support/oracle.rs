//! A plain interpreter for tests, written apart from the instrumented one.
//! It only notes which methods were entered and which way each
//! conditional went.

use std::collections::BTreeSet;

use srgen_core::chromosome::{Representation, Statement, TestCase};
use srgen_core::subject::{BinOp, Expr, GoalIndex, GoalKind, Kind, Literal, MethodDecl, Receiver, Stmt, SubjectUnit, UnOp};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Hit {
    Entered(String),
    Went { cond: usize, way: bool },
}

/// The hit a core goal stands for.
pub fn hit_of(goals: &GoalIndex, g: usize) -> Hit {
    let goal = goals.goal(g);
    match goal.kind {
        GoalKind::MethodEntry => Hit::Entered(goal.method.clone()),
        GoalKind::BranchTrue => Hit::Went { cond: goal.branch_node.unwrap(), way: true },
        GoalKind::BranchFalse => Hit::Went { cond: goal.branch_node.unwrap(), way: false },
    }
}

#[derive(Debug, Clone, PartialEq)]
enum V {
    I(i64),
    F(f64),
    B(bool),
    S(String),
    Obj(usize),
    Nil,
}

impl V {
    fn num(&self) -> Option<f64> {
        match self {
            V::I(x) => Some(*x as f64),
            V::F(x) => Some(*x),
            _ => None,
        }
    }
}

enum Stop {
    Thrown,
    OutOfSteps,
}

enum Done {
    Fell,
    Returned(V),
}

struct Oracle<'u> {
    unit: &'u SubjectUnit,
    objects: Vec<Vec<(String, V)>>,
    steps: u64,
    limit: u64,
    depth: usize,
    noting: bool,
    hits: BTreeSet<Hit>,
}

type Scope = Vec<(String, V)>;

impl<'u> Oracle<'u> {
    fn step(&mut self) -> Result<(), Stop> {
        self.steps += 1;
        if self.steps > self.limit {
            Err(Stop::OutOfSteps)
        } else {
            Ok(())
        }
    }

    fn note(&mut self, h: Hit) {
        if self.noting {
            self.hits.insert(h);
        }
    }

    fn find(&self, name: &str) -> &'u MethodDecl {
        if name == "constructor" {
            &self.unit.constructor
        } else {
            self.unit.methods.iter().find(|m| m.name == name).unwrap()
        }
    }

    fn invoke(&mut self, m: &'u MethodDecl, this: usize, args: Vec<V>) -> Result<V, Stop> {
        self.step()?;
        if self.depth >= 128 {
            return Err(Stop::Thrown);
        }
        self.note(Hit::Entered(m.name.clone()));
        let mut scope: Scope = m.params.iter().map(|p| p.name.clone()).zip(args).collect();
        self.depth += 1;
        let r = self.block(&m.body, this, &mut scope);
        self.depth -= 1;
        match r? {
            Done::Returned(v) => Ok(v),
            Done::Fell if m.ret.is_some() => Err(Stop::Thrown),
            Done::Fell => Ok(V::Nil),
        }
    }

    fn block(&mut self, body: &'u [Stmt], this: usize, scope: &mut Scope) -> Result<Done, Stop> {
        let depth = scope.len();
        let r = self.seq(body, this, scope);
        scope.truncate(depth);
        r
    }

    fn seq(&mut self, body: &'u [Stmt], this: usize, scope: &mut Scope) -> Result<Done, Stop> {
        for s in body {
            self.step()?;
            match s {
                Stmt::Var { name, init, .. } => {
                    let v = self.eval(init, this, scope)?;
                    scope.push((name.clone(), v));
                }
                Stmt::Assign { name, value } => {
                    let v = self.eval(value, this, scope)?;
                    if let Some(slot) = scope.iter_mut().rev().find(|(n, _)| n == name) {
                        slot.1 = v;
                    }
                }
                Stmt::SetField { field, value } => {
                    let v = self.eval(value, this, scope)?;
                    self.set_field(this, field, v);
                }
                Stmt::If { id, cond, then_body, else_body } => {
                    let c = self.truth(cond, this, scope)?;
                    self.note(Hit::Went { cond: *id, way: c });
                    let r = if c {
                        self.block(then_body, this, scope)?
                    } else {
                        match else_body {
                            Some(e) => self.block(e, this, scope)?,
                            None => Done::Fell,
                        }
                    };
                    if matches!(r, Done::Returned(_)) {
                        return Ok(r);
                    }
                }
                Stmt::While { id, cond, body } => loop {
                    self.step()?;
                    let c = self.truth(cond, this, scope)?;
                    self.note(Hit::Went { cond: *id, way: c });
                    if !c {
                        break;
                    }
                    if let Done::Returned(v) = self.block(body, this, scope)? {
                        return Ok(Done::Returned(v));
                    }
                },
                Stmt::Return(e) => {
                    let v = match e {
                        Some(e) => self.eval(e, this, scope)?,
                        None => V::Nil,
                    };
                    return Ok(Done::Returned(v));
                }
                Stmt::Throw(_) => return Err(Stop::Thrown),
                Stmt::Call(e) => {
                    self.eval(e, this, scope)?;
                }
            }
        }
        Ok(Done::Fell)
    }

    fn truth(&mut self, e: &'u Expr, this: usize, scope: &mut Scope) -> Result<bool, Stop> {
        Ok(self.eval(e, this, scope)? == V::B(true))
    }

    fn field(&self, obj: usize, name: &str) -> V {
        self.objects[obj].iter().find(|(n, _)| n == name).map(|(_, v)| v.clone()).unwrap()
    }

    fn set_field(&mut self, obj: usize, name: &str, v: V) {
        self.objects[obj].iter_mut().find(|(n, _)| n == name).unwrap().1 = v;
    }

    fn eval(&mut self, e: &'u Expr, this: usize, scope: &mut Scope) -> Result<V, Stop> {
        Ok(match e {
            Expr::Lit(l) => lit(l),
            Expr::Local(n) => scope.iter().rev().find(|(k, _)| k == n).map(|(_, v)| v.clone()).unwrap_or(V::Nil),
            Expr::Field(f) => self.field(this, f),
            Expr::Call { recv, method, args } => {
                let target = match recv {
                    Receiver::This => this,
                    Receiver::Var(n) => match scope.iter().rev().find(|(k, _)| k == n).map(|(_, v)| v.clone()) {
                        Some(V::Obj(o)) => o,
                        _ => return Err(Stop::Thrown),
                    },
                };
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval(a, this, scope)?);
                }
                let m = self.find(method);
                self.invoke(m, target, vals)?
            }
            Expr::Binary { op: BinOp::And, lhs, rhs, .. } => V::B(self.truth(lhs, this, scope)? && self.truth(rhs, this, scope)?),
            Expr::Binary { op: BinOp::Or, lhs, rhs, .. } => V::B(self.truth(lhs, this, scope)? || self.truth(rhs, this, scope)?),
            Expr::Binary { op, operand, lhs, rhs } => {
                let a = self.eval(lhs, this, scope)?;
                let b = self.eval(rhs, this, scope)?;
                binary(*op, *operand, a, b)?
            }
            Expr::Unary { op, operand } => match (op, self.eval(operand, this, scope)?) {
                (UnOp::Neg, V::I(x)) => V::I(x.wrapping_neg()),
                (UnOp::Neg, V::F(x)) => V::F(-x),
                (UnOp::Not, V::B(b)) => V::B(!b),
                (_, v) => v,
            },
        })
    }
}

fn lit(l: &Literal) -> V {
    match l {
        Literal::Int(x) => V::I(*x),
        Literal::Float(x) => V::F(*x),
        Literal::Bool(b) => V::B(*b),
        Literal::Str(s) => V::S(s.clone()),
    }
}

fn binary(op: BinOp, operand: Kind, a: V, b: V) -> Result<V, Stop> {
    use BinOp::*;
    let rel = |x: f64, y: f64| match op {
        Lt => x < y,
        Le => x <= y,
        Gt => x > y,
        Ge => x >= y,
        Eq => x == y,
        _ => x != y,
    };
    Ok(match op {
        Add | Sub | Mul | Div | Rem if operand == Kind::Float => {
            let (x, y) = (a.num().unwrap_or(f64::NAN), b.num().unwrap_or(f64::NAN));
            V::F(match op {
                Add => x + y,
                Sub => x - y,
                Mul => x * y,
                Div => x / y,
                _ => x % y,
            })
        }
        Add | Sub | Mul | Div | Rem => {
            let (V::I(x), V::I(y)) = (a, b) else { return Err(Stop::Thrown) };
            if matches!(op, Div | Rem) && y == 0 {
                return Err(Stop::Thrown);
            }
            V::I(match op {
                Add => x.wrapping_add(y),
                Sub => x.wrapping_sub(y),
                Mul => x.wrapping_mul(y),
                Div => x.wrapping_div(y),
                _ => x.wrapping_rem(y),
            })
        }
        _ => match (&a, &b) {
            (V::I(x), V::I(y)) if operand == Kind::Int => V::B(match op {
                Lt => x < y,
                Le => x <= y,
                Gt => x > y,
                Ge => x >= y,
                Eq => x == y,
                _ => x != y,
            }),
            _ => match (a.num(), b.num()) {
                (Some(x), Some(y)) => V::B(rel(x, y)),
                _ => V::B(match op {
                    Eq => a == b,
                    Ne => a != b,
                    _ => false,
                }),
            },
        },
    })
}

/// What running `t` hits in its counted statements: the last one for a
/// focal test, all of them otherwise.
pub fn hits(unit: &SubjectUnit, t: &TestCase, step_limit: u64) -> BTreeSet<Hit> {
    let mut o = Oracle { unit, objects: Vec::new(), steps: 0, limit: step_limit, depth: 0, noting: false, hits: BTreeSet::new() };
    let first_counted = match t.repr {
        Representation::Focal => t.statements.len() - 1,
        Representation::Baseline => 0,
    };
    let mut vars: Vec<V> = vec![V::Nil; t.statements.len()];
    for (i, s) in t.statements.iter().enumerate() {
        o.noting = i >= first_counted;
        if o.step().is_err() {
            break;
        }
        let r = match s {
            Statement::Primitive(l) => Ok(lit(l)),
            Statement::Constructor { args } => {
                let obj = o.objects.len();
                let fields = unit
                    .fields
                    .iter()
                    .map(|f| {
                        let v = match f.kind {
                            Kind::Int => V::I(0),
                            Kind::Float => V::F(0.0),
                            Kind::Bool => V::B(false),
                            Kind::Str => V::S(String::new()),
                            Kind::Unit => V::Nil,
                        };
                        (f.name.clone(), v)
                    })
                    .collect();
                o.objects.push(fields);
                let args = args.iter().map(|&a| vars[a].clone()).collect();
                o.invoke(&unit.constructor, obj, args).map(|_| V::Obj(obj))
            }
            Statement::Field { receiver, field } => match vars[*receiver] {
                V::Obj(obj) => Ok(o.field(obj, field)),
                _ => Err(Stop::Thrown),
            },
            Statement::Method { receiver, method, args } => match vars[*receiver] {
                V::Obj(obj) => {
                    let args = args.iter().map(|&a| vars[a].clone()).collect();
                    let m = o.find(method);
                    o.invoke(m, obj, args)
                }
                _ => Err(Stop::Thrown),
            },
            Statement::Assignment { target, source } => {
                vars[*target] = vars[*source].clone();
                Ok(V::Nil)
            }
        };
        match r {
            Ok(v) => {
                if !matches!(s, Statement::Assignment { .. }) {
                    vars[i] = v;
                }
            }
            Err(_) => break,
        }
    }
    o.hits
}
