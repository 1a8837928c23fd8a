use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};

use super::{Representation, Statement, TestCase, VarRef};
use crate::subject::{walk_exprs, CallableId, CoverageGoal, Expr, Kind, Literal, SubjectUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoryConfig {
    pub max_len: usize,
    pub init_len: usize,
}

impl Default for FactoryConfig {
    fn default() -> Self {
        FactoryConfig { max_len: 40, init_len: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactoryError {
    /// The constructor needs an instance of the unit to build one.
    Unconstructible,
    MaxLenTooSmall { max_len: usize, needed: usize },
    InitLen { init_len: usize, max_len: usize },
}

impl fmt::Display for FactoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactoryError::Unconstructible => f.write_str("constructor takes an instance of its own unit"),
            FactoryError::MaxLenTooSmall { max_len, needed } => {
                write!(f, "max length {max_len} is below the {needed} statements some focal test needs")
            }
            FactoryError::InitLen { init_len, max_len } => {
                write!(f, "initial length {init_len} must lie in 2..={max_len}")
            }
        }
    }
}

/// Literals worth trying, harvested from the subject source.
#[derive(Debug, Clone, Default)]
struct Pool {
    ints: Vec<i64>,
    floats: Vec<f64>,
    strs: Vec<String>,
}

impl Pool {
    fn harvest(unit: &SubjectUnit) -> Self {
        let mut ints = BTreeSet::from([-1i64, 0, 1]);
        let mut floats: Vec<f64> = alloc::vec![0.0, 1.0];
        let mut strs = BTreeSet::from([String::new()]);
        for (_, m) in unit.callables() {
            walk_exprs(&m.body, &mut |e| match e {
                Expr::Lit(Literal::Int(v)) => {
                    ints.extend([*v, v.wrapping_add(1), v.wrapping_sub(1)]);
                    floats.push(*v as f64);
                }
                Expr::Lit(Literal::Float(v)) => floats.push(*v),
                Expr::Lit(Literal::Str(s)) => {
                    strs.insert(s.clone());
                }
                _ => {}
            });
        }
        floats.sort_by(f64::total_cmp);
        floats.dedup();
        Pool { ints: ints.into_iter().collect(), floats, strs: strs.into_iter().collect() }
    }
}

/// Builds random statements and tests for one unit.
#[derive(Debug, Clone)]
pub struct Factory<'u> {
    pub unit: &'u SubjectUnit,
    pub cfg: FactoryConfig,
    pool: Pool,
    /// Non-reference kinds appearing as parameters, for free primitives.
    param_kinds: Vec<Kind>,
}

const STR_ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789 ";

impl<'u> Factory<'u> {
    pub fn new(unit: &'u SubjectUnit, cfg: FactoryConfig) -> Result<Self, FactoryError> {
        if unit.constructor.params.iter().any(|p| p.kind == Kind::Unit) {
            return Err(FactoryError::Unconstructible);
        }
        let needed = Self::min_len(unit);
        if cfg.max_len < needed {
            return Err(FactoryError::MaxLenTooSmall { max_len: cfg.max_len, needed });
        }
        if cfg.init_len < 2 || cfg.init_len > cfg.max_len {
            return Err(FactoryError::InitLen { init_len: cfg.init_len, max_len: cfg.max_len });
        }
        let mut kinds = BTreeSet::new();
        for (_, m) in unit.callables() {
            kinds.extend(m.params.iter().map(|p| p.kind).filter(|k| *k != Kind::Unit));
        }
        if kinds.is_empty() {
            kinds.insert(Kind::Int);
        }
        Ok(Factory { unit, cfg, pool: Pool::harvest(unit), param_kinds: kinds.into_iter().collect() })
    }

    /// Shortest length every focal test fits in: constructor arguments,
    /// the receiver, the focal arguments and the focal call.
    pub fn min_len(unit: &SubjectUnit) -> usize {
        let ctor = unit.constructor.params.len() + 1;
        let widest = unit
            .methods
            .iter()
            .map(|m| m.params.iter().filter(|p| p.kind != Kind::Unit).count() + 1)
            .max()
            .unwrap_or(0);
        ctor + widest
    }

    pub fn sample_literal(&self, kind: Kind, rng: &mut dyn RngCore) -> Literal {
        let from_pool = rng.random_bool(0.4);
        match kind {
            Kind::Int => match self.pool.ints.choose(rng) {
                Some(v) if from_pool => Literal::Int(*v),
                _ => Literal::Int(rng.random_range(-100..=100)),
            },
            Kind::Float => match self.pool.floats.choose(rng) {
                Some(v) if from_pool => Literal::Float(*v),
                _ => Literal::Float(rng.random_range(-10_000i64..=100_000) as f64 / 100.0),
            },
            Kind::Bool => Literal::Bool(rng.random_bool(0.5)),
            Kind::Str => match self.pool.strs.choose(rng) {
                Some(s) if from_pool => Literal::Str(s.clone()),
                _ => {
                    let n = rng.random_range(0..=5);
                    Literal::Str((0..n).map(|_| *STR_ALPHABET.choose(rng).unwrap() as char).collect())
                }
            },
            Kind::Unit => unreachable!("references are not literals"),
        }
    }

    /// A variable of `kind` defined before `*pos`: an existing one with
    /// probability `reuse`, otherwise new statements inserted at `*pos`.
    pub fn satisfy(&self, t: &mut TestCase, pos: &mut usize, kind: Kind, reuse: f64, rng: &mut dyn RngCore) -> VarRef {
        let existing = t.vars_before(self.unit, *pos, kind);
        if !existing.is_empty() && rng.random_bool(reuse) {
            return *existing.choose(rng).unwrap();
        }
        let s = if kind == Kind::Unit {
            let args = self.fresh_args(t, pos, &self.unit.constructor.params.iter().map(|p| p.kind).collect::<Vec<_>>(), rng);
            Statement::Constructor { args }
        } else {
            Statement::Primitive(self.sample_literal(kind, rng))
        };
        t.insert(*pos, s);
        *pos += 1;
        *pos - 1
    }

    /// Fresh primitives for value parameters; references may be reused.
    fn fresh_args(&self, t: &mut TestCase, pos: &mut usize, kinds: &[Kind], rng: &mut dyn RngCore) -> Vec<VarRef> {
        kinds
            .iter()
            .map(|&k| {
                let reuse = if k == Kind::Unit { 0.8 } else { 0.0 };
                self.satisfy(t, pos, k, reuse, rng)
            })
            .collect()
    }

    fn reused_args(&self, t: &mut TestCase, pos: &mut usize, kinds: &[Kind], rng: &mut dyn RngCore) -> Vec<VarRef> {
        kinds
            .iter()
            .map(|&k| {
                let reuse = if k == Kind::Unit { 0.8 } else { 0.3 };
                self.satisfy(t, pos, k, reuse, rng)
            })
            .collect()
    }

    fn param_kinds(&self, id: CallableId) -> Vec<Kind> {
        self.unit.callable(id).params.iter().map(|p| p.kind).collect()
    }

    /// Inserts one random statement (plus whatever it depends on) at `pos`;
    /// returns the number of statements inserted.
    pub fn insert_random(&self, t: &mut TestCase, pos: usize, rng: &mut dyn RngCore) -> usize {
        let mut at = pos;
        let roll: f64 = rng.random();
        let public: Vec<_> = self.unit.fields.iter().filter(|f| f.public).collect();
        if roll < 0.1 {
            let kind = *self.param_kinds.choose(rng).unwrap();
            t.insert(at, Statement::Primitive(self.sample_literal(kind, rng)));
            return 1;
        }
        if roll < 0.2 && !public.is_empty() {
            let receiver = self.satisfy(t, &mut at, Kind::Unit, 0.8, rng);
            let field = public.choose(rng).unwrap().name.clone();
            t.insert(at, Statement::Field { receiver, field });
            return at + 1 - pos;
        }
        if roll < 0.3 {
            if let Some((target, source)) = self.assignment_pair(t, at, rng) {
                t.insert(at, Statement::Assignment { target, source });
                return 1;
            }
        }
        if roll < 0.4 || self.unit.methods.is_empty() {
            let args = self.reused_args(t, &mut at, &self.param_kinds(0), rng);
            t.insert(at, Statement::Constructor { args });
            return at + 1 - pos;
        }
        let id = rng.random_range(1..self.unit.callable_count());
        let receiver = self.satisfy(t, &mut at, Kind::Unit, 0.8, rng);
        let args = self.reused_args(t, &mut at, &self.param_kinds(id), rng);
        t.insert(at, Statement::Method { receiver, method: self.unit.callable(id).name.clone(), args });
        at + 1 - pos
    }

    fn assignment_pair(&self, t: &TestCase, pos: usize, rng: &mut dyn RngCore) -> Option<(VarRef, VarRef)> {
        let mut pairs = Vec::new();
        for a in 0..pos {
            let Some(ka) = t.var_kind(self.unit, a) else { continue };
            for b in 0..pos {
                if a != b && t.var_kind(self.unit, b) == Some(ka) {
                    pairs.push((a, b));
                }
            }
        }
        pairs.choose(rng).copied()
    }

    /// The focal call for `callable`, appended with fresh value arguments.
    pub fn push_focal(&self, t: &mut TestCase, callable: CallableId, rng: &mut dyn RngCore) {
        let mut at = t.statements.len();
        let kinds = self.param_kinds(callable);
        if callable == 0 {
            let args = self.fresh_args(t, &mut at, &kinds, rng);
            t.statements.push(Statement::Constructor { args });
            return;
        }
        let receiver = self.satisfy(t, &mut at, Kind::Unit, 0.8, rng);
        let args = self.fresh_args(t, &mut at, &kinds, rng);
        let method = self.unit.callable(callable).name.clone();
        t.statements.push(Statement::Method { receiver, method, args });
    }

    /// A random repair-clean test. Under the focal shape the last statement
    /// calls the method owning `target`.
    pub fn random_test(&self, repr: Representation, target: &CoverageGoal, rng: &mut dyn RngCore) -> TestCase {
        match repr {
            Representation::Baseline => {
                let mut t = TestCase::new(repr, None);
                let len = rng.random_range(2..=self.cfg.init_len);
                while t.len() < len {
                    let n = t.len();
                    self.insert_random(&mut t, n, rng);
                }
                super::repair(self, &mut t, rng);
                t
            }
            Representation::Focal => {
                let mut t = TestCase::new(repr, Some(self.unit.callable(target.callable).name.clone()));
                let setup = rng.random_range(0..=self.cfg.init_len - 2);
                while t.len() < setup {
                    let n = t.len();
                    self.insert_random(&mut t, n, rng);
                }
                self.push_focal(&mut t, target.callable, rng);
                super::repair(self, &mut t, rng);
                t
            }
        }
    }
}
