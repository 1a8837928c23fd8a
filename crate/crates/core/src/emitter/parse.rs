use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::assertions::Assertion;
use crate::chromosome::{validate, Representation, Statement, TestCase, VarRef};
use crate::runtime::{ObsKind, ObsRef, Observed, Value};
use crate::subject::{parse_kind, tokenize, Cursor, Literal, ParseError, Pos, SubjectUnit, Tok};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTest {
    pub name: String,
    pub test: TestCase,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestParseError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for TestParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl core::error::Error for TestParseError {}

impl From<ParseError> for TestParseError {
    fn from(e: ParseError) -> Self {
        let pos = e.pos();
        let message = e.to_string();
        // drop the position prefix the subject parser already put in
        let message = message.split_once(": ").map_or(message.clone(), |(_, m)| m.into());
        TestParseError { pos, message }
    }
}

fn err(pos: Pos, message: impl Into<String>) -> TestParseError {
    TestParseError { pos, message: message.into() }
}

/// Reads a test file written against `unit`. Assertions on reals without
/// a `within` clause get `default_tolerance`.
pub fn parse_tests(unit: &SubjectUnit, src: &str, default_tolerance: f64) -> Result<Vec<ParsedTest>, TestParseError> {
    let toks = tokenize(src).map_err(ParseError::from)?;
    let mut c = Cursor::new(&toks);
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    while *c.peek() != Tok::Eof {
        let pos = c.pos();
        let t = test(&mut c, unit, default_tolerance)?;
        if !names.insert(t.name.clone()) {
            return Err(err(pos, format!("duplicate test name `{}`", t.name)));
        }
        out.push(t);
    }
    Ok(out)
}

struct Scope {
    vars: BTreeMap<String, VarRef>,
}

impl Scope {
    fn get(&self, name: &str, pos: Pos) -> Result<VarRef, TestParseError> {
        self.vars.get(name).copied().ok_or_else(|| err(pos, format!("unknown variable `{name}`")))
    }
}

fn test(c: &mut Cursor<'_>, unit: &SubjectUnit, tol: f64) -> Result<ParsedTest, TestParseError> {
    let start = c.expect_kw("test")?;
    let (name, _) = c.expect_ident()?;
    let focal = if c.eat_kw("focal") {
        match c.peek().clone() {
            Tok::Ident(m) => {
                c.bump();
                Some(m)
            }
            _ => return Err(c.error(&["focal method"]).into()),
        }
    } else {
        None
    };
    let repr = if focal.is_some() { Representation::Focal } else { Representation::Baseline };
    let mut t = TestCase::new(repr, focal);
    let mut scope = Scope { vars: BTreeMap::new() };
    c.expect_punct("{")?;
    while !c.is_kw("assert") && !c.is_punct("}") {
        statement(c, unit, &mut t, &mut scope)?;
    }
    if let Some(v) = validate(unit, &t, usize::MAX).first() {
        return Err(err(start, format!("test `{name}`: {v}")));
    }
    let mut assertions = Vec::new();
    while c.eat_kw("assert") {
        let id = assertions.len();
        assertions.push(assertion(c, unit, &t, &scope, id, tol)?);
    }
    c.expect_punct("}")?;
    Ok(ParsedTest { name, test: t, assertions })
}

fn args(c: &mut Cursor<'_>, scope: &Scope) -> Result<Vec<VarRef>, TestParseError> {
    let mut out = Vec::new();
    c.expect_punct("(")?;
    if !c.is_punct(")") {
        loop {
            let (a, pos) = c.expect_ident()?;
            out.push(scope.get(&a, pos)?);
            if !c.eat_punct(",") {
                break;
            }
        }
    }
    c.expect_punct(")")?;
    Ok(out)
}

fn literal(c: &mut Cursor<'_>) -> Result<Option<Literal>, TestParseError> {
    let neg = c.eat_punct("-");
    let l = match c.peek().clone() {
        Tok::Int(v) => Literal::Int(if neg { v.wrapping_neg() } else { v }),
        Tok::Float(v) => Literal::Float(if neg { -v } else { v }),
        _ if neg => return Err(c.error(&["number"]).into()),
        Tok::Str(s) => Literal::Str(s),
        Tok::Ident(s) if s == "true" || s == "false" => Literal::Bool(s == "true"),
        _ => return Ok(None),
    };
    c.bump();
    Ok(Some(l))
}

/// `recv.name(args)` or `recv.name`, cursor on `recv`.
fn member(c: &mut Cursor<'_>, scope: &Scope) -> Result<Statement, TestParseError> {
    let (recv, pos) = c.expect_ident()?;
    let receiver = scope.get(&recv, pos)?;
    c.expect_punct(".")?;
    let (name, _) = c.expect_ident()?;
    Ok(if c.is_punct("(") {
        Statement::Method { receiver, method: name, args: args(c, scope)? }
    } else {
        Statement::Field { receiver, field: name }
    })
}

fn statement(c: &mut Cursor<'_>, unit: &SubjectUnit, t: &mut TestCase, scope: &mut Scope) -> Result<(), TestParseError> {
    let pos = c.pos();
    let at = t.len();
    if c.eat_kw("var") {
        let (name, _) = c.expect_ident()?;
        c.expect_punct(":")?;
        let kind = parse_kind(c, &unit.name)?;
        c.expect_punct("=")?;
        let s = if let Some(l) = literal(c)? {
            Statement::Primitive(l)
        } else if c.eat_kw("new") {
            let (u, upos) = c.expect_ident()?;
            if u != unit.name {
                return Err(err(upos, format!("unknown unit `{u}`")));
            }
            Statement::Constructor { args: args(c, scope)? }
        } else {
            member(c, scope)?
        };
        c.expect_punct(";")?;
        match s.defines(unit) {
            Some(k) if k == kind => {}
            Some(k) => return Err(err(pos, format!("`{name}` declared {kind} but holds {k}"))),
            None => return Err(err(pos, format!("`{name}` is bound to a statement without a value"))),
        }
        t.statements.push(s);
        scope.vars.insert(name, at);
        return Ok(());
    }
    if matches!(c.peek_at(1), Tok::Punct("=")) {
        let (target, tp) = c.expect_ident()?;
        c.expect_punct("=")?;
        let (source, sp) = c.expect_ident()?;
        c.expect_punct(";")?;
        t.statements.push(Statement::Assignment { target: scope.get(&target, tp)?, source: scope.get(&source, sp)? });
        return Ok(());
    }
    let s = member(c, scope)?;
    c.expect_punct(";")?;
    if !matches!(s, Statement::Method { .. }) {
        return Err(err(pos, "a field read must be bound with `var`"));
    }
    if s.defines(unit).is_some() {
        return Err(err(pos, "a call returning a value must be bound with `var`"));
    }
    t.statements.push(s);
    Ok(())
}

fn assertion(
    c: &mut Cursor<'_>,
    unit: &SubjectUnit,
    t: &TestCase,
    scope: &Scope,
    id: usize,
    default_tol: f64,
) -> Result<Assertion, TestParseError> {
    let pos = c.pos();
    let fallback = if c.eat_punct("[") {
        c.expect_kw("fallback")?;
        c.expect_punct("]")?;
        true
    } else {
        false
    };
    let at = if c.eat_punct("#") {
        let k = match *c.peek() {
            Tok::Int(k) if k >= 1 && (k as usize) <= t.len() => k as usize,
            _ => return Err(c.error(&["statement number"]).into()),
        };
        c.bump();
        obs(ObsKind::ExceptionStatus, k - 1)
    } else {
        let (name, npos) = c.expect_ident()?;
        if c.eat_punct(".") {
            let (insp, ipos) = c.expect_ident()?;
            c.expect_punct("(")?;
            c.expect_punct(")")?;
            if !unit.method(&insp).is_some_and(|m| m.is_inspector) {
                return Err(err(ipos, format!("`{insp}` is not an inspector")));
            }
            let receiver = scope.get(&name, npos)?;
            if t.var_kind(unit, receiver) != Some(crate::subject::Kind::Unit) {
                return Err(err(npos, format!("`{name}` is not an instance")));
            }
            ObsRef { kind: ObsKind::InspectorValue, stmt: t.len() - 1, receiver: Some(receiver), inspector: Some(insp) }
        } else if name == "act" && !scope.vars.contains_key("act") {
            let f = t.focal_index().ok_or_else(|| err(npos, "`act` outside a focal test"))?;
            obs(ObsKind::ExceptionStatus, f)
        } else {
            obs(ObsKind::StatementReturn, scope.get(&name, npos)?)
        }
    };
    let mut tolerance = default_tol;
    let expected = if c.eat_punct("==") {
        if at.kind == ObsKind::ExceptionStatus {
            return Err(err(pos, "a statement status is checked with `returns normally` or `throws`"));
        }
        let v = if c.eat_kw("null") {
            Value::None
        } else {
            match literal(c)? {
                Some(l) => Value::from_literal(&l),
                None => return Err(c.error(&["literal"]).into()),
            }
        };
        if c.eat_kw("within") {
            tolerance = match literal(c)? {
                Some(Literal::Float(r)) if r >= 0.0 => r,
                Some(Literal::Int(r)) if r >= 0 => r as f64,
                _ => return Err(c.error(&["nonnegative tolerance"]).into()),
            };
        }
        Observed::Value(v)
    } else if c.eat_kw("throws") {
        Observed::Thrown(c.expect_str()?)
    } else if c.eat_kw("returns") {
        c.expect_kw("normally")?;
        Observed::Normal
    } else if c.eat_kw("times") {
        c.expect_kw("out")?;
        Observed::Timeout
    } else {
        return Err(c.error(&["`==`", "`throws`", "`returns normally`"]).into());
    };
    c.expect_punct(";")?;
    Ok(Assertion { id, at, expected, tolerance, killed: BTreeSet::new(), fallback })
}

fn obs(kind: ObsKind, stmt: usize) -> ObsRef {
    ObsRef { kind, stmt, receiver: None, inspector: None }
}
