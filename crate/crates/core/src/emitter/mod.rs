//! Test files: rendering suites as text and reading them back.
//!
//! A rendered test names each variable after the statement defining it
//! (`v0`, `v1`, ...), puts the focal call under `// act` and ends with its
//! assertions:
//!
//! ```text
//! test test_deposit_1 focal deposit {
//!   // arrange
//!   var v0: string = "a";
//!   var v1: float = 100.0;
//!   var v2: BankAccount = new BankAccount(v0, v1);
//!   var v3: float = 50.0;
//!   // act
//!   v2.deposit(v3);
//!   // assert
//!   assert v2.getBalance() == 150.0 within 0.01;
//! }
//! ```

mod parse;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::assertions::{AssertedTest, Assertion};
use crate::chromosome::{Representation, Statement, TestCase, VarRef};
use crate::runtime::{ObsKind, Observed, Value};
use crate::subject::{kind_name, print_literal, quote, SubjectUnit};

pub use parse::{parse_tests, ParsedTest, TestParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Style {
    pub aaa_comments: bool,
}

impl Default for Style {
    fn default() -> Self {
        Style { aaa_comments: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedTest {
    pub name: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedSuite {
    pub subject: String,
    pub header: String,
    pub tests: Vec<RenderedTest>,
}

impl RenderedSuite {
    /// The whole file.
    pub fn text(&self) -> String {
        let mut out = self.header.clone();
        for t in &self.tests {
            out.push('\n');
            out.push_str(&t.source);
        }
        out
    }
}

/// `test_<focal>_<k>` with `k` counting per focal method, or `test_<k>`.
pub fn test_names(tests: &[&TestCase]) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    tests
        .iter()
        .enumerate()
        .map(|(i, t)| match t.focal_method.as_deref() {
            Some(m) => {
                let k = seen.entry(m).or_insert(0);
                *k += 1;
                format!("test_{m}_{k}")
            }
            None => format!("test_{}", i + 1),
        })
        .collect()
}

pub fn render_suite(unit: &SubjectUnit, suite: &[AssertedTest], repr: Representation, style: Style) -> RenderedSuite {
    let names = test_names(&suite.iter().map(|t| &t.test).collect::<Vec<_>>());
    let header = format!("// {} tests for unit {}: {}\n", repr, unit.name, suite.len());
    let tests = suite
        .iter()
        .zip(names)
        .map(|(t, name)| RenderedTest { source: render_test(unit, &name, t, style), name })
        .collect();
    RenderedSuite { subject: unit.name.clone(), header, tests }
}

fn var(v: VarRef) -> String {
    format!("v{v}")
}

pub fn render_test(unit: &SubjectUnit, name: &str, t: &AssertedTest, style: Style) -> String {
    let test = &t.test;
    let mut out = String::new();
    match &test.focal_method {
        Some(m) => writeln!(out, "test {name} focal {m} {{").unwrap(),
        None => writeln!(out, "test {name} {{").unwrap(),
    }
    let focal = test.focal_index();
    for (i, s) in test.statements.iter().enumerate() {
        if style.aaa_comments && i == 0 && focal != Some(0) {
            out.push_str("  // arrange\n");
        }
        if style.aaa_comments && focal == Some(i) {
            out.push_str("  // act\n");
        }
        out.push_str("  ");
        out.push_str(&render_statement(unit, test, i, s));
        out.push('\n');
    }
    if style.aaa_comments && !t.assertions.is_empty() {
        out.push_str("  // assert\n");
    }
    for a in &t.assertions {
        out.push_str("  ");
        out.push_str(&render_assertion(test, a));
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

fn args(a: &[VarRef]) -> String {
    a.iter().map(|&v| var(v)).collect::<Vec<_>>().join(", ")
}

fn render_statement(unit: &SubjectUnit, test: &TestCase, i: usize, s: &Statement) -> String {
    let rhs = match s {
        Statement::Primitive(l) => print_literal(l),
        Statement::Constructor { args: a } => format!("new {}({})", unit.name, args(a)),
        Statement::Field { receiver, field } => format!("{}.{field}", var(*receiver)),
        Statement::Method { receiver, method, args: a } => format!("{}.{method}({})", var(*receiver), args(a)),
        Statement::Assignment { target, source } => return format!("{} = {};", var(*target), var(*source)),
    };
    match test.var_kind(unit, i) {
        Some(k) => format!("var {}: {} = {rhs};", var(i), kind_name(unit, k)),
        None => format!("{rhs};"),
    }
}

fn render_assertion(test: &TestCase, a: &Assertion) -> String {
    let target = match a.at.kind {
        ObsKind::InspectorValue => {
            format!("{}.{}()", var(a.at.receiver.unwrap_or(0)), a.at.inspector.as_deref().unwrap_or_default())
        }
        ObsKind::StatementReturn => var(a.at.stmt),
        ObsKind::ExceptionStatus if test.focal_index() == Some(a.at.stmt) => "act".into(),
        ObsKind::ExceptionStatus => format!("#{}", a.at.stmt + 1),
    };
    let check = match &a.expected {
        Observed::Value(Value::Float(f)) => {
            format!("== {}", print_literal(&crate::subject::Literal::Float(*f))) + &format!(" within {:?}", a.tolerance)
        }
        Observed::Value(v) => match v.to_literal() {
            Some(l) => format!("== {}", print_literal(&l)),
            None => "== null".into(),
        },
        Observed::Normal => "returns normally".into(),
        Observed::Thrown(t) => format!("throws {}", quote(t)),
        Observed::Timeout => "times out".into(),
    };
    let tag = if a.fallback { "[fallback] " } else { "" };
    format!("assert {tag}{target} {check};")
}
