use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;

/// Names of the methods a body calls directly, through `this` or through a
/// unit-reference variable.
pub fn direct_callees(body: &[Stmt]) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    walk_exprs(body, &mut |e| {
        if let Expr::Call { method, .. } = e {
            out.insert(method.as_str());
        }
    });
    out
}

fn writes_field(body: &[Stmt]) -> bool {
    let mut w = false;
    walk_stmts(body, &mut |s| w |= matches!(s, Stmt::SetField { .. }));
    w
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod(pub String);

impl core::fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "unknown method `{}`", self.0)
    }
}

impl core::error::Error for UnknownMethod {}

/// The method together with every method it can reach through calls, on
/// the static AST. `"constructor"` names the constructor.
pub fn static_call_closure(unit: &SubjectUnit, method: &str) -> Result<BTreeSet<String>, UnknownMethod> {
    let start = unit.callable_id(method).ok_or_else(|| UnknownMethod(method.into()))?;
    let mut seen = BTreeSet::new();
    seen.insert(String::from(unit.callable(start).name.as_str()));
    let mut work = alloc::vec![start];
    while let Some(id) = work.pop() {
        for callee in direct_callees(&unit.callable(id).body) {
            if seen.insert(String::from(callee)) {
                if let Some(cid) = unit.callable_id(callee) {
                    work.push(cid);
                }
            }
        }
    }
    Ok(seen)
}

/// Sets `is_inspector` on every method.
pub(crate) fn mark_inspectors(unit: &mut SubjectUnit) {
    let flags: Vec<bool> = unit
        .methods
        .iter()
        .map(|m| {
            m.ret.is_some()
                && m.params.is_empty()
                && static_call_closure(unit, &m.name)
                    .expect("method exists")
                    .iter()
                    .all(|n| unit.callable_id(n).is_some_and(|id| !writes_field(&unit.callable(id).body)))
        })
        .collect();
    for (m, f) in unit.methods.iter_mut().zip(flags) {
        m.is_inspector = f;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subject::parse_subject;

    fn names(s: &BTreeSet<String>) -> Vec<&str> {
        s.iter().map(String::as_str).collect()
    }

    const SRC: &str = "
        unit U {
          field x: int;
          constructor() {}
          method get(): int { return this.x; }
          method helper(): int { this.x = 1; return 1; }
          method indirect(): int { return this.helper(); }
          method a(): int { return this.b(); }
          method b(): int { return this.a(); }
          method withArg(y: int): int { return y; }
          method poke(other: U) { other.bump(); }
          method bump() { this.x = this.x + 1; }
        }";

    #[test]
    fn closure_cases() {
        let u = parse_subject(SRC).unwrap();
        assert_eq!(names(&static_call_closure(&u, "get").unwrap()), ["get"]);
        assert_eq!(names(&static_call_closure(&u, "a").unwrap()), ["a", "b"]);
        assert_eq!(names(&static_call_closure(&u, "poke").unwrap()), ["bump", "poke"]);
        assert!(static_call_closure(&u, "nope").is_err());
    }

    #[test]
    fn closure_is_idempotent() {
        let u = parse_subject(SRC).unwrap();
        for m in &u.methods {
            let c = static_call_closure(&u, &m.name).unwrap();
            let mut again = BTreeSet::new();
            for n in &c {
                again.extend(static_call_closure(&u, n).unwrap());
            }
            assert_eq!(c, again, "{}", m.name);
        }
    }

    #[test]
    fn inspector_rules() {
        let u = parse_subject(SRC).unwrap();
        let flag = |n: &str| u.method(n).unwrap().is_inspector;
        assert!(flag("get"));
        assert!(!flag("helper"), "writes a field");
        assert!(!flag("indirect"), "transitively writes a field");
        assert!(flag("a") && flag("b"));
        assert!(!flag("withArg"), "has parameters");
        assert!(!flag("bump"), "no return kind");
    }
}
