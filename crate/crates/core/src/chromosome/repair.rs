use rand::RngCore;

use super::{Factory, Representation, Statement, TestCase, DANGLING};
use crate::subject::Kind;

/// Makes `t` well-formed: broken references are rebound to the earliest
/// earlier variable of the right kind, statements with no such variable are
/// dropped, and the focal call is kept by building what it lacks. Tests
/// over the length cap lose setup statements from the front, unused ones
/// first. A well-formed test is left untouched.
pub fn repair(f: &Factory<'_>, t: &mut TestCase, rng: &mut dyn RngCore) {
    let max = f.cfg.max_len;
    for _ in 0..4 * max + 8 {
        forward_pass(f, t, rng);
        if t.is_empty() {
            let mut at = 0;
            f.satisfy(t, &mut at, Kind::Unit, 0.0, rng);
            continue;
        }
        if t.len() <= max {
            return;
        }
        let setup = t.setup_len();
        let victim = (0..setup).find(|&i| !t.is_used(i)).unwrap_or(0);
        t.remove(victim);
    }
    // Unreachable for configurations the factory accepted; rebuild the
    // bare minimum rather than hand back an invalid test.
    let focal = t.focal_method.clone();
    t.statements.clear();
    match focal.as_deref().and_then(|m| f.unit.callable_id(m)) {
        Some(id) if t.repr == Representation::Focal => f.push_focal(t, id, rng),
        _ => {
            let mut at = 0;
            f.satisfy(t, &mut at, Kind::Unit, 0.0, rng);
        }
    }
}

fn forward_pass(f: &Factory<'_>, t: &mut TestCase, rng: &mut dyn RngCore) {
    let unit = f.unit;
    let mut i = 0;
    while i < t.len() {
        let focal = t.repr == Representation::Focal && i + 1 == t.len();
        let keep = match &t.statements[i] {
            Statement::Method { method, .. } => unit.method(method).is_some(),
            Statement::Field { field, .. } => unit.field(field).is_some_and(|fd| fd.public),
            _ => true,
        };
        if !keep {
            t.remove(i);
            continue;
        }
        if let Statement::Assignment { target, source } = t.statements[i] {
            let tk = (target != DANGLING && target < i).then(|| t.var_kind(unit, target)).flatten();
            let Some(tk) = tk else {
                t.remove(i);
                continue;
            };
            let ok = source != DANGLING && source < i && source != target && t.var_kind(unit, source) == Some(tk);
            if !ok {
                match t.vars_before(unit, i, tk).into_iter().find(|&v| v != target) {
                    Some(v) => t.statements[i] = Statement::Assignment { target, source: v },
                    None => {
                        t.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
            continue;
        }
        let kinds = t.statements[i].slot_kinds(unit).unwrap_or_default();
        let mut removed = false;
        for (slot, want) in kinds.into_iter().enumerate() {
            let want = want.expect("only assignments have free slots");
            let r = t.statements[i].refs()[slot];
            if r != DANGLING && r < i && t.var_kind(unit, r) == Some(want) {
                continue;
            }
            let bound = match t.vars_before(unit, i, want).first() {
                Some(&v) => v,
                None if focal => {
                    let mut at = i;
                    let v = f.satisfy(t, &mut at, want, 0.0, rng);
                    i = at;
                    v
                }
                None => {
                    t.remove(i);
                    removed = true;
                    break;
                }
            };
            *t.statements[i].refs_mut().swap_remove(slot) = bound;
        }
        if !removed {
            i += 1;
        }
    }
}
