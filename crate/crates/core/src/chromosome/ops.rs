use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{repair, Factory, Statement, TestCase, DANGLING};
use crate::subject::{Kind, Literal};

/// Single-point crossover. Focal parents only exchange setup; each child
/// keeps its own parent's focal call.
pub fn crossover(f: &Factory<'_>, p1: &TestCase, p2: &TestCase, rng: &mut dyn RngCore) -> (TestCase, TestCase) {
    assert_eq!(p1.repr, p2.repr, "crossover across representations");
    let a = rng.random_range(0..=p1.setup_len());
    let b = rng.random_range(0..=p2.setup_len());
    let mut c1 = splice(f, p1, a, p2, b);
    let mut c2 = splice(f, p2, b, p1, a);
    repair(f, &mut c1, rng);
    repair(f, &mut c2, rng);
    (c1, c2)
}

/// `head[..a] ++ tail.setup[b..]`, followed by `head`'s focal call.
fn splice(f: &Factory<'_>, head: &TestCase, a: usize, tail: &TestCase, b: usize) -> TestCase {
    let mut out = TestCase::new(head.repr, head.focal_method.clone());
    out.statements.extend_from_slice(&head.statements[..a]);
    for s in &tail.statements[b..tail.setup_len()] {
        let mut s = s.clone();
        for r in s.refs_mut() {
            *r = if *r == DANGLING || *r < b { DANGLING } else { *r - b + a };
        }
        out.statements.push(s);
    }
    if let Some(fi) = head.focal_index() {
        let mut s = head.statements[fi].clone();
        for r in s.refs_mut() {
            if *r >= a {
                *r = DANGLING;
            }
        }
        out.statements.push(s);
    }
    // Trim next to the cut so both sides keep their far ends.
    let mut cut = a;
    while out.len() > f.cfg.max_len {
        if cut < out.setup_len() {
            out.remove(cut);
        } else {
            cut -= 1;
            out.remove(cut);
        }
    }
    out
}

/// Delete, change and insert phases, then repair. The focal call is never
/// deleted or renamed; its arguments may change.
pub fn mutate(f: &Factory<'_>, t: &mut TestCase, rng: &mut dyn RngCore) {
    let p = 1.0 / t.len().max(1) as f64;
    for i in (0..t.setup_len()).rev() {
        if rng.random_bool(p) {
            t.remove(i);
        }
    }
    repair(f, t, rng);

    let p = 1.0 / t.len() as f64;
    let mut i = 0;
    while i < t.len() {
        if rng.random_bool(p) {
            i += change(f, t, i, rng);
        }
        i += 1;
    }

    let mut p = 0.5;
    while t.len() < f.cfg.max_len && rng.random_bool(p) {
        let pos = rng.random_range(0..=t.setup_len());
        f.insert_random(t, pos, rng);
        p *= 0.5;
    }
    repair(f, t, rng);
}

/// Changes statement `i` in place; returns how many statements were
/// inserted in front of it.
fn change(f: &Factory<'_>, t: &mut TestCase, i: usize, rng: &mut dyn RngCore) -> usize {
    let unit = f.unit;
    match &mut t.statements[i] {
        Statement::Primitive(lit) => {
            perturb(lit, rng);
            0
        }
        Statement::Assignment { target, .. } => {
            let target = *target;
            let Some(k) = t.var_kind(unit, target) else { return 0 };
            let pool: Vec<_> = t.vars_before(unit, i, k).into_iter().filter(|&v| v != target).collect();
            if let Some(&v) = pool.choose(rng) {
                t.statements[i] = Statement::Assignment { target, source: v };
            }
            0
        }
        Statement::Field { field, .. } => {
            let public: Vec<&String> = unit.fields.iter().filter(|fd| fd.public).map(|fd| &fd.name).collect();
            if rng.random_bool(0.5) {
                if let Some(name) = public.choose(rng) {
                    *field = (*name).clone();
                }
                0
            } else {
                resample_slot(f, t, i, 0, rng)
            }
        }
        Statement::Constructor { .. } | Statement::Method { .. } => {
            let slots = t.statements[i].refs().len();
            if slots == 0 {
                return 0;
            }
            let slot = rng.random_range(0..slots);
            resample_slot(f, t, i, slot, rng)
        }
    }
}

/// Points reference `slot` of statement `i` at another variable of its
/// kind, either an existing one or a fresh value inserted just before.
fn resample_slot(f: &Factory<'_>, t: &mut TestCase, i: usize, slot: usize, rng: &mut dyn RngCore) -> usize {
    let Some(Some(kind)) = t.statements[i].slot_kinds(f.unit).and_then(|k| k.get(slot).copied()) else {
        return 0;
    };
    let reuse = if kind == Kind::Unit { 0.7 } else { 0.5 };
    let mut at = i;
    let v = f.satisfy(t, &mut at, kind, reuse, rng);
    *t.statements[at].refs_mut().swap_remove(slot) = v;
    at - i
}

fn perturb(lit: &mut Literal, rng: &mut dyn RngCore) {
    match lit {
        Literal::Int(v) => {
            let d = rng.random_range(1..=10);
            *v = if rng.random_bool(0.5) { v.wrapping_add(d) } else { v.wrapping_sub(d) };
        }
        Literal::Float(v) => {
            let scale = if v.abs() > 1.0 { v.abs() } else { 1.0 };
            loop {
                let z: f64 = StandardNormal.sample(rng);
                let next = *v + z * scale;
                if next.is_finite() {
                    *v = next;
                    break;
                }
            }
        }
        Literal::Bool(b) => *b = !*b,
        Literal::Str(s) => edit_text(s, rng),
    }
}

fn edit_text(s: &mut String, rng: &mut dyn RngCore) {
    let mut chars: Vec<char> = s.chars().collect();
    let c = (b'a' + rng.random_range(0..26u8)) as char;
    match (chars.is_empty(), rng.random_range(0..3)) {
        (true, _) | (false, 0) => {
            let at = rng.random_range(0..=chars.len());
            chars.insert(at, c);
        }
        (false, 1) => {
            let at = rng.random_range(0..chars.len());
            chars.remove(at);
        }
        _ => {
            let at = rng.random_range(0..chars.len());
            chars[at] = c;
        }
    }
    *s = chars.into_iter().collect();
}
