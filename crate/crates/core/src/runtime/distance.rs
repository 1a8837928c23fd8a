use super::Value;
use crate::subject::BinOp;

/// Distance constant for integers and reals alike.
pub const K: f64 = 1.0;

/// Raw distance to making `l op r` true; 0 when it already is (up to the
/// real-valued `<`/`>` corner noted in `leaf`).
pub fn branch_distance(op: BinOp, l: &Value, r: &Value) -> f64 {
    let (Some(a), Some(b)) = (l.as_f64(), r.as_f64()) else {
        let equal = l == r;
        return match op {
            BinOp::Eq => {
                if equal {
                    0.0
                } else {
                    K
                }
            }
            BinOp::Ne => {
                if equal {
                    K
                } else {
                    0.0
                }
            }
            _ => K,
        };
    };
    match op {
        BinOp::Lt => pos(a - b + K),
        BinOp::Le => pos(a - b),
        BinOp::Gt => pos(b - a + K),
        BinOp::Ge => pos(b - a),
        BinOp::Eq => (a - b).abs(),
        BinOp::Ne => {
            if a == b {
                K
            } else {
                0.0
            }
        }
        _ => K,
    }
}

fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// A not-taken outcome always has positive distance: the table yields 0 for
/// reals strictly between b−K and b under `<`, and NaN on NaN operands.
pub(crate) fn guard(d: f64) -> f64 {
    if d > 0.0 {
        d
    } else {
        K
    }
}

/// (true distance, false distance) of a comparison whose outcome is known.
pub(crate) fn leaf(op: BinOp, l: &Value, r: &Value, outcome: bool) -> (f64, f64) {
    let neg = op.negated().expect("comparison");
    if outcome {
        (0.0, guard(branch_distance(neg, l, r)))
    } else {
        (guard(branch_distance(op, l, r)), 0.0)
    }
}

/// d / (d + 1), kept strictly below 1.
pub fn normalize(d: f64) -> f64 {
    const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
    let v = d / (d + 1.0);
    if v.is_nan() || v >= 1.0 {
        BELOW_ONE
    } else {
        v
    }
}
