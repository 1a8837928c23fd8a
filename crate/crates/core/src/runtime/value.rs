use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::subject::{Kind, Literal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    /// Handle of a heap instance; only meaningful within one execution.
    Ref(usize),
    /// Null reference, or the result of a method without a return kind.
    None,
}

impl Value {
    pub fn from_literal(l: &Literal) -> Value {
        match l {
            Literal::Int(v) => Value::Int(*v),
            Literal::Float(v) => Value::Float(*v),
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Str(s) => Value::Str(s.clone()),
        }
    }

    /// Back to a literal, for values that have one.
    pub fn to_literal(&self) -> Option<Literal> {
        Some(match self {
            Value::Int(v) => Literal::Int(*v),
            Value::Float(v) => Literal::Float(*v),
            Value::Bool(b) => Literal::Bool(*b),
            Value::Str(s) => Literal::Str(s.clone()),
            Value::Ref(_) | Value::None => return None,
        })
    }

    pub fn default_for(kind: Kind) -> Value {
        match kind {
            Kind::Int => Value::Int(0),
            Kind::Float => Value::Float(0.0),
            Kind::Bool => Value::Bool(false),
            Kind::Str => Value::Str(String::new()),
            Kind::Unit => Value::None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    /// Equality with an absolute tolerance on reals. NaN matches nothing.
    pub fn matches(&self, other: &Value, tolerance: f64) -> bool {
        match (self, other) {
            (Value::Float(a), Value::Float(b)) => a == b || (a - b).abs() <= tolerance,
            _ => self == other,
        }
    }
}
