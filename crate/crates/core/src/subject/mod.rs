//! Subject units: parsing, pretty-printing and the static artifacts the
//! search and mutation engines consume.

mod ast;
mod calls;
mod goals;
mod lexer;
mod parser;
mod print;

pub use ast::*;
pub use calls::{direct_callees, static_call_closure, UnknownMethod};
pub use goals::{build_cdg, extract_goals, ControlDependencyGraph, CoverageGoal, GoalId, GoalIndex, GoalKind};
pub use lexer::{quote, Pos};
pub use parser::{parse_subject, ParseError};
pub use print::{kind_name, print_expr, print_literal, print_subject};

pub(crate) use lexer::{tokenize, Tok};
pub(crate) use parser::{parse_kind, Cursor};
