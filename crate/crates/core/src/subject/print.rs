use alloc::string::String;
use core::fmt::Write;

use super::ast::*;
use super::lexer::quote;

/// Renders a unit back to `.sub` source. `parse_subject` of the output
/// yields the same AST.
pub fn print_subject(unit: &SubjectUnit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "unit {} {{", unit.name);
    for f in &unit.fields {
        let vis = if f.public { "public " } else { "" };
        let _ = writeln!(out, "  {vis}field {}: {};", f.name, kind_name(unit, f.kind));
    }
    for (id, m) in unit.callables() {
        out.push('\n');
        if id == 0 {
            out.push_str("  constructor(");
        } else {
            let _ = write!(out, "  method {}(", m.name);
        }
        for (i, p) in m.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}: {}", p.name, kind_name(unit, p.kind));
        }
        out.push(')');
        if let Some(k) = m.ret {
            let _ = write!(out, ": {}", kind_name(unit, k));
        }
        out.push(' ');
        block(unit, &m.body, 1, &mut out);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

pub fn kind_name(unit: &SubjectUnit, k: Kind) -> &str {
    k.keyword().unwrap_or(unit.name.as_str())
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn block(unit: &SubjectUnit, body: &[Stmt], level: usize, out: &mut String) {
    out.push_str("{\n");
    for s in body {
        stmt(unit, s, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn stmt(unit: &SubjectUnit, s: &Stmt, level: usize, out: &mut String) {
    indent(level, out);
    match s {
        Stmt::Var { name, kind, init } => {
            let _ = writeln!(out, "var {name}: {} = {};", kind_name(unit, *kind), print_expr(init));
        }
        Stmt::Assign { name, value } => {
            let _ = writeln!(out, "{name} = {};", print_expr(value));
        }
        Stmt::SetField { field, value } => {
            let _ = writeln!(out, "this.{field} = {};", print_expr(value));
        }
        Stmt::If { .. } => {
            if_chain(unit, s, level, out);
            out.push('\n');
        }
        Stmt::While { cond, body, .. } => {
            let _ = write!(out, "while ({}) ", print_expr(cond));
            block(unit, body, level, out);
            out.push('\n');
        }
        Stmt::Return(None) => out.push_str("return;\n"),
        Stmt::Return(Some(e)) => {
            let _ = writeln!(out, "return {};", print_expr(e));
        }
        Stmt::Throw(t) => {
            let _ = writeln!(out, "throw {};", quote(t));
        }
        Stmt::Call(e) => {
            let _ = writeln!(out, "{};", print_expr(e));
        }
    }
}

fn if_chain(unit: &SubjectUnit, s: &Stmt, level: usize, out: &mut String) {
    let Stmt::If { cond, then_body, else_body, .. } = s else { unreachable!() };
    let _ = write!(out, "if ({}) ", print_expr(cond));
    block(unit, then_body, level, out);
    match else_body.as_deref() {
        None => {}
        Some([nested @ Stmt::If { .. }]) => {
            out.push_str(" else ");
            if_chain(unit, nested, level, out);
        }
        Some(body) => {
            out.push_str(" else ");
            block(unit, body, level, out);
        }
    }
}

pub fn print_literal(l: &Literal) -> String {
    match l {
        Literal::Int(v) => alloc::format!("{v}"),
        Literal::Float(v) => alloc::format!("{v:?}"),
        Literal::Bool(b) => alloc::format!("{b}"),
        Literal::Str(s) => quote(s),
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(e, 0, &mut out);
    out
}

fn expr(e: &Expr, parent_prec: u8, out: &mut String) {
    match e {
        Expr::Lit(l) => out.push_str(&print_literal(l)),
        Expr::Local(n) => out.push_str(n),
        Expr::Field(f) => {
            out.push_str("this.");
            out.push_str(f);
        }
        Expr::Call { recv, method, args } => {
            match recv {
                Receiver::This => out.push_str("this"),
                Receiver::Var(v) => out.push_str(v),
            }
            out.push('.');
            out.push_str(method);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(a, 0, out);
            }
            out.push(')');
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            let prec = op.precedence();
            let paren = prec < parent_prec;
            if paren {
                out.push('(');
            }
            expr(lhs, prec, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            // left associative: an equal-precedence right child needs parens
            expr(rhs, prec + 1, out);
            if paren {
                out.push(')');
            }
        }
        Expr::Unary { op, operand } => {
            out.push(match op {
                UnOp::Neg => '-',
                UnOp::Not => '!',
            });
            let needs = matches!(**operand, Expr::Binary { .. })
                || matches!(**operand, Expr::Lit(Literal::Int(v)) if v < 0)
                || matches!(**operand, Expr::Lit(Literal::Float(v)) if v.is_sign_negative());
            if needs {
                out.push('(');
                expr(operand, 0, out);
                out.push(')');
            } else {
                expr(operand, 7, out);
            }
        }
    }
}
