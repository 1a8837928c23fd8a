use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Value kinds of the subject language. `Unit` is a reference to an
/// instance of the unit being defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Int,
    Float,
    Bool,
    Str,
    Unit,
}

impl Kind {
    pub fn is_numeric(self) -> bool {
        matches!(self, Kind::Int | Kind::Float)
    }

    pub fn keyword(self) -> Option<&'static str> {
        match self {
            Kind::Int => Some("int"),
            Kind::Float => Some("float"),
            Kind::Bool => Some("bool"),
            Kind::Str => Some("string"),
            Kind::Unit => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword().unwrap_or("unit-reference"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectUnit {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub constructor: MethodDecl,
    pub methods: Vec<MethodDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub kind: Kind,
    pub public: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub kind: Kind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<Kind>,
    pub body: Vec<Stmt>,
    /// Derived after parsing: value-returning, parameterless, and free of
    /// field writes along every self call.
    pub is_inspector: bool,
}

/// Name the constructor carries wherever a callable name is needed.
pub const CONSTRUCTOR: &str = "constructor";

/// Index of a callable inside a unit: 0 is the constructor, `i + 1` is
/// `methods[i]`.
pub type CallableId = usize;

/// Unit-wide preorder number of an `if`/`while` conditional.
pub type CondId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Var { name: String, kind: Kind, init: Expr },
    Assign { name: String, value: Expr },
    SetField { field: String, value: Expr },
    If { id: CondId, cond: Expr, then_body: Vec<Stmt>, else_body: Option<Vec<Stmt>> },
    While { id: CondId, cond: Expr, body: Vec<Stmt> },
    Return(Option<Expr>),
    Throw(String),
    Call(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl Literal {
    pub fn kind(&self) -> Kind {
        match self {
            Literal::Int(_) => Kind::Int,
            Literal::Float(_) => Kind::Float,
            Literal::Bool(_) => Kind::Bool,
            Literal::Str(_) => Kind::Str,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Receiver {
    This,
    Var(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

pub const ARITHMETIC_OPS: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Rem];
pub const RELATIONAL_OPS: [BinOp; 6] =
    [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne];

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        ARITHMETIC_OPS.contains(&self)
    }

    pub fn is_relational(self) -> bool {
        RELATIONAL_OPS.contains(&self)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    /// The comparison whose truth value is the negation of `self`.
    pub fn negated(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Lt => BinOp::Ge,
            BinOp::Le => BinOp::Gt,
            BinOp::Gt => BinOp::Le,
            BinOp::Ge => BinOp::Lt,
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal),
    Local(String),
    Field(String),
    Call { recv: Receiver, method: String, args: Vec<Expr> },
    /// `operand` is the operand kind after int→float promotion; for `&&`
    /// and `||` it is `Bool`.
    Binary { op: BinOp, operand: Kind, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnOp, operand: Box<Expr> },
}

impl SubjectUnit {
    pub fn callable_count(&self) -> usize {
        self.methods.len() + 1
    }

    pub fn callable(&self, id: CallableId) -> &MethodDecl {
        if id == 0 {
            &self.constructor
        } else {
            &self.methods[id - 1]
        }
    }

    pub fn callable_mut(&mut self, id: CallableId) -> &mut MethodDecl {
        if id == 0 {
            &mut self.constructor
        } else {
            &mut self.methods[id - 1]
        }
    }

    pub fn callables(&self) -> impl Iterator<Item = (CallableId, &MethodDecl)> {
        core::iter::once(&self.constructor).chain(self.methods.iter()).enumerate()
    }

    /// Looks up a callable by name; `"constructor"` names the constructor.
    pub fn callable_id(&self, name: &str) -> Option<CallableId> {
        if name == CONSTRUCTOR {
            return Some(0);
        }
        self.methods.iter().position(|m| m.name == name).map(|i| i + 1)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn inspectors(&self) -> impl Iterator<Item = &MethodDecl> {
        self.methods.iter().filter(|m| m.is_inspector)
    }

    pub fn conditional_count(&self) -> usize {
        let mut n = 0;
        for (_, m) in self.callables() {
            walk_stmts(&m.body, &mut |s| {
                if matches!(s, Stmt::If { .. } | Stmt::While { .. }) {
                    n += 1;
                }
            });
        }
        n
    }
}

/// Visits every statement in preorder, descending into nested blocks.
pub fn walk_stmts<'a>(body: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in body {
        f(s);
        match s {
            Stmt::If { then_body, else_body, .. } => {
                walk_stmts(then_body, f);
                if let Some(e) = else_body {
                    walk_stmts(e, f);
                }
            }
            Stmt::While { body, .. } => walk_stmts(body, f),
            _ => {}
        }
    }
}

/// Visits every expression in preorder (statement order, then subtree).
pub fn walk_exprs<'a>(body: &'a [Stmt], f: &mut impl FnMut(&'a Expr)) {
    fn expr<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
        f(e);
        match e {
            Expr::Call { args, .. } => args.iter().for_each(|a| expr(a, f)),
            Expr::Binary { lhs, rhs, .. } => {
                expr(lhs, f);
                expr(rhs, f);
            }
            Expr::Unary { operand, .. } => expr(operand, f),
            Expr::Lit(_) | Expr::Local(_) | Expr::Field(_) => {}
        }
    }
    for s in body {
        match s {
            Stmt::Var { init: e, .. }
            | Stmt::Assign { value: e, .. }
            | Stmt::SetField { value: e, .. }
            | Stmt::Call(e)
            | Stmt::Return(Some(e)) => expr(e, f),
            Stmt::If { cond, then_body, else_body, .. } => {
                expr(cond, f);
                walk_exprs(then_body, f);
                if let Some(b) = else_body {
                    walk_exprs(b, f);
                }
            }
            Stmt::While { cond, body, .. } => {
                expr(cond, f);
                walk_exprs(body, f);
            }
            Stmt::Return(None) | Stmt::Throw(_) => {}
        }
    }
}
