//! Recursive-descent front end for `.sub` files.
//!
//! Parsing runs in two passes: the first collects field and callable
//! signatures and records where every body starts, the second parses the
//! bodies with all signatures known so that forward self calls resolve.
//! Name resolution and kind checking happen during the second pass, so a
//! successfully parsed unit is well-formed.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use super::ast::*;
use super::lexer::{tokenize, LexError, Pos, Tok, Token};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    Lex { pos: Pos, message: String },
    Syntax { pos: Pos, expected: Vec<String>, found: String },
    Resolution { pos: Pos, name: String },
    Kind { pos: Pos, message: String },
    Duplicate { pos: Pos, what: &'static str, name: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Lex { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::Resolution { pos, .. }
            | ParseError::Kind { pos, .. }
            | ParseError::Duplicate { pos, .. } => *pos,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Lex { pos, message } => write!(f, "{pos}: {message}"),
            ParseError::Syntax { pos, expected, found } => {
                write!(f, "{pos}: syntax error: expected {}, found {found}", expected.join(" or "))
            }
            ParseError::Resolution { pos, name } => write!(f, "{pos}: unknown identifier `{name}`"),
            ParseError::Kind { pos, message } => write!(f, "{pos}: kind error: {message}"),
            ParseError::Duplicate { pos, what, name } => {
                write!(f, "{pos}: duplicate {what} name `{name}`")
            }
        }
    }
}

impl core::error::Error for ParseError {}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError::Lex { pos: e.pos, message: e.message }
    }
}

pub(crate) const RESERVED: [&str; 20] = [
    "unit", "field", "public", "constructor", "method", "var", "if", "else", "while", "return",
    "throw", "this", "true", "false", "int", "float", "bool", "string", "new", "test",
];

pub(crate) struct Cursor<'t> {
    pub toks: &'t [Token],
    pub at: usize,
}

impl<'t> Cursor<'t> {
    pub fn new(toks: &'t [Token]) -> Self {
        Cursor { toks, at: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> &Token {
        let t = &self.toks[self.at];
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &'static str) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat_punct(p) {
            Ok(pos)
        } else {
            Err(self.error(&[&format!("`{p}`")]))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat_kw(kw) {
            Ok(pos)
        } else {
            Err(self.error(&[&format!("`{kw}`")]))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    pub fn expect_str(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["text literal"])),
        }
    }

    /// Skips a balanced `{ ... }` block, cursor on the opening brace.
    fn skip_block(&mut self) -> Result<(), ParseError> {
        self.expect_punct("{")?;
        let mut depth = 1usize;
        while depth > 0 {
            match self.peek() {
                Tok::Punct("{") => depth += 1,
                Tok::Punct("}") => depth -= 1,
                Tok::Eof => return Err(self.error(&["`}`"])),
                _ => {}
            }
            self.bump();
        }
        Ok(())
    }
}

pub(crate) fn parse_kind(c: &mut Cursor<'_>, unit_name: &str) -> Result<Kind, ParseError> {
    let pos = c.pos();
    let kind = match c.peek() {
        Tok::Ident(s) => match s.as_str() {
            "int" => Kind::Int,
            "float" => Kind::Float,
            "bool" => Kind::Bool,
            "string" => Kind::Str,
            other if other == unit_name => Kind::Unit,
            other if !RESERVED.contains(&other) => {
                return Err(ParseError::Resolution { pos, name: other.to_string() })
            }
            _ => return Err(c.error(&["kind"])),
        },
        _ => return Err(c.error(&["kind"])),
    };
    c.bump();
    Ok(kind)
}

struct Header {
    decl: MethodDecl,
    body_at: usize,
}

/// Parses and checks a subject unit.
pub fn parse_subject(source: &str) -> Result<SubjectUnit, ParseError> {
    let toks = tokenize(source)?;
    let mut c = Cursor::new(&toks);

    c.expect_kw("unit")?;
    let (name, _) = c.expect_ident()?;
    c.expect_punct("{")?;

    let mut fields: Vec<FieldDecl> = Vec::new();
    while c.is_kw("public") || c.is_kw("field") {
        let public = c.eat_kw("public");
        c.expect_kw("field")?;
        let (fname, pos) = c.expect_ident()?;
        c.expect_punct(":")?;
        let kind = parse_kind(&mut c, &name)?;
        c.expect_punct(";")?;
        if fields.iter().any(|f| f.name == fname) {
            return Err(ParseError::Duplicate { pos, what: "field", name: fname });
        }
        fields.push(FieldDecl { name: fname, kind, public });
    }

    if !c.is_kw("constructor") {
        return Err(c.error(&["`public`", "`field`", "`constructor`"]));
    }
    c.bump();
    let params = parse_params(&mut c, &name)?;
    let ctor = Header {
        decl: MethodDecl {
            name: CONSTRUCTOR.to_string(),
            params,
            ret: None,
            body: Vec::new(),
            is_inspector: false,
        },
        body_at: c.at,
    };
    c.skip_block()?;

    let mut methods: Vec<Header> = Vec::new();
    while c.eat_kw("method") {
        let (mname, pos) = c.expect_ident()?;
        let params = parse_params(&mut c, &name)?;
        let ret = if c.eat_punct(":") { Some(parse_kind(&mut c, &name)?) } else { None };
        if methods.iter().any(|m| m.decl.name == mname) {
            return Err(ParseError::Duplicate { pos, what: "method", name: mname });
        }
        let body_at = c.at;
        c.skip_block()?;
        methods.push(Header {
            decl: MethodDecl { name: mname, params, ret, body: Vec::new(), is_inspector: false },
            body_at,
        });
    }
    if !c.eat_punct("}") {
        return Err(c.error(&["`method`", "`}`"]));
    }
    if *c.peek() != Tok::Eof {
        return Err(c.error(&["end of input"]));
    }

    let mut unit = SubjectUnit {
        name,
        fields,
        constructor: ctor.decl.clone(),
        methods: methods.iter().map(|h| h.decl.clone()).collect(),
    };

    let mut next_cond: CondId = 0;
    let headers: Vec<&Header> = core::iter::once(&ctor).chain(methods.iter()).collect();
    for (id, h) in headers.iter().enumerate() {
        let mut bp = BodyParser {
            c: Cursor { toks: &toks, at: h.body_at },
            unit: &unit,
            method: unit.callable(id),
            scopes: vec![Vec::new()],
            next_cond,
        };
        let body = bp.block()?;
        next_cond = bp.next_cond;
        unit.callable_mut(id).body = body;
    }

    super::calls::mark_inspectors(&mut unit);
    Ok(unit)
}

fn parse_params(c: &mut Cursor<'_>, unit_name: &str) -> Result<Vec<Param>, ParseError> {
    c.expect_punct("(")?;
    let mut params: Vec<Param> = Vec::new();
    if !c.is_punct(")") {
        loop {
            let (pname, pos) = c.expect_ident()?;
            c.expect_punct(":")?;
            let kind = parse_kind(c, unit_name)?;
            if params.iter().any(|p| p.name == pname) {
                return Err(ParseError::Duplicate { pos, what: "parameter", name: pname });
            }
            params.push(Param { name: pname, kind });
            if !c.eat_punct(",") {
                break;
            }
        }
    }
    c.expect_punct(")")?;
    Ok(params)
}

struct BodyParser<'a> {
    c: Cursor<'a>,
    unit: &'a SubjectUnit,
    method: &'a MethodDecl,
    scopes: Vec<Vec<(String, Kind)>>,
    next_cond: CondId,
}

type Typed = (Expr, Option<Kind>);

impl<'a> BodyParser<'a> {
    fn lookup_local(&self, name: &str) -> Option<Kind> {
        for scope in self.scopes.iter().rev() {
            if let Some((_, k)) = scope.iter().rev().find(|(n, _)| n == name) {
                return Some(*k);
            }
        }
        self.method.params.iter().find(|p| p.name == name).map(|p| p.kind)
    }

    fn kind_error(&self, pos: Pos, message: String) -> ParseError {
        ParseError::Kind { pos, message }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.c.expect_punct("{")?;
        self.scopes.push(Vec::new());
        let mut out = Vec::new();
        while !self.c.is_punct("}") {
            if *self.c.peek() == Tok::Eof {
                return Err(self.c.error(&["`}`"]));
            }
            out.push(self.stmt()?);
        }
        self.c.bump();
        self.scopes.pop();
        Ok(out)
    }

    fn expect_kind(&self, pos: Pos, want: Kind, got: Option<Kind>, what: &str) -> Result<(), ParseError> {
        match got {
            Some(k) if k == want => Ok(()),
            Some(k) => Err(self.kind_error(pos, format!("{what} expects {want}, found {k}"))),
            None => Err(self.kind_error(pos, format!("{what} expects {want}, found no value"))),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.c.pos();
        if self.c.eat_kw("var") {
            let (name, npos) = self.c.expect_ident()?;
            self.c.expect_punct(":")?;
            let kind = parse_kind(&mut self.c, &self.unit.name)?;
            self.c.expect_punct("=")?;
            let epos = self.c.pos();
            let (init, k) = self.expr()?;
            self.c.expect_punct(";")?;
            self.expect_kind(epos, kind, k, "declaration")?;
            if self.lookup_local(&name).is_some() {
                return Err(ParseError::Duplicate { pos: npos, what: "local", name });
            }
            self.scopes.last_mut().unwrap().push((name.clone(), kind));
            return Ok(Stmt::Var { name, kind, init });
        }
        if self.c.eat_kw("if") {
            return self.if_rest();
        }
        if self.c.eat_kw("while") {
            let id = self.fresh_cond();
            let cond = self.condition()?;
            let body = self.block()?;
            return Ok(Stmt::While { id, cond, body });
        }
        if self.c.eat_kw("return") {
            if self.c.eat_punct(";") {
                if let Some(k) = self.method.ret {
                    return Err(self.kind_error(pos, format!("missing return value of kind {k}")));
                }
                return Ok(Stmt::Return(None));
            }
            let epos = self.c.pos();
            let (e, k) = self.expr()?;
            self.c.expect_punct(";")?;
            match self.method.ret {
                Some(want) => self.expect_kind(epos, want, k, "return")?,
                None => {
                    return Err(self.kind_error(epos, "return with a value in a method without a return kind".into()))
                }
            }
            return Ok(Stmt::Return(Some(e)));
        }
        if self.c.eat_kw("throw") {
            let text = self.c.expect_str()?;
            self.c.expect_punct(";")?;
            return Ok(Stmt::Throw(text));
        }
        if self.c.is_kw("this") && *self.c.peek_at(1) == Tok::Punct(".") && *self.c.peek_at(3) == Tok::Punct("=") {
            self.c.bump();
            self.c.bump();
            let (field, fpos) = self.c.expect_ident()?;
            let fkind = match self.unit.field(&field) {
                Some(f) => f.kind,
                None => return Err(ParseError::Resolution { pos: fpos, name: field }),
            };
            self.c.expect_punct("=")?;
            let epos = self.c.pos();
            let (value, k) = self.expr()?;
            self.c.expect_punct(";")?;
            self.expect_kind(epos, fkind, k, "field assignment")?;
            return Ok(Stmt::SetField { field, value });
        }
        if let Tok::Ident(name) = self.c.peek().clone() {
            if *self.c.peek_at(1) == Tok::Punct("=") && !RESERVED.contains(&name.as_str()) {
                self.c.bump();
                self.c.bump();
                let kind = self
                    .lookup_local(&name)
                    .ok_or_else(|| ParseError::Resolution { pos, name: name.clone() })?;
                let epos = self.c.pos();
                let (value, k) = self.expr()?;
                self.c.expect_punct(";")?;
                self.expect_kind(epos, kind, k, "assignment")?;
                return Ok(Stmt::Assign { name, value });
            }
        }
        let (e, _) = self.expr()?;
        if !matches!(e, Expr::Call { .. }) {
            return Err(ParseError::Syntax {
                pos,
                expected: vec!["statement".to_string()],
                found: "expression".to_string(),
            });
        }
        self.c.expect_punct(";")?;
        Ok(Stmt::Call(e))
    }

    fn fresh_cond(&mut self) -> CondId {
        let id = self.next_cond;
        self.next_cond += 1;
        id
    }

    fn if_rest(&mut self) -> Result<Stmt, ParseError> {
        let id = self.fresh_cond();
        let cond = self.condition()?;
        let then_body = self.block()?;
        let else_body = if self.c.eat_kw("else") {
            if self.c.eat_kw("if") {
                Some(vec![self.if_rest()?])
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt::If { id, cond, then_body, else_body })
    }

    fn condition(&mut self) -> Result<Expr, ParseError> {
        self.c.expect_punct("(")?;
        let pos = self.c.pos();
        let (e, k) = self.expr()?;
        self.c.expect_punct(")")?;
        self.expect_kind(pos, Kind::Bool, k, "condition")?;
        Ok(e)
    }

    fn expr(&mut self) -> Result<Typed, ParseError> {
        self.binary(1)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        let Tok::Punct(p) = self.c.peek() else { return None };
        Some(match *p {
            "||" => BinOp::Or,
            "&&" => BinOp::And,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Typed, ParseError> {
        let (mut lhs, mut lk) = self.unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let pos = self.c.pos();
            self.c.bump();
            let (rhs, rk) = self.binary(prec + 1)?;
            let (operand, result) = check_binary(op, lk, rk)
                .map_err(|m| self.kind_error(pos, m))?;
            lhs = Expr::Binary { op, operand, lhs: Box::new(lhs), rhs: Box::new(rhs) };
            lk = Some(result);
        }
        Ok((lhs, lk))
    }

    fn unary(&mut self) -> Result<Typed, ParseError> {
        let pos = self.c.pos();
        if self.c.eat_punct("-") {
            let (e, k) = self.unary()?;
            if !k.is_some_and(Kind::is_numeric) {
                return Err(self.kind_error(pos, "unary `-` needs a numeric operand".into()));
            }
            return Ok((Expr::Unary { op: UnOp::Neg, operand: Box::new(e) }, k));
        }
        if self.c.eat_punct("!") {
            let (e, k) = self.unary()?;
            if k != Some(Kind::Bool) {
                return Err(self.kind_error(pos, "`!` needs a bool operand".into()));
            }
            return Ok((Expr::Unary { op: UnOp::Not, operand: Box::new(e) }, k));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Typed, ParseError> {
        let pos = self.c.pos();
        match self.c.peek().clone() {
            Tok::Int(v) => {
                self.c.bump();
                Ok((Expr::Lit(Literal::Int(v)), Some(Kind::Int)))
            }
            Tok::Float(v) => {
                self.c.bump();
                Ok((Expr::Lit(Literal::Float(v)), Some(Kind::Float)))
            }
            Tok::Str(s) => {
                self.c.bump();
                Ok((Expr::Lit(Literal::Str(s)), Some(Kind::Str)))
            }
            Tok::Punct("(") => {
                self.c.bump();
                let e = self.expr()?;
                self.c.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(id) if id == "true" || id == "false" => {
                self.c.bump();
                Ok((Expr::Lit(Literal::Bool(id == "true")), Some(Kind::Bool)))
            }
            Tok::Ident(id) if id == "this" => {
                self.c.bump();
                self.c.expect_punct(".")?;
                let (member, mpos) = self.c.expect_ident()?;
                if self.c.is_punct("(") {
                    self.call(Receiver::This, member, mpos)
                } else {
                    match self.unit.field(&member) {
                        Some(f) => Ok((Expr::Field(member), Some(f.kind))),
                        None => Err(ParseError::Resolution { pos: mpos, name: member }),
                    }
                }
            }
            Tok::Ident(id) if !RESERVED.contains(&id.as_str()) => {
                self.c.bump();
                let kind = self
                    .lookup_local(&id)
                    .ok_or_else(|| ParseError::Resolution { pos, name: id.clone() })?;
                if self.c.eat_punct(".") {
                    let (member, mpos) = self.c.expect_ident()?;
                    if kind != Kind::Unit {
                        return Err(self.kind_error(pos, format!("`{id}` of kind {kind} has no methods")));
                    }
                    if !self.c.is_punct("(") {
                        return Err(self.c.error(&["`(`"]));
                    }
                    return self.call(Receiver::Var(id), member, mpos);
                }
                Ok((Expr::Local(id), Some(kind)))
            }
            _ => Err(self.c.error(&["expression"])),
        }
    }

    fn call(&mut self, recv: Receiver, method: String, mpos: Pos) -> Result<Typed, ParseError> {
        let Some(decl) = self.unit.method(&method) else {
            return Err(ParseError::Resolution { pos: mpos, name: method });
        };
        self.c.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.c.is_punct(")") {
            loop {
                let apos = self.c.pos();
                let (a, k) = self.expr()?;
                let i = args.len();
                match decl.params.get(i) {
                    Some(p) => self.expect_kind(apos, p.kind, k, &format!("argument {} of `{method}`", i + 1))?,
                    None => {
                        return Err(self.kind_error(apos, format!("`{method}` takes {} arguments", decl.params.len())))
                    }
                }
                args.push(a);
                if !self.c.eat_punct(",") {
                    break;
                }
            }
        }
        self.c.expect_punct(")")?;
        if args.len() != decl.params.len() {
            return Err(self.kind_error(mpos, format!("`{method}` takes {} arguments", decl.params.len())));
        }
        Ok((Expr::Call { recv, method, args }, decl.ret))
    }
}

/// Kind rule for binary operators: returns (operand kind, result kind).
pub(crate) fn check_binary(op: BinOp, l: Option<Kind>, r: Option<Kind>) -> Result<(Kind, Kind), String> {
    let (Some(l), Some(r)) = (l, r) else {
        return Err(format!("`{}` applied to a call without a value", op.symbol()));
    };
    let promoted = if l == Kind::Float || r == Kind::Float { Kind::Float } else { Kind::Int };
    let numeric = l.is_numeric() && r.is_numeric();
    if op.is_arithmetic() {
        if !numeric {
            return Err(format!("`{}` needs numeric operands, found {l} and {r}", op.symbol()));
        }
        Ok((promoted, promoted))
    } else if op.is_logical() {
        if l != Kind::Bool || r != Kind::Bool {
            return Err(format!("`{}` needs bool operands, found {l} and {r}", op.symbol()));
        }
        Ok((Kind::Bool, Kind::Bool))
    } else if matches!(op, BinOp::Eq | BinOp::Ne) {
        if numeric {
            Ok((promoted, Kind::Bool))
        } else if l == r {
            Ok((l, Kind::Bool))
        } else {
            Err(format!("cannot compare {l} with {r}"))
        }
    } else {
        if !numeric {
            return Err(format!("`{}` needs numeric operands, found {l} and {r}", op.symbol()));
        }
        Ok((promoted, Kind::Bool))
    }
}
