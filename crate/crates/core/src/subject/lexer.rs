use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Float(v) => write!(f, "`{v:?}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

// Longest first so that `<=` wins over `<`.
const PUNCTS: [&str; 26] = [
    "&&", "||", "<=", ">=", "==", "!=", "{", "}", "(", ")", ";", ":", ",", ".", "=", "+", "-",
    "*", "/", "%", "<", ">", "!", "#", "[", "]",
];

struct Scanner {
    chars: Vec<char>,
    i: usize,
    line: u32,
    col: u32,
}

impl Scanner {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn advance(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek(0).is_some_and(&f) {
            self.advance();
        }
    }

    fn number(&mut self, pos: Pos) -> Result<Tok, LexError> {
        let start = self.i;
        let mut is_float = false;
        self.take_while(|d| d.is_ascii_digit());
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|d| d.is_ascii_digit()) {
            is_float = true;
            self.advance();
            self.take_while(|d| d.is_ascii_digit());
        }
        if matches!(self.peek(0), Some('e') | Some('E')) {
            let sign = usize::from(matches!(self.peek(1), Some('+') | Some('-')));
            if self.peek(1 + sign).is_some_and(|d| d.is_ascii_digit()) {
                is_float = true;
                for _ in 0..=sign {
                    self.advance();
                }
                self.take_while(|d| d.is_ascii_digit());
            }
        }
        let text: String = self.chars[start..self.i].iter().collect();
        if is_float {
            text.parse().map(Tok::Float).map_err(|_| LexError {
                pos,
                message: alloc::format!("malformed real literal `{text}`"),
            })
        } else {
            text.parse().map(Tok::Int).map_err(|_| LexError {
                pos,
                message: alloc::format!("integer literal `{text}` out of range"),
            })
        }
    }

    fn text(&mut self, pos: Pos) -> Result<Tok, LexError> {
        self.advance();
        let mut s = String::new();
        loop {
            match self.peek(0) {
                None | Some('\n') => {
                    return Err(LexError { pos, message: "unterminated text literal".to_string() })
                }
                Some('"') => {
                    self.advance();
                    return Ok(Tok::Str(s));
                }
                Some('\\') => {
                    let decoded = match self.peek(1) {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('\\') => '\\',
                        Some('"') => '"',
                        _ => {
                            return Err(LexError { pos: self.pos(), message: "unknown escape sequence".to_string() })
                        }
                    };
                    self.advance();
                    self.advance();
                    s.push(decoded);
                }
                Some(ch) => {
                    self.advance();
                    s.push(ch);
                }
            }
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let mut sc = Scanner { chars: src.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(c) = sc.peek(0) {
        if c.is_whitespace() {
            sc.advance();
            continue;
        }
        if c == '/' && sc.peek(1) == Some('/') {
            sc.take_while(|ch| ch != '\n');
            continue;
        }
        let pos = sc.pos();
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = sc.i;
            sc.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            Tok::Ident(sc.chars[start..sc.i].iter().collect())
        } else if c.is_ascii_digit() {
            sc.number(pos)?
        } else if c == '"' {
            sc.text(pos)?
        } else {
            let rest = &sc.chars[sc.i..];
            let punct = PUNCTS.iter().find(|p| {
                let pc: Vec<char> = p.chars().collect();
                rest.len() >= pc.len() && rest[..pc.len()] == pc[..]
            });
            match punct {
                Some(p) => {
                    for _ in 0..p.len() {
                        sc.advance();
                    }
                    Tok::Punct(p)
                }
                None => return Err(LexError { pos, message: alloc::format!("unexpected character `{c}`") }),
            }
        };
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: sc.pos() });
    Ok(out)
}

/// Escapes a text literal so that `tokenize` reads it back unchanged.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_operators() {
        let toks = tokenize("a<=10 && b>=1.5e2 // trailing").unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            alloc::vec![
                Tok::Ident("a".into()),
                Tok::Punct("<="),
                Tok::Int(10),
                Tok::Punct("&&"),
                Tok::Ident("b".into()),
                Tok::Punct(">="),
                Tok::Float(150.0),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn member_access_is_not_a_float() {
        let toks = tokenize("v1.deposit").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("v1".into()));
        assert_eq!(toks[1].tok, Tok::Punct("."));
    }

    #[test]
    fn quote_roundtrip() {
        let s = "a \"b\"\\\n";
        let toks = tokenize(&quote(s)).unwrap();
        assert_eq!(toks[0].tok, Tok::Str(s.into()));
    }

    #[test]
    fn positions_track_lines() {
        let toks = tokenize("x\n  y").unwrap();
        assert_eq!(toks[1].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(tokenize("a @ b").is_err());
        assert!(tokenize("\"open").is_err());
    }
}
