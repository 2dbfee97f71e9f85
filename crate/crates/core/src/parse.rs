//! Parser for the term grammar:
//!
//! ```text
//! term  := abs | app
//! abs   := ("\" | "λ") ident "." term
//! app   := atom { atom }
//! atom  := ident | "(" term ")"
//! ident := [a-zA-Z][a-zA-Z0-9'_]*
//! ```
//!
//! Application associates to the left, abstraction bodies extend maximally
//! to the right. Open terms are first-class: no unbound-name check.

use crate::term::Term;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                name.push(c);
                self.bump();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '\'' || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Ok(name)
            }
            Some(c) => Err(self.error(format!("expected identifier, found {c:?}"))),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }
}

/// Parses a term. Errors carry line/column.
pub fn parse(src: &str) -> Result<Term, ParseError> {
    let mut lx = Lexer::new(src);
    lx.skip_ws();
    let t = parse_term(&mut lx)?;
    lx.skip_ws();
    match lx.peek() {
        None => Ok(t),
        Some(c) => Err(lx.error(format!("unexpected {c:?} after term"))),
    }
}

fn parse_term(lx: &mut Lexer) -> Result<Term, ParseError> {
    lx.skip_ws();
    match lx.peek() {
        Some('\\') | Some('λ') => {
            lx.bump();
            lx.skip_ws();
            let binder = lx.ident()?;
            lx.skip_ws();
            match lx.peek() {
                Some('.') => {
                    lx.bump();
                }
                _ => return Err(lx.error("expected '.' after binder")),
            }
            let body = parse_term(lx)?;
            Ok(Term::abs(binder, body))
        }
        _ => parse_app(lx),
    }
}

fn parse_app(lx: &mut Lexer) -> Result<Term, ParseError> {
    let mut t = parse_atom(lx)?;
    loop {
        lx.skip_ws();
        match lx.peek() {
            Some('(') => {}
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => break,
        }
        let arg = parse_atom(lx)?;
        t = Term::app(t, arg);
    }
    Ok(t)
}

fn parse_atom(lx: &mut Lexer) -> Result<Term, ParseError> {
    lx.skip_ws();
    match lx.peek() {
        Some('(') => {
            lx.bump();
            let t = parse_term(lx)?;
            lx.skip_ws();
            match lx.peek() {
                Some(')') => {
                    lx.bump();
                    Ok(t)
                }
                _ => Err(lx.error("expected ')'")),
            }
        }
        _ => Ok(Term::Var(lx.ident()?)),
    }
}

/// Expands the CLI-level named constants: free `I` becomes `\x.x` and free
/// `D` becomes `\x.x x`. Binding either name is rejected so the constants
/// can never be shadowed.
pub fn expand_constants(t: &Term) -> Result<Term, ParseError> {
    fn go(t: &Term, bound: &mut Vec<String>) -> Result<Term, ParseError> {
        match t {
            Term::Var(x) => {
                if bound.iter().any(|b| b == x) {
                    return Ok(t.clone());
                }
                match x.as_str() {
                    "I" => Ok(Term::identity()),
                    "D" => Ok(Term::delta()),
                    _ => Ok(t.clone()),
                }
            }
            Term::Abs(x, body) => {
                if x == "I" || x == "D" {
                    return Err(ParseError {
                        line: 0,
                        col: 0,
                        msg: format!("constant {x} cannot be rebound"),
                    });
                }
                bound.push(x.clone());
                let b = go(body, bound)?;
                bound.pop();
                Ok(Term::abs(x.clone(), b))
            }
            Term::App(fun, arg) => Ok(Term::app(go(fun, bound)?, go(arg, bound)?)),
        }
    }
    go(t, &mut Vec::new())
}

/// `parse` followed by constant expansion; the form the CLI and corpus
/// files use.
pub fn parse_with_constants(src: &str) -> Result<Term, ParseError> {
    expand_constants(&parse(src)?)
}

/// Loads a corpus file: one term per line, `#` starts a comment.
pub fn parse_corpus(src: &str) -> Result<Vec<(String, Term)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = match raw.find('#') {
            Some(j) => &raw[..j],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let t = parse_with_constants(line).map_err(|e| ParseError {
            line: i + 1,
            col: e.col,
            msg: e.msg,
        })?;
        out.push((line.to_string(), t));
    }
    Ok(out)
}
