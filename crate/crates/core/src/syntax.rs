//! Concrete text syntax for ALC concepts.
//!
//! ```text
//! concept := or
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "forall" ROLE "." unary | "exists" ROLE "." unary
//!          | "top" | "bot" | NAME | "(" concept ")"
//! ```
//!
//! `!` and the quantifier prefixes bind tightest, then `&`, then `|`. Binary
//! operators associate to the left.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An ALC concept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Name(Arc<str>),
    Top,
    Bottom,
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Forall(Arc<str>, Box<Concept>),
    Exists(Arc<str>, Box<Concept>),
}

impl Concept {
    pub fn name(n: &str) -> Concept {
        Concept::Name(Arc::from(n))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Concept {
        Concept::Not(Box::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Concept {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Concept {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn forall(role: &str, c: Concept) -> Concept {
        Concept::Forall(Arc::from(role), Box::new(c))
    }

    pub fn exists(role: &str, c: Concept) -> Concept {
        Concept::Exists(Arc::from(role), Box::new(c))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Concept::Name(_) | Concept::Top | Concept::Bottom => 1,
            Concept::Not(c) | Concept::Forall(_, c) | Concept::Exists(_, c) => 1 + c.size(),
            Concept::And(a, b) | Concept::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Height of the AST; leaves have height 1.
    pub fn height(&self) -> usize {
        match self {
            Concept::Name(_) | Concept::Top | Concept::Bottom => 1,
            Concept::Not(c) | Concept::Forall(_, c) | Concept::Exists(_, c) => 1 + c.height(),
            Concept::And(a, b) | Concept::Or(a, b) => 1 + a.height().max(b.height()),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Concept::Name(_) | Concept::Top | Concept::Bottom => false,
            Concept::Forall(..) | Concept::Exists(..) => true,
            Concept::Not(c) => c.has_quantifier(),
            Concept::And(a, b) | Concept::Or(a, b) => a.has_quantifier() || b.has_quantifier(),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_concept(self))
    }
}

impl std::str::FromStr for Concept {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_concept(s)
    }
}

/// A parse failure. `offset` is a 1-based byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    Top,
    Bot,
    Not,
    And,
    Or,
    Dot,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::Top => "`top`".into(),
            Tok::Bot => "`bot`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'.' => Tok::Dot,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b if b.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "top" => Tok::Top,
                    "bot" => Tok::Bot,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((start + 1, tok));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError {
                    offset: i + 1,
                    expected: vec!["a concept token".into()],
                    found: format!("character `{ch}`"),
                });
            }
        };
        toks.push((i + 1, tok));
        i += 1;
    }
    toks.push((text.len() + 1, Tok::Eof));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let (offset, tok) = &self.toks[self.pos];
        SyntaxError {
            offset: *offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.describe(),
        }
    }

    fn or(&mut self) -> Result<Concept, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Concept::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Concept, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Concept::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Concept, SyntaxError> {
        const START: &[&str] = &["`!`", "`forall`", "`exists`", "`top`", "`bot`", "name", "`(`"];
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Concept::not(self.unary()?))
            }
            q @ (Tok::Forall | Tok::Exists) => {
                self.bump();
                let role = match self.peek().clone() {
                    Tok::Ident(r) => {
                        self.bump();
                        r
                    }
                    _ => return Err(self.error(&["role name"])),
                };
                if *self.peek() != Tok::Dot {
                    return Err(self.error(&["`.`"]));
                }
                self.bump();
                let body = self.unary()?;
                Ok(if q == Tok::Forall { Concept::forall(&role, body) } else { Concept::exists(&role, body) })
            }
            Tok::Top => {
                self.bump();
                Ok(Concept::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(Concept::Bottom)
            }
            Tok::Ident(n) => {
                self.bump();
                Ok(Concept::name(&n))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`&`", "`|`", "`)`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(START)),
        }
    }
}

/// Parse a concept. Whitespace between tokens is ignored.
pub fn parse_concept(text: &str) -> Result<Concept, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let c = p.or()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["`&`", "`|`", "end of input"]));
    }
    Ok(c)
}

/// Parse the contents of a concept file: UTF-8 text holding one concept,
/// where `#` starts a comment running to the end of the line.
///
/// Comments are blanked out rather than removed so error offsets still
/// point into the original text.
pub fn parse_concept_file(text: &str) -> Result<Concept, SyntaxError> {
    let mut bytes = text.as_bytes().to_vec();
    let mut in_comment = false;
    for b in bytes.iter_mut() {
        match *b {
            b'\n' => in_comment = false,
            b'#' => {
                in_comment = true;
                *b = b' ';
            }
            _ if in_comment => *b = b' ',
            _ => {}
        }
    }
    // only whole multi-byte sequences inside comments were replaced
    let cleaned = String::from_utf8(bytes).expect("comment blanking keeps UTF-8 valid");
    parse_concept(&cleaned)
}

// binding strength: 0 = or, 1 = and, 2 = unary/atomic
fn level(c: &Concept) -> u8 {
    match c {
        Concept::Or(..) => 0,
        Concept::And(..) => 1,
        _ => 2,
    }
}

fn render_into(c: &Concept, min_level: u8, out: &mut String) {
    let paren = level(c) < min_level;
    if paren {
        out.push('(');
    }
    match c {
        Concept::Name(n) => out.push_str(n),
        Concept::Top => out.push_str("top"),
        Concept::Bottom => out.push_str("bot"),
        Concept::Not(inner) => {
            out.push('!');
            render_into(inner, 2, out);
        }
        Concept::And(a, b) => {
            render_into(a, 1, out);
            out.push_str(" & ");
            render_into(b, 2, out);
        }
        Concept::Or(a, b) => {
            render_into(a, 0, out);
            out.push_str(" | ");
            render_into(b, 1, out);
        }
        Concept::Forall(r, inner) => {
            out.push_str("forall ");
            out.push_str(r);
            out.push('.');
            render_into(inner, 2, out);
        }
        Concept::Exists(r, inner) => {
            out.push_str("exists ");
            out.push_str(r);
            out.push('.');
            render_into(inner, 2, out);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Render with the fewest parentheses that still re-parse to the same tree.
pub fn render_concept(c: &Concept) -> String {
    let mut out = String::new();
    render_into(c, 0, &mut out);
    out
}
