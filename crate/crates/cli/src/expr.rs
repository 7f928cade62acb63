//! Polynomial expressions over a variable table.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? INT)?
//! atom  := INT | IDENT | 'hbar' | '(' expr ')'
//! ```
//!
//! `p/q` literals come out of `INT / INT`. Division and negative powers are
//! only allowed for nonzero constants and unit monomials in invertible
//! variables.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use superstar::graded_ring::HBAR;
use superstar::{GradedPoly, Scalar, VarTable};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("unknown identifier `{name}` at column {col}")]
    UnknownIdentifier { col: usize, name: String },
    #[error("illegal division at column {col}: {msg}")]
    IllegalDivision { col: usize, msg: String },
}

impl ExprError {
    /// 1-based column of the offending token.
    pub fn column(&self) -> usize {
        match self {
            ExprError::Syntax { col, .. }
            | ExprError::UnknownIdentifier { col, .. }
            | ExprError::IllegalDivision { col, .. } => *col,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Int(n), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ExprError::Syntax {
                    col,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((t, col));
        i += c.len_utf8();
    }
    out.push((Tok::End, text.len() + 1));
    Ok(out)
}

/// Parses against `table`. `aliases` maps display names back to variable names.
pub struct ExprParser<'a> {
    table: &'a VarTable,
    aliases: BTreeMap<&'a str, &'a str>,
}

impl<'a> ExprParser<'a> {
    pub fn new(table: &'a VarTable) -> Self {
        ExprParser {
            table,
            aliases: BTreeMap::new(),
        }
    }

    /// `aliases` is variable name to display name, as stored on a model.
    pub fn with_aliases(mut self, aliases: &'a BTreeMap<String, String>) -> Self {
        self.aliases = aliases.iter().map(|(k, v)| (v.as_str(), k.as_str())).collect();
        self
    }

    pub fn parse(&self, text: &str) -> Result<GradedPoly, ExprError> {
        let toks = lex(text)?;
        let mut p = Parser { toks, pos: 0, ctx: self };
        let e = p.expr()?;
        match p.peek() {
            Tok::End => Ok(e),
            Tok::Ident(_) | Tok::Int(_) | Tok::LParen => Err(p.syntax("missing `*` between factors")),
            _ => Err(p.syntax("unexpected token")),
        }
    }

    fn resolve(&self, name: &str, col: usize) -> Result<GradedPoly, ExprError> {
        if name == HBAR {
            return Ok(GradedPoly::hbar());
        }
        let real = self.aliases.get(name).copied().unwrap_or(name);
        match self.table.lookup(real) {
            Some(spec) => Ok(GradedPoly::var(spec)),
            None => Err(ExprError::UnknownIdentifier {
                col,
                name: name.to_string(),
            }),
        }
    }
}

pub fn parse_expression(table: &VarTable, text: &str) -> Result<GradedPoly, ExprError> {
    ExprParser::new(table).parse(text)
}

struct Parser<'p, 'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'p ExprParser<'a>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            col: self.col(),
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<GradedPoly, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc += &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GradedPoly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    let col = self.bump().1;
                    let d = self.unary()?;
                    acc = &acc * &invert(self.ctx.table, &d, col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<GradedPoly, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<GradedPoly, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let col = self.bump().1;
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let exp = match self.bump() {
            (Tok::Int(n), c) => u32::try_from(&n).map_err(|_| ExprError::Syntax {
                col: c,
                msg: "exponent too large".into(),
            })?,
            (_, c) => {
                return Err(ExprError::Syntax {
                    col: c,
                    msg: "expected an integer exponent".into(),
                })
            }
        };
        let base = if negative { invert(self.ctx.table, &base, col)? } else { base };
        Ok(base.pow(exp))
    }

    fn atom(&mut self) -> Result<GradedPoly, ExprError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(GradedPoly::constant(Scalar::from_big(n, BigInt::from(1)))),
            (Tok::Ident(name), col) => self.ctx.resolve(&name, col),
            (Tok::LParen, _) => {
                let e = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(e),
                    (_, col) => Err(ExprError::Syntax {
                        col,
                        msg: "expected `)`".into(),
                    }),
                }
            }
            (Tok::End, col) => Err(ExprError::Syntax {
                col,
                msg: "unexpected end of input".into(),
            }),
            (_, col) => Err(ExprError::Syntax {
                col,
                msg: "expected a number, a variable or `(`".into(),
            }),
        }
    }
}

/// Reciprocal of a nonzero constant or of a unit monomial in invertible variables.
fn invert(table: &VarTable, d: &GradedPoly, col: usize) -> Result<GradedPoly, ExprError> {
    let illegal = |msg: &str| ExprError::IllegalDivision { col, msg: msg.into() };
    let mut terms = d.terms();
    let (m, c) = match (terms.next(), terms.next()) {
        (None, _) => return Err(illegal("division by zero")),
        (Some(t), None) => t,
        _ => return Err(illegal("divisor must be a single monomial")),
    };
    if m.hbar() != 0 || !m.odd().is_empty() {
        return Err(illegal("divisor must be a monomial in invertible variables"));
    }
    if let Some((v, _)) = m.even().iter().find(|(v, _)| !table.get(*v).invertible) {
        return Err(illegal(&format!("`{}` is not invertible", table.get(*v).name)));
    }
    let m_inv = m.inverse().ok_or_else(|| illegal("divisor is not a unit"))?;
    let c_inv = c.recip().ok_or_else(|| illegal("division by zero"))?;
    Ok(GradedPoly::term(c_inv, m_inv))
}
