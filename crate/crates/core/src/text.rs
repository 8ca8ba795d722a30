//! Textual syntax for polynomials and derivations over named variables.
//!
//! Grammar (whitespace-insensitive, `*` explicit, `^` for powers):
//!   polynomial := term (('+'|'-') term)*
//!   term       := factor ('*' factor)*
//!   factor     := '-' factor | atom ('^' integer)?
//!   atom       := integer ('/' integer)? | variable | '(' polynomial ')'
//!   derivation := dterm (('+'|'-') dterm)*
//!   dterm      := dfactor ('*' dfactor)*        -- exactly one `d/d<var>`
//!   dfactor    := '-' dfactor | 'd' '/' 'd<var>' | factor
//! Lists are comma-separated. Parsing reports one-based line/column
//! positions; the identifier `d` is reserved for partials in derivations.

use std::fmt;

use num::{BigInt, One, Zero};

use crate::derivation::Derivation;
use crate::poly::{Polynomial, Q};

/// A syntax or scope error with a one-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
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
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer '{v}'"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '~'
}

fn lex(input: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let value: BigInt = digits.parse().expect("ascii digits");
            out.push((Tok::Int(value), pos));
            continue;
        }
        if is_ident_start(c) {
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if is_ident_continue(d) {
                    name.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(name), pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            other => return Err(err(pos, format!("unexpected character '{other}'"))),
        };
        chars.next();
        column += 1;
        out.push((tok, pos));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    names: &'a [String],
    end: Pos,
}

impl<'a> Parser<'a> {
    fn new(input: &str, names: &'a [String]) -> Result<Self, ParseError> {
        let toks = lex(input)?;
        let end = toks
            .last()
            .map(|&(_, p)| Pos {
                line: p.line,
                column: p.column + 1,
            })
            .unwrap_or(Pos { line: 1, column: 1 });
        Ok(Parser {
            toks,
            at: 0,
            names,
            end,
        })
    }

    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(err(
                self.pos(),
                format!("unexpected {} after the expression", t.describe()),
            )),
        }
    }

    fn variable(&self, name: &str, pos: Pos) -> Result<Polynomial, ParseError> {
        match self.names.iter().position(|n| n == name) {
            Some(i) => Ok(Polynomial::var(self.nvars(), i).expect("index in range")),
            None => Err(err(pos, format!("unknown variable '{name}'"))),
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(v)) => u32::try_from(&v)
                .map_err(|_| err(pos, format!("exponent '{v}' is out of range"))),
            Some(t) => Err(err(pos, format!("expected an exponent, found {}", t.describe()))),
            None => Err(err(pos, "expected an exponent at the end of input")),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(numerator)) => {
                if self.eat(&Tok::Slash) {
                    let dpos = self.pos();
                    match self.bump() {
                        Some(Tok::Int(denominator)) => {
                            if denominator.is_zero() {
                                return Err(err(dpos, "zero denominator"));
                            }
                            Ok(Polynomial::constant(
                                self.nvars(),
                                Q::new(numerator, denominator),
                            ))
                        }
                        Some(t) => Err(err(
                            dpos,
                            format!(
                                "'/' needs an integer denominator, found {}",
                                t.describe()
                            ),
                        )),
                        None => Err(err(dpos, "'/' needs an integer denominator")),
                    }
                } else {
                    Ok(Polynomial::constant(self.nvars(), Q::from_integer(numerator)))
                }
            }
            Some(Tok::Ident(name)) => self.variable(&name, pos),
            Some(Tok::LParen) => {
                let inner = self.polynomial()?;
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    Err(err(self.pos(), "expected ')'"))
                }
            }
            Some(t) => Err(err(
                pos,
                format!("expected a polynomial, found {}", t.describe()),
            )),
            None => Err(err(pos, "expected a polynomial, found end of input")),
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let e = self.exponent()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn polynomial(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    /// `d` `/` `d<var>` when the next tokens form a partial.
    fn try_partial(&mut self) -> Result<Option<usize>, ParseError> {
        let (matches_shape, pos) = match (self.toks.get(self.at), self.toks.get(self.at + 1)) {
            (Some((Tok::Ident(d), p)), Some((Tok::Slash, _))) if d == "d" => (true, *p),
            _ => (false, self.pos()),
        };
        if !matches_shape {
            return Ok(None);
        }
        let name_tok = self.toks.get(self.at + 2).cloned();
        match name_tok {
            Some((Tok::Ident(dname), npos)) if dname.starts_with('d') && dname.len() > 1 => {
                let var = &dname[1..];
                match self.names.iter().position(|n| n == var) {
                    Some(i) => {
                        self.at += 3;
                        Ok(Some(i))
                    }
                    None => Err(err(npos, format!("unknown variable '{var}' in partial"))),
                }
            }
            _ => Err(err(
                pos,
                "expected 'd/d<variable>' (the identifier 'd' is reserved)",
            )),
        }
    }

    fn derivation_term(&mut self) -> Result<(usize, Polynomial), ParseError> {
        let pos = self.pos();
        let mut sign = Q::one();
        while self.eat(&Tok::Minus) {
            sign = -sign;
        }
        let mut coefficient = Polynomial::constant(self.nvars(), sign);
        let mut partial: Option<usize> = None;
        loop {
            if let Some(var) = self.try_partial()? {
                if partial.is_some() {
                    return Err(err(self.pos(), "two partials in one term"));
                }
                partial = Some(var);
            } else {
                coefficient = &coefficient * &self.factor()?;
            }
            if !self.eat(&Tok::Star) {
                break;
            }
        }
        match partial {
            Some(var) => Ok((var, coefficient)),
            None => Err(err(pos, "a derivation term needs exactly one 'd/d<variable>'")),
        }
    }

    fn derivation(&mut self) -> Result<Derivation, ParseError> {
        let n = self.nvars();
        let mut coeffs = vec![Polynomial::zero(n); n];
        let (var, coefficient) = self.derivation_term()?;
        coeffs[var] = &coeffs[var] + &coefficient;
        loop {
            if self.eat(&Tok::Plus) {
                let (var, coefficient) = self.derivation_term()?;
                coeffs[var] = &coeffs[var] + &coefficient;
            } else if self.eat(&Tok::Minus) {
                let (var, coefficient) = self.derivation_term()?;
                coeffs[var] = &coeffs[var] - &coefficient;
            } else {
                break;
            }
        }
        Ok(Derivation::new(coeffs).expect("uniform context by construction"))
    }
}

/// Parses one polynomial over the named variables.
pub fn parse_polynomial(input: &str, names: &[String]) -> Result<Polynomial, ParseError> {
    let mut p = Parser::new(input, names)?;
    let poly = p.polynomial()?;
    p.expect_end()?;
    Ok(poly)
}

/// Parses a comma-separated list of polynomials.
pub fn parse_polynomial_list(input: &str, names: &[String]) -> Result<Vec<Polynomial>, ParseError> {
    let mut p = Parser::new(input, names)?;
    let mut out = vec![p.polynomial()?];
    while p.eat(&Tok::Comma) {
        out.push(p.polynomial()?);
    }
    p.expect_end()?;
    Ok(out)
}

/// Parses one derivation over the named variables.
pub fn parse_derivation(input: &str, names: &[String]) -> Result<Derivation, ParseError> {
    let mut p = Parser::new(input, names)?;
    let d = p.derivation()?;
    p.expect_end()?;
    Ok(d)
}

/// Parses a comma-separated list of derivations.
pub fn parse_derivation_list(input: &str, names: &[String]) -> Result<Vec<Derivation>, ParseError> {
    let mut p = Parser::new(input, names)?;
    let mut out = vec![p.derivation()?];
    while p.eat(&Tok::Comma) {
        out.push(p.derivation()?);
    }
    p.expect_end()?;
    Ok(out)
}
