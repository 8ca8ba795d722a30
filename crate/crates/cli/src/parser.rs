//! Statement-oriented parser for session scripts.
//!
//! Scripts are UTF-8 text; `#` starts a comment; statements end at a
//! newline or `;`. The parser resolves every embedded polynomial and
//! derivation against the variable names in scope, tracks how blowups and
//! rebases rename variables, and rejects undeclared identifiers with a
//! positioned error.

use crate::ast::{ChangeMode, LocatedStatement, RingTag, SessionScript, Statement};
use foliation_core::text::{parse_derivation_list, parse_polynomial_list};
use std::collections::BTreeSet;
use std::fmt;

/// A positioned session-script error (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SessionError {}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, SessionError> {
    Err(SessionError {
        line,
        column,
        message: message.into(),
    })
}

/// One token of a statement, with its 1-based column.
#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Eq,
}

fn tokenize(text: &str, line: usize, col_offset: usize) -> Result<Vec<(Tok, usize)>, SessionError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col_offset + i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '=' {
            out.push((Tok::Eq, col));
            i += 1;
        } else if c == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' {
                j += 1;
            }
            if j == chars.len() {
                return err(line, col, "unterminated string literal");
            }
            out.push((Tok::Quoted(chars[start..j].iter().collect()), col));
            i = j + 1;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '=' && chars[i] != '"'
            {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), col_offset + start + 1));
        }
    }
    Ok(out)
}

/// Splits raw script text into statement chunks with their (line, column)
/// start, honoring comments and quoted strings.
fn split_statements(text: &str) -> Vec<(String, usize, usize)> {
    let mut chunks = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let mut in_quotes = false;
        let mut current = String::new();
        let mut start_col = 1;
        let mut col = 0;
        for c in raw_line.chars() {
            col += 1;
            if c == '"' {
                in_quotes = !in_quotes;
                current.push(c);
            } else if c == '#' && !in_quotes {
                break;
            } else if c == ';' && !in_quotes {
                if !current.trim().is_empty() {
                    chunks.push((current.clone(), lineno + 1, start_col));
                }
                current.clear();
                start_col = col + 1;
            } else {
                current.push(c);
            }
        }
        if !current.trim().is_empty() {
            chunks.push((current, lineno + 1, start_col));
        }
    }
    chunks
}

/// Key/value arguments after a statement keyword.
struct Args {
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Args {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let pos = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, value, col) = self.entries.remove(pos);
        Some((value, col))
    }

    fn require(&mut self, key: &str, keyword_col: usize) -> Result<(String, usize), SessionError> {
        match self.take(key) {
            Some(found) => Ok(found),
            None => err(self.line, keyword_col, format!("missing required argument '{key}='")),
        }
    }

    fn finish(self) -> Result<(), SessionError> {
        if let Some((k, _, col)) = self.entries.into_iter().next() {
            return err(self.line, col, format!("unexpected argument '{k}='"));
        }
        Ok(())
    }
}

fn parse_args(
    toks: &[(Tok, usize)],
    line: usize,
) -> Result<Args, SessionError> {
    let mut entries = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let (key, key_col) = match &toks[i] {
            (Tok::Word(w), c) => (w.clone(), *c),
            (Tok::Quoted(_), c) => return err(line, *c, "expected an argument name"),
            (Tok::Eq, c) => return err(line, *c, "expected an argument name before '='"),
        };
        match toks.get(i + 1) {
            Some((Tok::Eq, _)) => {}
            _ => return err(line, key_col, format!("expected '=' after '{key}'")),
        }
        let value = match toks.get(i + 2) {
            Some((Tok::Word(w), _)) => w.clone(),
            Some((Tok::Quoted(s), _)) => s.clone(),
            _ => return err(line, key_col, format!("missing value for '{key}='")),
        };
        if entries.iter().any(|(k, _, _): &(String, String, usize)| *k == key) {
            return err(line, key_col, format!("duplicate argument '{key}='"));
        }
        entries.push((key, value, key_col));
        i += 3;
    }
    Ok(Args { line, entries })
}

fn split_names(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_bool(value: &str, line: usize, col: usize) -> Result<bool, SessionError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => err(line, col, format!("expected true or false, found '{other}'")),
    }
}

/// Static scope the parser threads through the script: current variable
/// names and the declared distribution/ideal names.
struct Scope {
    names: Vec<String>,
    ring: Option<RingTag>,
    distribution: Option<String>,
    ideals: BTreeSet<String>,
    geometry_started: bool,
}

impl Scope {
    fn resolve_vars(
        &self,
        listed: &[String],
        line: usize,
        col: usize,
    ) -> Result<Vec<String>, SessionError> {
        if listed.is_empty() {
            return err(line, col, "empty variable list");
        }
        for v in listed {
            if !self.names.contains(v) {
                return err(line, col, format!("undeclared variable '{v}'"));
            }
        }
        let mut seen = BTreeSet::new();
        for v in listed {
            if !seen.insert(v) {
                return err(line, col, format!("variable '{v}' listed twice"));
            }
        }
        Ok(listed.to_vec())
    }

    fn check_new_names(
        &self,
        names: &[String],
        line: usize,
        col: usize,
    ) -> Result<(), SessionError> {
        if names.len() != self.names.len() {
            return err(
                line,
                col,
                format!("expected {} variable names, found {}", self.names.len(), names.len()),
            );
        }
        let mut seen = BTreeSet::new();
        for n in names {
            if n.is_empty() {
                return err(line, col, "empty variable name");
            }
            if !seen.insert(n) {
                return err(line, col, format!("duplicate variable name '{n}'"));
            }
        }
        Ok(())
    }

    fn require_ideal(&self, name: &str, line: usize, col: usize) -> Result<(), SessionError> {
        if self.ideals.contains(name) {
            Ok(())
        } else {
            err(line, col, format!("undeclared ideal '{name}'"))
        }
    }
}

/// Remaps a text-syntax error from inside a quoted payload onto the
/// statement's position, keeping the inner location in the message.
fn payload_error(inner: foliation_core::text::ParseError, line: usize, col: usize, what: &str) -> SessionError {
    SessionError {
        line,
        column: col,
        message: format!("in {what}: {inner}"),
    }
}

/// Parses a whole session script, validating scope and dimension statically.
pub fn parse_session(text: &str) -> Result<SessionScript, SessionError> {
    let chunks = split_statements(text);
    let mut statements = Vec::new();
    let mut scope = Scope {
        names: Vec::new(),
        ring: None,
        distribution: None,
        ideals: BTreeSet::new(),
        geometry_started: false,
    };

    for (chunk, line, col0) in chunks {
        let toks = tokenize(&chunk, line, col0 - 1)?;
        let (keyword, kcol) = match toks.first() {
            Some((Tok::Word(w), c)) => (w.clone(), *c),
            Some((_, c)) => return err(line, *c, "expected a statement keyword"),
            None => continue,
        };
        let rest = &toks[1..];

        if scope.ring.is_none() && keyword != "space" {
            return err(line, kcol, "the first statement must be 'space'");
        }

        // Payloads (map entries, generator lists) always live in the chart
        // BEFORE the statement runs, so canonical printing needs these names
        // even when the statement itself renames variables.
        let names_before = scope.names.clone();

        let statement = match keyword.as_str() {
            "space" => {
                if scope.ring.is_some() {
                    return err(line, kcol, "duplicate 'space' statement");
                }
                // space <n> vars <name>... ring <Z|Q>
                let mut words = Vec::new();
                for (t, c) in rest {
                    match t {
                        Tok::Word(w) => words.push((w.clone(), *c)),
                        _ => return err(line, *c, "unexpected token in 'space' statement"),
                    }
                }
                if words.len() < 4 {
                    return err(line, kcol, "usage: space <n> vars <names...> ring <Z|Q>");
                }
                let dimension: usize = words[0].0.parse().map_err(|_| SessionError {
                    line,
                    column: words[0].1,
                    message: format!("expected a dimension, found '{}'", words[0].0),
                })?;
                if words[1].0 != "vars" {
                    return err(line, words[1].1, "expected 'vars'");
                }
                let ring_pos = words
                    .iter()
                    .position(|(w, _)| w == "ring")
                    .ok_or_else(|| SessionError {
                        line,
                        column: kcol,
                        message: "missing 'ring' in 'space' statement".into(),
                    })?;
                let names: Vec<String> = words[2..ring_pos].iter().map(|(w, _)| w.clone()).collect();
                if names.len() != dimension {
                    return err(
                        line,
                        words[0].1,
                        format!("declared dimension {dimension} but {} variable names", names.len()),
                    );
                }
                let mut seen = BTreeSet::new();
                for (i, n) in names.iter().enumerate() {
                    if !seen.insert(n) {
                        return err(line, words[2 + i].1, format!("duplicate variable name '{n}'"));
                    }
                }
                if ring_pos + 2 != words.len() {
                    return err(line, kcol, "usage: space <n> vars <names...> ring <Z|Q>");
                }
                let (ring_word, ring_col) = &words[ring_pos + 1];
                let ring = match ring_word.as_str() {
                    "Z" => RingTag::Integers,
                    "Q" => RingTag::Rationals,
                    other => return err(line, *ring_col, format!("unknown ring '{other}' (expected Z or Q)")),
                };
                scope.names = names.clone();
                scope.ring = Some(ring);
                Statement::Space {
                    dimension,
                    names,
                    ring,
                }
            }
            "distribution" => {
                if scope.distribution.is_some() {
                    return err(line, kcol, "duplicate 'distribution' statement");
                }
                let (name, gens_text, text_col) = parse_decl(rest, line, kcol)?;
                let generators = parse_derivation_list(&gens_text, &scope.names)
                    .map_err(|e| payload_error(e, line, text_col, "distribution generators"))?;
                if generators.is_empty() {
                    return err(line, text_col, "a distribution needs at least one generator");
                }
                scope.distribution = Some(name.clone());
                Statement::Distribution { name, generators }
            }
            "ideal" => {
                let (name, gens_text, text_col) = parse_decl(rest, line, kcol)?;
                if scope.ideals.contains(&name) || scope.distribution.as_deref() == Some(&name) {
                    return err(line, kcol, format!("name '{name}' is already declared"));
                }
                let generators = parse_polynomial_list(&gens_text, &scope.names)
                    .map_err(|e| payload_error(e, line, text_col, "ideal generators"))?;
                scope.ideals.insert(name.clone());
                Statement::IdealDecl { name, generators }
            }
            "divisor" => {
                if scope.geometry_started {
                    return err(line, kcol, "divisors must be declared before any tower statement");
                }
                let (variable, vcol) = match rest {
                    [(Tok::Word(w), c)] => (w.clone(), *c),
                    _ => return err(line, kcol, "usage: divisor <variable>"),
                };
                scope.resolve_vars(&[variable.clone()], line, vcol)?;
                Statement::Divisor { variable }
            }
            "check-admissible" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let (center_text, ccol) = args.require("center", kcol)?;
                args.finish()?;
                let center = scope.resolve_vars(&split_names(&center_text), line, ccol)?;
                scope.geometry_started = true;
                Statement::CheckAdmissible { center }
            }
            "blowup" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let (center_text, ccol) = args.require("center", kcol)?;
                let (chart, chart_col) = args.require("chart", kcol)?;
                let names_arg = args.take("names");
                args.finish()?;
                let center = scope.resolve_vars(&split_names(&center_text), line, ccol)?;
                if !center.contains(&chart) {
                    return err(
                        line,
                        chart_col,
                        format!("chart variable '{chart}' is not one of the center variables"),
                    );
                }
                let names = match names_arg {
                    Some((text, ncol)) => {
                        let list = split_names(&text);
                        scope.check_new_names(&list, line, ncol)?;
                        Some(list)
                    }
                    None => None,
                };
                scope.geometry_started = true;
                let statement = Statement::Blowup {
                    center,
                    chart,
                    names: names.clone(),
                };
                // Scope names evolve: override, or a prime appended to each.
                scope.names = match names {
                    Some(list) => list,
                    None => scope.names.iter().map(|s| format!("{s}'")).collect(),
                };
                statement
            }
            "linear-change" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let (map_text, mcol) = args.require("map", kcol)?;
                let (names_text, ncol) = args.require("names", kcol)?;
                let (mode_text, mode_col) = args.require("mode", kcol)?;
                args.finish()?;
                let map = parse_polynomial_list(&map_text, &scope.names)
                    .map_err(|e| payload_error(e, line, mcol, "change map"))?;
                if map.len() != scope.names.len() {
                    return err(
                        line,
                        mcol,
                        format!("expected {} map entries, found {}", scope.names.len(), map.len()),
                    );
                }
                for (k, entry) in map.iter().enumerate() {
                    let (_, _, higher) = entry.linear_decomposition();
                    if higher {
                        return err(line, mcol, format!("map entry {} is not affine-linear", k + 1));
                    }
                }
                let new_names = split_names(&names_text);
                scope.check_new_names(&new_names, line, ncol)?;
                let mode = match mode_text.as_str() {
                    "view" => ChangeMode::View,
                    "rebase" => ChangeMode::Rebase,
                    other => {
                        return err(line, mode_col, format!("unknown mode '{other}' (expected view or rebase)"))
                    }
                };
                scope.geometry_started = true;
                if mode == ChangeMode::Rebase {
                    scope.names = new_names.clone();
                }
                Statement::LinearChange {
                    map,
                    names: new_names,
                    mode,
                }
            }
            "assert-monomial" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let of = match args.take("of") {
                    Some((name, ocol)) => {
                        if scope.distribution.as_deref() != Some(name.as_str()) {
                            return err(line, ocol, format!("undeclared distribution '{name}'"));
                        }
                        Some(name)
                    }
                    None => None,
                };
                let expect = match args.take("expect") {
                    Some((v, vcol)) => parse_bool(&v, line, vcol)?,
                    None => true,
                };
                args.finish()?;
                scope.geometry_started = true;
                Statement::AssertMonomial { of, expect }
            }
            "assert-invariant" | "assert-unit" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let (of, ocol) = args.require("of", kcol)?;
                scope.require_ideal(&of, line, ocol)?;
                let expect = match args.take("expect") {
                    Some((v, vcol)) => parse_bool(&v, line, vcol)?,
                    None => true,
                };
                args.finish()?;
                scope.geometry_started = true;
                if keyword == "assert-invariant" {
                    Statement::AssertInvariant { of, expect }
                } else {
                    Statement::AssertUnit { of, expect }
                }
            }
            "chain" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let (of, ocol) = args.require("of", kcol)?;
                scope.require_ideal(&of, line, ocol)?;
                let steps = match args.take("steps") {
                    Some((v, vcol)) => v.parse().map_err(|_| SessionError {
                        line,
                        column: vcol,
                        message: format!("expected a step count, found '{v}'"),
                    })?,
                    None => 8,
                };
                args.finish()?;
                scope.geometry_started = true;
                Statement::Chain { of, steps }
            }
            "report" => {
                require_distribution(&scope, line, kcol)?;
                parse_args(rest, line)?.finish()?;
                scope.geometry_started = true;
                Statement::Report
            }
            "suggest-center" => {
                require_distribution(&scope, line, kcol)?;
                let mut args = parse_args(rest, line)?;
                let (of, ocol) = args.require("of", kcol)?;
                scope.require_ideal(&of, line, ocol)?;
                args.finish()?;
                scope.geometry_started = true;
                Statement::SuggestCenter { of }
            }
            other => return err(line, kcol, format!("unknown statement '{other}'")),
        };

        let scope_names = if matches!(statement, Statement::Space { .. }) {
            scope.names.clone()
        } else {
            names_before
        };
        statements.push(LocatedStatement {
            statement,
            line,
            scope_names,
        });
    }

    Ok(SessionScript { statements })
}

fn require_distribution(scope: &Scope, line: usize, col: usize) -> Result<(), SessionError> {
    if scope.distribution.is_none() {
        return err(line, col, "a 'distribution' statement is required first");
    }
    Ok(())
}

/// Parses `<name> gens "<payload>"`, returning the payload's column.
fn parse_decl(
    rest: &[(Tok, usize)],
    line: usize,
    kcol: usize,
) -> Result<(String, String, usize), SessionError> {
    match rest {
        [(Tok::Word(name), _), (Tok::Word(kw), kwc), (Tok::Quoted(text), tc)] => {
            if kw != "gens" {
                return err(line, *kwc, "expected 'gens'");
            }
            Ok((name.clone(), text.clone(), *tc))
        }
        _ => err(line, kcol, "usage: <keyword> <name> gens \"...\""),
    }
}
