//! Recursive-descent parser for concepts, assertions, GCIs and whole
//! knowledge-base files.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! statement := concept "[=" concept [">=" number]      GCI, optionally fuzzy
//!            | IDENT ":" concept cmp number            ABox concept assertion
//!            | IDENT "(" IDENT "," IDENT ")" cmp number  ABox role assertion
//!            | concept cmp number                     query assertion
//! concept   := conj ("|" conj)*
//! conj      := shift ("&" shift)*
//! shift     := unary (("(-)" | "(+)") number)*
//! unary     := "!" unary | ("some" | "all") IDENT "." unary | primary
//! primary   := IDENT | number | "(" concept ")"
//! cmp       := ">=" | ">" | "<=" | "<"
//! ```
//!
//! Numbers are `a`, `a/b` or decimals and are converted exactly. `#` starts a
//! comment that runs to the end of the line; statements are one per line.

use std::sync::Arc;

use thiserror::Error;

use crate::grid::rewrite_fuzzy_gci;
use crate::rational::Rational;
use crate::syntax::cmp::CmpOp;
use crate::syntax::concept::{
    Concept, ConceptAssertion, Gci, IndividualAssertion, Kb, RoleAssertion,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Not,
    And,
    Or,
    ShiftMinus,
    ShiftPlus,
    LParen,
    RParen,
    Dot,
    Colon,
    Comma,
    Some,
    All,
    Sub,
    Cmp(CmpOp),
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::ShiftMinus => "`(-)`".into(),
            Tok::ShiftPlus => "`(+)`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Some => "`some`".into(),
            Tok::All => "`all`".into(),
            Tok::Sub => "`[=`".into(),
            Tok::Cmp(op) => format!("`{op}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            *i += len;
            *col += len;
        };
        let next = |k: usize| chars.get(i + k).copied();
        match c {
            '\n' => {
                out.push(Spanned {
                    tok: Tok::Newline,
                    line,
                    column: col,
                });
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '(' => {
                if next(1) == Some('-') && next(2) == Some(')') {
                    push(Tok::ShiftMinus, 3, &mut i, &mut col)
                } else if next(1) == Some('+') && next(2) == Some(')') {
                    push(Tok::ShiftPlus, 3, &mut i, &mut col)
                } else {
                    push(Tok::LParen, 1, &mut i, &mut col)
                }
            }
            '[' => {
                if next(1) == Some('=') {
                    push(Tok::Sub, 2, &mut i, &mut col)
                } else {
                    return Err(err(line, col, "expected `[=`".into()));
                }
            }
            '>' | '<' => {
                let strict = next(1) != Some('=');
                let op = match (c, strict) {
                    ('>', true) => CmpOp::Gt,
                    ('>', false) => CmpOp::Ge,
                    ('<', true) => CmpOp::Lt,
                    _ => CmpOp::Le,
                };
                push(Tok::Cmp(op), if strict { 1 } else { 2 }, &mut i, &mut col)
            }
            '.' if !next(1).is_some_and(|d| d.is_ascii_digit()) => {
                push(Tok::Dot, 1, &mut i, &mut col)
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                let mut j = i;
                if chars[j] == '-' {
                    j += 1;
                }
                while j < chars.len()
                    && (chars[j].is_ascii_digit() || chars[j] == '.' || chars[j] == '/')
                {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                if text == "-" {
                    return Err(err(line, col, "unexpected `-`".into()));
                }
                let len = j - start;
                push(Tok::Number(text), len, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                let tok = match text.as_str() {
                    "some" => Tok::Some,
                    "all" => Tok::All,
                    _ => Tok::Ident(text),
                };
                let len = j - start;
                push(tok, len, &mut i, &mut col)
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// One parsed line of a knowledge-base file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Gci(Gci),
    Assertion(ConceptAssertion),
    Individual(IndividualAssertion),
    Role(RoleAssertion),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_here(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        match self.peek().clone() {
            Tok::Number(s) => {
                let v = s
                    .parse::<Rational>()
                    .map_err(|e| self.error_here(e.to_string()))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    /// A constant inside a concept; must lie in `[0, 1]`.
    fn unit_constant(&mut self) -> Result<Rational, ParseError> {
        let here = self.error_here("");
        let v = self.number()?;
        if !v.in_unit_interval() {
            return Err(ParseError {
                message: format!("constant {v} outside [0,1]"),
                ..here
            });
        }
        Ok(v)
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            c = c.or(self.conj()?);
        }
        Ok(c)
    }

    fn conj(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.shift()?;
        while *self.peek() == Tok::And {
            self.bump();
            c = c.and(self.shift()?);
        }
        Ok(c)
    }

    fn shift(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.unary()?;
        loop {
            match self.peek() {
                Tok::ShiftMinus => {
                    self.bump();
                    c = c.minus(self.unit_constant()?);
                }
                Tok::ShiftPlus => {
                    self.bump();
                    c = c.plus(self.unit_constant()?);
                }
                _ => return Ok(c),
            }
        }
    }

    fn unary(&mut self) -> Result<Concept, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Some | Tok::All => {
                let existential = *self.peek() == Tok::Some;
                self.bump();
                let role: Arc<str> = self.ident("a role name")?.into();
                self.expect(Tok::Dot, "`.` after the role name")?;
                let body = Arc::new(self.unary()?);
                Ok(if existential {
                    Concept::Exists(role, body)
                } else {
                    Concept::Forall(role, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Concept, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Concept::Atom(name.into()))
            }
            Tok::Number(_) => Ok(Concept::Const(self.unit_constant()?)),
            Tok::LParen => {
                self.bump();
                let c = self.concept()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            _ => Err(self.unexpected("a concept")),
        }
    }

    fn cmp(&mut self) -> Result<CmpOp, ParseError> {
        match *self.peek() {
            Tok::Cmp(op) => {
                self.bump();
                Ok(op)
            }
            _ => Err(self.unexpected("a comparison operator")),
        }
    }

    fn assertion_tail(&mut self, concept: Concept) -> Result<ConceptAssertion, ParseError> {
        let op = self.cmp()?;
        let threshold = self.number()?;
        Ok(ConceptAssertion::new(concept, op, threshold))
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        if let (Tok::Ident(ind), Tok::Colon) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.bump();
            self.bump();
            let c = self.concept()?;
            let assertion = self.assertion_tail(c)?;
            return Ok(Statement::Individual(IndividualAssertion {
                individual: ind.into(),
                assertion,
            }));
        }
        if let (Tok::Ident(role), Tok::LParen) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.bump();
            self.bump();
            let from = self.ident("an individual name")?;
            self.expect(Tok::Comma, "`,`")?;
            let to = self.ident("an individual name")?;
            self.expect(Tok::RParen, "`)`")?;
            let here = self.error_here("");
            let op = self.cmp()?;
            if op.is_less() {
                return Err(ParseError {
                    message: "role assertions must use `>` or `>=`".into(),
                    ..here
                });
            }
            let threshold = self.number()?;
            return Ok(Statement::Role(RoleAssertion {
                role: role.into(),
                from: from.into(),
                to: to.into(),
                op,
                threshold,
            }));
        }
        let lhs = self.concept()?;
        if *self.peek() == Tok::Sub {
            self.bump();
            let rhs = self.concept()?;
            if let Tok::Cmp(op) = *self.peek() {
                let here = self.error_here("");
                self.bump();
                if op != CmpOp::Ge {
                    return Err(ParseError {
                        message: "fuzzy GCIs take the form `C [= D >= p`".into(),
                        ..here
                    });
                }
                let here = self.error_here("");
                let p = self.number()?;
                let gci = rewrite_fuzzy_gci(lhs, rhs, p).map_err(|e| ParseError {
                    message: e.to_string(),
                    ..here
                })?;
                return Ok(Statement::Gci(gci));
            }
            return Ok(Statement::Gci(Gci::new(lhs, rhs)));
        }
        Ok(Statement::Assertion(self.assertion_tail(lhs)?))
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline | Tok::Eof => {
                self.skip_newlines();
                Ok(())
            }
            _ => Err(self.unexpected("end of statement")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_newlines();
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// Parses a single concept (surface syntax is kept; call `desugar` for the
/// core form).
pub fn parse_concept(src: &str) -> Result<Concept, ParseError> {
    let mut p = Parser::new(src)?;
    p.skip_newlines();
    let c = p.concept()?;
    p.finish()?;
    Ok(c)
}

/// Parses `C op c`.
pub fn parse_assertion(src: &str) -> Result<ConceptAssertion, ParseError> {
    let mut p = Parser::new(src)?;
    p.skip_newlines();
    let c = p.concept()?;
    let a = p.assertion_tail(c)?;
    p.finish()?;
    Ok(a)
}

/// Parses `C [= D` or `C [= D >= p`; the fuzzy form is rewritten to a plain
/// GCI.
pub fn parse_gci(src: &str) -> Result<Gci, ParseError> {
    let mut p = Parser::new(src)?;
    p.skip_newlines();
    let here = p.error_here("");
    let s = p.statement()?;
    p.finish()?;
    match s {
        Statement::Gci(g) => Ok(g),
        _ => Err(ParseError {
            message: "expected a GCI".into(),
            ..here
        }),
    }
}

/// Parses a file of statements, one per line.
pub fn parse_statements(src: &str) -> Result<Vec<Statement>, ParseError> {
    let mut p = Parser::new(src)?;
    p.skip_newlines();
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        out.push(p.statement()?);
        p.end_of_statement()?;
    }
    Ok(out)
}

/// Parses a file and sorts its statements into TBox, ABox and query.
pub fn parse_kb(src: &str) -> Result<Kb, ParseError> {
    let mut kb = Kb::default();
    for s in parse_statements(src)? {
        match s {
            Statement::Gci(g) => kb.tbox.gcis.push(g),
            Statement::Assertion(a) => kb.query.push(a),
            Statement::Individual(a) => kb.abox.concept_assertions.push(a),
            Statement::Role(r) => kb.abox.role_assertions.push(r),
        }
    }
    Ok(kb)
}
