//! Recursive-descent parser for the formula text format.
//!
//! ```text
//! expr  := 'T' | 'x' '<=' NUM | 'sym' ':' NAME | '!' expr
//!        | 'F' '[' '<=' NUM ']' expr | 'G' '[' '<=' NUM ']' expr
//!        | '(' expr ')' | '(' expr ('&' | '|' | '->') expr ')'
//! ```
//!
//! Whitespace is allowed between any two tokens.

use thiserror::Error;

use crate::formula::{AtomicPredicate, Formula, Symbol};

const MAX_NESTING: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax {
        offset: usize,
        expected: &'static str,
    },
    #[error("integer literal at byte {offset} does not fit in 32 bits")]
    Overflow { offset: usize },
    #[error("formula nested deeper than {MAX_NESTING} levels at byte {offset}")]
    TooDeep { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Overflow { offset }
            | ParseError::TooDeep { offset } => *offset,
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &'static str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            expected,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &'static str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(token))
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("non-negative integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits
            .parse::<u32>()
            .map_err(|_| ParseError::Overflow { offset: start })
    }

    fn name(&mut self) -> Result<Symbol, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("symbol name"));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii name");
        Ok(Symbol::new(name))
    }

    fn bound(&mut self) -> Result<u32, ParseError> {
        self.expect("[")?;
        self.expect("<=")?;
        let n = self.number()?;
        self.expect("]")?;
        Ok(n)
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::TooDeep { offset: self.pos });
        }
        let out = self.expr_inner();
        self.depth -= 1;
        out
    }

    fn expr_inner(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(b'x') => {
                self.pos += 1;
                self.expect("<=")?;
                let v = self.number()?;
                Ok(Formula::Atom(AtomicPredicate::Threshold(v)))
            }
            Some(b's') => {
                self.expect("sym")?;
                self.expect(":")?;
                let name = self.name()?;
                Ok(Formula::Atom(AtomicPredicate::Label(name)))
            }
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::not(self.expr()?))
            }
            Some(b'F') => {
                self.pos += 1;
                let t = self.bound()?;
                Ok(Formula::eventually(t, self.expr()?))
            }
            Some(b'G') => {
                self.pos += 1;
                let t = self.bound()?;
                Ok(Formula::always(t, self.expr()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let lhs = self.expr()?;
                let out = if self.eat("&") {
                    Formula::and(lhs, self.expr()?)
                } else if self.eat("|") {
                    Formula::or(lhs, self.expr()?)
                } else if self.eat("->") {
                    Formula::implies(lhs, self.expr()?)
                } else {
                    lhs
                };
                self.expect(")")?;
                Ok(out)
            }
            _ => Err(self.error("formula")),
        }
    }
}
