//! Parser for rational-function expressions in the variable `y`.
//!
//! Grammar: `+ - * / ^` with the usual precedence, parentheses, integer
//! literals, and `y`; exponents are integers (negative allowed). `1/2` is
//! ordinary division, so rationals need no special syntax.

use num_bigint::BigInt;

use crate::ratfunc::RatFunc;
use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut out = vec![];
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            'y' => {
                out.push(Token::Y);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                let n: BigInt = digits.parse().expect("digits parse");
                out.push(Token::Num(n));
            }
            _ => {
                return Err(Error::Parse {
                    what: "rational function".into(),
                    input: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            what: "rational function".into(),
            input: format!("{msg} at token {}", self.pos),
        })
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    acc = acc.try_div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(&RatFunc::zero() - &self.factor()?);
        }
        let base = match self.bump() {
            Some(Token::Num(n)) => RatFunc::from_rational(Rational::from_integer(n)),
            Some(Token::Y) => RatFunc::y(),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                if !matches!(self.bump(), Some(Token::RParen)) {
                    return self.fail("expected closing parenthesis");
                }
                inner
            }
            _ => return self.fail("expected a number, y, or parenthesized expression"),
        };
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            let negative = if matches!(self.peek(), Some(Token::Minus)) {
                self.bump();
                true
            } else {
                false
            };
            let Some(Token::Num(e)) = self.bump() else {
                return self.fail("expected an integer exponent");
            };
            let e: u32 = e
                .try_into()
                .map_err(|_| Error::Parse {
                    what: "rational function".into(),
                    input: "exponent too large".into(),
                })?;
            let p = base.pow(e);
            return if negative { p.inverse() } else { Ok(p) };
        }
        Ok(base)
    }
}

/// Parses an expression like `(36*y^2 - 41*y + 32)/(36*y^2*(y-1)^2)`.
pub fn parse_ratfunc(input: &str) -> Result<RatFunc> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(Error::Parse { what: "rational function".into(), input: "empty".into() });
    }
    let mut p = Parser { tokens, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.fail("trailing input");
    }
    Ok(out)
}
