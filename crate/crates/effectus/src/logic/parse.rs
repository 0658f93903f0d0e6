//! Formula syntax.
//!
//! ```text
//! φ ::= {n} | A -> P | and[φ, …] | or[φ, …] | not(φ) | (φ)
//! A ::= φ | (φ, …) | () | [w, …]
//! ```

use super::Formula;
use crate::syntax::lexer::{ParseError, Tok};
use crate::syntax::parse::Parser;

impl Parser {
    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        let head = self.formula_head()?;
        match head {
            Head::Single(f) if *self.peek() != Tok::Arrow => Ok(f),
            Head::Single(f) => {
                self.bump();
                Ok(Formula::ArrowF(vec![f], self.observation()?))
            }
            Head::Tuple(fs) => {
                self.expect(Tok::Arrow)?;
                Ok(Formula::ArrowF(fs, self.observation()?))
            }
            Head::Values(ws) => {
                self.expect(Tok::Arrow)?;
                Ok(Formula::ArrowV(ws, self.observation()?))
            }
        }
    }

    fn formula_list(&mut self, close: Tok) -> Result<Vec<Formula>, ParseError> {
        let mut fs = Vec::new();
        if *self.peek() != close {
            loop {
                fs.push(self.formula()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(close)?;
        Ok(fs)
    }

    fn formula_head(&mut self) -> Result<Head, ParseError> {
        match self.peek().clone() {
            Tok::LBrace => {
                self.bump();
                let n = self.number()?;
                self.expect(Tok::RBrace)?;
                Ok(Head::Single(Formula::NatIs(n)))
            }
            Tok::LParen => {
                self.bump();
                let mut fs = self.formula_list(Tok::RParen)?;
                if fs.len() == 1 && *self.peek() != Tok::Arrow {
                    Ok(Head::Single(fs.remove(0)))
                } else {
                    Ok(Head::Tuple(fs))
                }
            }
            Tok::LBracket => {
                self.bump();
                let mut ws = Vec::new();
                if *self.peek() != Tok::RBracket {
                    loop {
                        ws.push(self.ecps_value()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(Head::Values(ws))
            }
            Tok::Ident(w) if w == "and" || w == "or" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let fs = self.formula_list(Tok::RBracket)?;
                Ok(Head::Single(if w == "and" { Formula::And(fs) } else { Formula::Or(fs) }))
            }
            Tok::Ident(w) if w == "not" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(Head::Single(Formula::Not(Box::new(f))))
            }
            t => self.error(format!("expected a formula, found {t}")),
        }
    }
}

enum Head {
    Single(Formula),
    Tuple(Vec<Formula>),
    Values(Vec<crate::syntax::ecps::Value>),
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}
