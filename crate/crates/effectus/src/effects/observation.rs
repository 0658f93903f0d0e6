//! Text syntax of observations and families.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{IoEvent, Observation, ObservationFamily, State};
use crate::syntax::lexer::{ParseError, Tok};
use crate::syntax::parse::Parser;

impl fmt::Display for IoEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoEvent::In(n) => write!(f, "?{n}"),
            IoEvent::Out(n) => write!(f, "!{n}"),
        }
    }
}

fn write_state(f: &mut fmt::Formatter<'_>, s: &State) -> fmt::Result {
    write!(f, "{{")?;
    for (i, (l, v)) in s.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{l}:{v}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Terminate => write!(f, "terminates"),
            Observation::AllTrees => write!(f, "all"),
            Observation::May => write!(f, "diamond"),
            Observation::Must => write!(f, "box"),
            Observation::ProbGt(q) => write!(f, "prob> {q}"),
            Observation::StoreStep(s, r) => {
                write!(f, "store ")?;
                write_state(f, s)?;
                write!(f, " ~> ")?;
                write_state(f, r)
            }
            Observation::Trace(w) => {
                write!(f, "trace")?;
                for e in w {
                    write!(f, " {e}")?;
                }
                Ok(())
            }
        }
    }
}

fn state(p: &mut Parser) -> Result<State, ParseError> {
    p.expect(Tok::LBrace)?;
    let mut s = State::new();
    if *p.peek() != Tok::RBrace {
        loop {
            let l = p.ident()?;
            p.expect(Tok::Colon)?;
            let v = p.number()?;
            s.insert(l, v);
            if *p.peek() == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect(Tok::RBrace)?;
    Ok(s)
}

impl Parser {
    pub fn observation(&mut self) -> Result<Observation, ParseError> {
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            t => return self.error(format!("expected an observation, found {t}")),
        };
        self.bump();
        Ok(match word.as_str() {
            "terminates" => Observation::Terminate,
            "all" => Observation::AllTrees,
            "diamond" => Observation::May,
            "box" => Observation::Must,
            "prob" => {
                self.expect(Tok::Gt)?;
                let num = self.number()?;
                let den = if *self.peek() == Tok::Slash {
                    self.bump();
                    self.number()?
                } else {
                    1
                };
                if den == 0 || num >= den {
                    return self.error("a probability threshold must lie in [0, 1)");
                }
                Observation::ProbGt(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            "store" => {
                let s = state(self)?;
                self.expect(Tok::LeadsTo)?;
                let r = state(self)?;
                Observation::StoreStep(s, r)
            }
            "trace" => {
                let mut w = Vec::new();
                loop {
                    match self.peek() {
                        Tok::Question => {
                            self.bump();
                            w.push(IoEvent::In(self.number()?));
                        }
                        Tok::Bang => {
                            self.bump();
                            w.push(IoEvent::Out(self.number()?));
                        }
                        _ => break,
                    }
                }
                Observation::Trace(w)
            }
            other => return self.error(format!("unknown observation `{other}`")),
        })
    }
}

pub fn parse_observation(src: &str) -> Result<Observation, ParseError> {
    let mut p = Parser::new(src)?;
    let o = p.observation()?;
    p.expect_eof()?;
    Ok(o)
}

/// Parses `pure`, `nondet`, `prob`, `io`, or `store l0 l1 …`.
pub fn parse_family(src: &str, value_range: u64) -> Result<ObservationFamily, String> {
    let mut words = src.split_whitespace();
    let fam = match words.next() {
        Some("pure") => ObservationFamily::Pure,
        Some("nondet") => ObservationFamily::Nondet,
        Some("prob") => ObservationFamily::Prob,
        Some("io") => ObservationFamily::Io,
        Some("store") => {
            let locations: Vec<String> = words.by_ref().map(str::to_string).collect();
            if locations.is_empty() {
                return Err("a store family needs at least one location".into());
            }
            if value_range == 0 {
                return Err("the value range must be at least 1".into());
            }
            return Ok(ObservationFamily::Store { locations, value_range });
        }
        Some(other) => return Err(format!("unknown effect family `{other}`")),
        None => return Err("missing effect family".into()),
    };
    match words.next() {
        None => Ok(fam),
        Some(extra) => Err(format!("unexpected `{extra}` after the family name")),
    }
}
