//! Recursive-descent parser for both calculi.

use super::lexer::{tokenize, ParseError, Pos, Tok, KEYWORDS};
use super::types::{EcpsType, EpcfType};
use super::{ecps, epcf, Name};

/// Variable names used to mark context holes while parsing `[-]`.
pub const HOLE_VALUE: &str = "[-]v";
pub const HOLE_COMP: &str = "[-]c";

/// Largest numeral literal accepted; numerals are unary in the syntax tree.
pub const MAX_NUMERAL: u64 = 100_000;

/// The computation hole in EPCF: a dummy application headed by the marker.
pub fn epcf_comp_hole() -> epcf::Comp {
    epcf::Comp::App(epcf::Value::Var(HOLE_COMP.into()), epcf::Value::Star)
}

/// The computation hole in ECPS.
pub fn ecps_comp_hole() -> ecps::Comp {
    ecps::Comp::App(ecps::Value::Var(HOLE_COMP.into()), vec![])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lang {
    Epcf,
    Ecps,
}

/// A source file split into its `#` header directives and its body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub lang: Option<Lang>,
    pub effects: Option<String>,
    pub body: String,
}

/// Header lines are blanked rather than removed so that positions reported
/// for the body still match the file.
pub fn split_header(src: &str) -> Result<SourceFile, ParseError> {
    let mut lang = None;
    let mut effects = None;
    let mut body = String::with_capacity(src.len());
    for (i, line) in src.lines().enumerate() {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let mut parts = rest.splitn(2, char::is_whitespace);
            let key = parts.next().unwrap_or("");
            let val = parts.next().unwrap_or("").trim().to_string();
            match key {
                "lang" => {
                    lang = Some(match val.as_str() {
                        "epcf" => Lang::Epcf,
                        "ecps" => Lang::Ecps,
                        other => {
                            return Err(ParseError { line: i + 1, col: 1, message: format!("unknown language `{other}`") })
                        }
                    })
                }
                "effects" => effects = Some(val),
                other => {
                    return Err(ParseError { line: i + 1, col: 1, message: format!("unknown directive `#{other}`") })
                }
            }
            body.push('\n');
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    Ok(SourceFile { lang, effects, body })
}

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    holes: bool,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: tokenize(src)?, idx: 0, holes: false })
    }

    pub fn with_holes(mut self) -> Parser {
        self.holes = true;
        self
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.idx + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.idx].1
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let p = self.pos();
        Err(ParseError { line: p.line, col: p.col, message: message.into() })
    }

    pub fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {t}, found {}", self.peek()))
        }
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    pub fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected an identifier, found {t}")),
        }
    }

    pub fn number(&mut self) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            t => self.error(format!("expected a number, found {t}")),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(format!("unexpected {} after the end of the term", self.peek()))
        }
    }

    fn numeral_checked(&self, n: u64) -> Result<u64, ParseError> {
        if n > MAX_NUMERAL {
            self.error(format!("numeral {n} exceeds the limit {MAX_NUMERAL}"))
        } else {
            Ok(n)
        }
    }

    // ------------------------------------------------------------ types

    pub fn epcf_type(&mut self) -> Result<EpcfType, ParseError> {
        let dom = self.epcf_type_atom()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let cod = self.epcf_type()?;
            Ok(EpcfType::arrow(dom, cod))
        } else {
            Ok(dom)
        }
    }

    fn epcf_type_atom(&mut self) -> Result<EpcfType, ParseError> {
        if self.eat_kw("unit") {
            return Ok(EpcfType::Unit);
        }
        if self.eat_kw("nat") {
            return Ok(EpcfType::Nat);
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let t = self.epcf_type()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        self.error(format!("expected a type, found {}", self.peek()))
    }

    pub fn ecps_type(&mut self) -> Result<EcpsType, ParseError> {
        if self.eat_kw("unit") {
            return Ok(EcpsType::Unit);
        }
        if self.eat_kw("nat") {
            return Ok(EcpsType::Nat);
        }
        if self.eat_kw("not") {
            self.expect(Tok::LParen)?;
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.ecps_type()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            return Ok(EcpsType::Neg(args));
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let t = self.ecps_type()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        self.error(format!("expected a type, found {}", self.peek()))
    }

    // ------------------------------------------------------------ EPCF

    fn starts_epcf_atom(&self) -> bool {
        match self.peek() {
            Tok::Star | Tok::Num(_) | Tok::LParen => true,
            Tok::Hole => self.holes,
            Tok::Ident(s) => s == "zero" || s == "succ" || s == "fun" || !KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    pub fn epcf_term(&mut self) -> Result<epcf::Term, ParseError> {
        use epcf::{Comp as C, Term as T};
        if self.eat_kw("return") {
            return Ok(T::Comp(C::Return(self.epcf_value()?)));
        }
        if self.eat_kw("let") {
            let x = self.ident()?;
            self.expect(Tok::Eq)?;
            let m = self.epcf_comp()?;
            self.expect_kw("in")?;
            let n = self.epcf_comp()?;
            return Ok(T::Comp(C::let_in(m, x, n)));
        }
        if self.eat_kw("loop") {
            // `loop` diverges at nat, `loop(T)` at T
            let ty = if *self.peek() == Tok::LParen {
                self.bump();
                let ty = self.epcf_type()?;
                self.expect(Tok::RParen)?;
                ty
            } else {
                EpcfType::Nat
            };
            return Ok(T::Comp(epcf::loop_comp(&ty)));
        }
        if self.eat_kw("fix") {
            return Ok(T::Comp(C::Fix(self.epcf_value()?)));
        }
        if self.eat_kw("case") {
            let v = self.epcf_value()?;
            let (m, x, n) = self.case_branches(Self::epcf_comp)?;
            return Ok(T::Comp(C::case(v, m, x, n)));
        }
        if let Tok::OpName(name) = self.peek().clone() {
            self.bump();
            return self.epcf_op(name).map(T::Comp);
        }
        let head = self.epcf_atom()?;
        match head {
            T::Value(v) if self.starts_epcf_atom() => {
                let arg = match self.epcf_atom()? {
                    T::Value(w) => w,
                    T::Comp(_) => return self.error("the argument of an application must be a value"),
                };
                Ok(T::Comp(C::App(v, arg)))
            }
            other => Ok(other),
        }
    }

    fn case_branches<R>(
        &mut self,
        mut branch: impl FnMut(&mut Self) -> Result<R, ParseError>,
    ) -> Result<(R, Name, R), ParseError> {
        self.expect_kw("of")?;
        self.expect(Tok::LBrace)?;
        self.expect_kw("zero")?;
        self.expect(Tok::Arrow)?;
        let m = branch(self)?;
        self.expect(Tok::Bar)?;
        self.expect_kw("succ")?;
        let x = self.ident()?;
        self.expect(Tok::Arrow)?;
        let n = branch(self)?;
        self.expect(Tok::RBrace)?;
        Ok((m, x, n))
    }

    fn epcf_atom(&mut self) -> Result<epcf::Term, ParseError> {
        use epcf::{Term as T, Value as V};
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.epcf_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Hole if self.holes => {
                self.bump();
                Ok(T::Value(V::Var(HOLE_VALUE.into())))
            }
            Tok::Star => {
                self.bump();
                Ok(T::Value(V::Star))
            }
            Tok::Num(n) => {
                self.bump();
                let n = self.numeral_checked(n)?;
                Ok(T::Value(V::numeral(n)))
            }
            Tok::Ident(s) if s == "zero" => {
                self.bump();
                Ok(T::Value(V::Zero))
            }
            Tok::Ident(s) if s == "succ" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let v = self.epcf_value()?;
                self.expect(Tok::RParen)?;
                Ok(T::Value(V::Succ(Box::new(v))))
            }
            Tok::Ident(s) if s == "fun" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.epcf_type()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Arrow)?;
                let body = self.epcf_comp()?;
                Ok(T::Value(V::lam(x, ty, body)))
            }
            Tok::Ident(_) => Ok(T::Value(V::Var(self.ident()?))),
            t => self.error(format!("expected a term, found {t}")),
        }
    }

    pub fn epcf_value(&mut self) -> Result<epcf::Value, ParseError> {
        let p = self.pos();
        match self.epcf_term()? {
            epcf::Term::Value(v) => Ok(v),
            epcf::Term::Comp(c) => Err(ParseError {
                line: p.line,
                col: p.col,
                message: format!("expected a value, found the computation `{c}`"),
            }),
        }
    }

    pub fn epcf_comp(&mut self) -> Result<epcf::Comp, ParseError> {
        let p = self.pos();
        match self.epcf_term()? {
            epcf::Term::Comp(c) => Ok(c),
            epcf::Term::Value(epcf::Value::Var(x)) if x == HOLE_VALUE => Ok(epcf_comp_hole()),
            epcf::Term::Value(v) => Err(ParseError {
                line: p.line,
                col: p.col,
                message: format!("expected a computation, found the value `{v}` (use `return {v}`)"),
            }),
        }
    }

    fn epcf_op(&mut self, name: Name) -> Result<epcf::Comp, ParseError> {
        use epcf::{Comp as C, OpArgs as O, Term as T};
        self.expect(Tok::LParen)?;
        let mut items = Vec::new();
        let mut param = None;
        if *self.peek() != Tok::RParen {
            let first = self.epcf_term()?;
            if *self.peek() == Tok::Semi {
                self.bump();
                match first {
                    T::Value(v) => param = Some(v),
                    T::Comp(_) => return self.error("the parameter of an operation must be a value"),
                }
                if *self.peek() != Tok::RParen {
                    items.push(self.epcf_term()?);
                }
            } else {
                items.push(first);
            }
            while *self.peek() == Tok::Comma {
                self.bump();
                items.push(self.epcf_term()?);
            }
        }
        self.expect(Tok::RParen)?;
        let single_value = items.len() == 1 && matches!(items[0], T::Value(_));
        let args = if single_value {
            let w = match items.pop() {
                Some(T::Value(w)) => w,
                _ => unreachable!(),
            };
            match param {
                Some(v) => O::ParamInf(v, w),
                None => O::Inf(w),
            }
        } else {
            let mut comps = Vec::with_capacity(items.len());
            for it in items {
                match it {
                    T::Comp(c) => comps.push(c),
                    T::Value(v) => return self.error(format!("operation argument `{v}` must be a computation")),
                }
            }
            match param {
                Some(v) => O::Param(v, comps),
                None => O::Plain(comps),
            }
        };
        Ok(C::Op(name, args))
    }

    // ------------------------------------------------------------ ECPS

    pub fn ecps_term(&mut self) -> Result<ecps::Term, ParseError> {
        use ecps::{Comp as C, Term as T};
        if self.eat_kw("stop") {
            return Ok(T::Comp(C::Stop));
        }
        if self.eat_kw("loop") {
            return Ok(T::Comp(ecps::loop_comp()));
        }
        if self.eat_kw("case") {
            let v = self.ecps_value()?;
            let (t, x, u) = self.case_branches(Self::ecps_comp)?;
            return Ok(T::Comp(C::case(v, t, x, u)));
        }
        if let Tok::OpName(name) = self.peek().clone() {
            self.bump();
            self.expect(Tok::LParen)?;
            let v = self.ecps_value()?;
            self.expect(Tok::Comma)?;
            let x = self.ident()?;
            self.expect(Tok::Dot)?;
            let t = self.ecps_comp()?;
            self.expect(Tok::RParen)?;
            return Ok(T::Comp(C::Op(name, v, x, Box::new(t))));
        }
        if *self.peek() == Tok::LParen && matches!(self.peek_at(1), Tok::Ident(s) if s == "mu") {
            self.bump();
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Dot)?;
            let v = self.ecps_value()?;
            self.expect(Tok::RParen)?;
            let args = self.ecps_args()?;
            return Ok(T::Comp(C::MuApp(x, v, args)));
        }
        let head = self.ecps_atom()?;
        match head {
            T::Value(v) if *self.peek() == Tok::LParen => {
                let args = self.ecps_args()?;
                Ok(T::Comp(C::App(v, args)))
            }
            other => Ok(other),
        }
    }

    fn ecps_args(&mut self) -> Result<Vec<ecps::Value>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.ecps_value()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn ecps_atom(&mut self) -> Result<ecps::Term, ParseError> {
        use ecps::{Term as T, Value as V};
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ecps_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Hole if self.holes => {
                self.bump();
                Ok(T::Value(V::Var(HOLE_VALUE.into())))
            }
            Tok::Star => {
                self.bump();
                Ok(T::Value(V::Star))
            }
            Tok::Num(n) => {
                self.bump();
                let n = self.numeral_checked(n)?;
                Ok(T::Value(V::numeral(n)))
            }
            Tok::Ident(s) if s == "zero" => {
                self.bump();
                Ok(T::Value(V::Zero))
            }
            Tok::Ident(s) if s == "succ" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let v = self.ecps_value()?;
                self.expect(Tok::RParen)?;
                Ok(T::Value(V::Succ(Box::new(v))))
            }
            Tok::Ident(s) if s == "fun" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut params = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        let x = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let ty = self.ecps_type()?;
                        params.push((x, ty));
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Arrow)?;
                let body = self.ecps_comp()?;
                Ok(T::Value(V::Lam(params, Box::new(body))))
            }
            Tok::Ident(_) => Ok(T::Value(V::Var(self.ident()?))),
            t => self.error(format!("expected a term, found {t}")),
        }
    }

    pub fn ecps_value(&mut self) -> Result<ecps::Value, ParseError> {
        let p = self.pos();
        match self.ecps_term()? {
            ecps::Term::Value(v) => Ok(v),
            ecps::Term::Comp(c) => Err(ParseError {
                line: p.line,
                col: p.col,
                message: format!("expected a value, found the computation `{c}`"),
            }),
        }
    }

    pub fn ecps_comp(&mut self) -> Result<ecps::Comp, ParseError> {
        let p = self.pos();
        match self.ecps_term()? {
            ecps::Term::Comp(c) => Ok(c),
            ecps::Term::Value(ecps::Value::Var(x)) if x == HOLE_VALUE => {
                Ok(ecps_comp_hole())
            }
            ecps::Term::Value(v) => Err(ParseError {
                line: p.line,
                col: p.col,
                message: format!("expected a computation, found the value `{v}`"),
            }),
        }
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(src)?;
    let t = f(&mut p)?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_epcf_term(src: &str) -> Result<epcf::Term, ParseError> {
    whole(src, Parser::epcf_term)
}

pub fn parse_epcf_comp(src: &str) -> Result<epcf::Comp, ParseError> {
    whole(src, Parser::epcf_comp)
}

pub fn parse_epcf_value(src: &str) -> Result<epcf::Value, ParseError> {
    whole(src, Parser::epcf_value)
}

pub fn parse_epcf_type(src: &str) -> Result<EpcfType, ParseError> {
    whole(src, Parser::epcf_type)
}

pub fn parse_ecps_term(src: &str) -> Result<ecps::Term, ParseError> {
    whole(src, Parser::ecps_term)
}

pub fn parse_ecps_comp(src: &str) -> Result<ecps::Comp, ParseError> {
    whole(src, Parser::ecps_comp)
}

pub fn parse_ecps_value(src: &str) -> Result<ecps::Value, ParseError> {
    whole(src, Parser::ecps_value)
}

pub fn parse_ecps_type(src: &str) -> Result<EcpsType, ParseError> {
    whole(src, Parser::ecps_type)
}

/// Parses a sequence of ECPS values separated by `;;` (the pool format).
pub fn parse_ecps_value_list(src: &str) -> Result<Vec<ecps::Value>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.ecps_value()?);
        if p.at_eof() {
            break;
        }
        p.expect(Tok::Semi)?;
        p.expect(Tok::Semi)?;
    }
    Ok(out)
}

/// A parsed source file of either calculus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Program {
    Epcf(epcf::Term),
    Ecps(ecps::Term),
}

/// Parses a whole file. Files without `#lang` are read as EPCF.
pub fn parse_program(src: &str) -> Result<(SourceFile, Program), ParseError> {
    let file = split_header(src)?;
    let prog = match file.lang.unwrap_or(Lang::Epcf) {
        Lang::Epcf => Program::Epcf(parse_epcf_term(&file.body)?),
        Lang::Ecps => Program::Ecps(parse_ecps_term(&file.body)?),
    };
    Ok((file, prog))
}

/// Parses a file holding several terms separated by `;;`.
pub fn parse_program_list(src: &str) -> Result<(SourceFile, Vec<Program>), ParseError> {
    let file = split_header(src)?;
    let lang = file.lang.unwrap_or(Lang::Epcf);
    let mut p = Parser::new(&file.body)?;
    let mut out = Vec::new();
    loop {
        out.push(match lang {
            Lang::Epcf => Program::Epcf(p.epcf_term()?),
            Lang::Ecps => Program::Ecps(p.ecps_term()?),
        });
        if p.at_eof() {
            break;
        }
        p.expect(Tok::Semi)?;
        p.expect(Tok::Semi)?;
    }
    Ok((file, out))
}
