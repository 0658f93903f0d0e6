use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    /// `op[name]`, carrying the raw name.
    OpName(String),
    /// `[-]`, a context hole.
    Hole,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    LeadsTo,
    Bar,
    Eq,
    Star,
    Gt,
    Slash,
    Question,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::OpName(s) => write!(f, "`op[{s}]`"),
            Tok::Hole => write!(f, "`[-]`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::LeadsTo => write!(f, "`~>`"),
            Tok::Bar => write!(f, "`|`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Question => write!(f, "`?`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

pub const KEYWORDS: &[&str] = &[
    "fun", "return", "let", "in", "fix", "case", "of", "zero", "succ", "op", "mu", "stop", "loop", "not", "unit", "nat",
];

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let next = chars.get(i + 1).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '|' => Some(Tok::Bar),
            '=' => Some(Tok::Eq),
            '*' => Some(Tok::Star),
            '>' => Some(Tok::Gt),
            '/' => Some(Tok::Slash),
            '?' => Some(Tok::Question),
            '!' => Some(Tok::Bang),
            _ => None,
        };
        if let Some(t) = simple {
            toks.push((t, pos));
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && next == Some('>') {
            toks.push((Tok::Arrow, pos));
            i += 2;
            col += 2;
            continue;
        }
        if c == '~' && next == Some('>') {
            toks.push((Tok::LeadsTo, pos));
            i += 2;
            col += 2;
            continue;
        }
        if c == '[' {
            if next == Some('-') && chars.get(i + 2) == Some(&']') {
                toks.push((Tok::Hole, pos));
                i += 3;
                col += 3;
            } else {
                toks.push((Tok::LBracket, pos));
                i += 1;
                col += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<u64>().map_err(|_| err(line, col, format!("numeral `{text}` is too large")))?;
            col += i - start;
            toks.push((Tok::Num(n), pos));
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            if text == "op" && chars.get(i) == Some(&'[') {
                let name_start = i + 1;
                let mut j = name_start;
                while j < chars.len() && chars[j] != ']' && chars[j] != '\n' {
                    j += 1;
                }
                if chars.get(j) != Some(&']') {
                    return Err(err(line, col, "unterminated `op[`".into()));
                }
                let name: String = chars[name_start..j].iter().collect::<String>().trim().to_string();
                if name.is_empty() {
                    return Err(err(line, col, "empty operation name".into()));
                }
                col += j + 1 - i;
                i = j + 1;
                toks.push((Tok::OpName(name), pos));
                continue;
            }
            toks.push((Tok::Ident(text), pos));
            continue;
        }
        return Err(err(line, col, format!("unexpected character `{c}`")));
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(toks)
}
