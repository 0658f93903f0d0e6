//! Canonical text form of trees: one node per line, children in index order.

use super::{BotKind, Tree, TreeError};
use crate::syntax::parse::parse_epcf_value;

pub fn to_snapshot(t: &Tree) -> String {
    let mut out = String::new();
    write_tree(t, 0, &mut out);
    out.push('\n');
    out
}

fn write_tree(t: &Tree, indent: usize, out: &mut String) {
    match t {
        Tree::Bot(BotKind::Budget) => out.push_str("(bot budget)"),
        Tree::Bot(BotKind::Certified) => out.push_str("(bot certified)"),
        Tree::Stop => out.push_str("(stop)"),
        Tree::Val(v) => out.push_str(&format!("(val {v})")),
        Tree::Node { op, index, children, truncated } => {
            match index {
                Some(i) => out.push_str(&format!("(node {op} {i}")),
                None => out.push_str(&format!("(node {op} _")),
            }
            let pad = " ".repeat(indent + 2);
            for c in children {
                out.push('\n');
                out.push_str(&pad);
                write_tree(c, indent + 2, out);
            }
            if *truncated {
                out.push('\n');
                out.push_str(&pad);
                out.push_str("..");
            }
            out.push(')');
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    text: &'a str,
    i: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TreeError> {
        let before = &self.text[..self.i];
        let line = before.matches('\n').count() + 1;
        let col = before.len() - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
        Err(TreeError::Snapshot { line, col, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.i < self.src.len() && self.src[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.i).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TreeError> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn atom(&mut self) -> Result<&'a str, TreeError> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.src.len() && !self.src[self.i].is_ascii_whitespace() && !b"()".contains(&self.src[self.i]) {
            self.i += 1;
        }
        if start == self.i {
            return self.err("expected a word");
        }
        Ok(&self.text[start..self.i])
    }

    fn tree(&mut self) -> Result<Tree, TreeError> {
        self.expect(b'(')?;
        let head = self.atom()?;
        let t = match head {
            "bot" => match self.atom()? {
                "budget" => Tree::Bot(BotKind::Budget),
                "certified" => Tree::Bot(BotKind::Certified),
                other => return self.err(format!("unknown bottom kind `{other}`")),
            },
            "stop" => Tree::Stop,
            "val" => {
                self.skip_ws();
                let start = self.i;
                let mut depth = 0i32;
                while self.i < self.src.len() {
                    match self.src[self.i] {
                        b'(' => depth += 1,
                        b')' if depth == 0 => break,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    self.i += 1;
                }
                let text = &self.text[start..self.i];
                match parse_epcf_value(text) {
                    Ok(v) => Tree::Val(v),
                    Err(e) => return self.err(format!("bad value: {e}")),
                }
            }
            "node" => {
                let op = self.atom()?.to_string();
                let index = match self.atom()? {
                    "_" => None,
                    n => match n.parse::<u64>() {
                        Ok(n) => Some(n),
                        Err(_) => return self.err(format!("bad index `{n}`")),
                    },
                };
                let mut children = Vec::new();
                let mut truncated = false;
                loop {
                    match self.peek() {
                        Some(b'(') if !truncated => children.push(self.tree()?),
                        Some(b'.') if !truncated => {
                            if self.atom()? != ".." {
                                return self.err("expected `..`");
                            }
                            truncated = true;
                        }
                        _ => break,
                    }
                }
                Tree::Node { op, index, children, truncated }
            }
            other => return self.err(format!("unknown tree form `{other}`")),
        };
        self.expect(b')')?;
        Ok(t)
    }
}

pub fn parse_snapshot(text: &str) -> Result<Tree, TreeError> {
    let mut r = Reader { src: text.as_bytes(), text, i: 0 };
    let t = r.tree()?;
    if r.peek().is_some() {
        return r.err("trailing input after the tree");
    }
    Ok(t)
}
