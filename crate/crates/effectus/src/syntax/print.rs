//! Concrete-syntax printing. Output parses back to an alpha-equal term.

use std::fmt::{self, Display, Formatter};

use super::{ecps, epcf};

struct Atom<'a, T>(&'a T);

impl Display for Atom<'_, epcf::Value> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            epcf::Value::Lam(..) => write!(f, "({})", self.0),
            v => write!(f, "{v}"),
        }
    }
}

impl Display for Atom<'_, ecps::Value> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            ecps::Value::Lam(..) => write!(f, "({})", self.0),
            v => write!(f, "{v}"),
        }
    }
}

impl Display for epcf::Value {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        use epcf::Value as V;
        if let Some(n) = self.as_numeral() {
            return write!(f, "{n}");
        }
        match self {
            V::Star => write!(f, "*"),
            V::Zero => write!(f, "zero"),
            V::Succ(v) => write!(f, "succ({v})"),
            V::Var(x) => write!(f, "{x}"),
            V::Lam(x, t, m) => write!(f, "fun ({x}:{t}) -> {m}"),
        }
    }
}

fn comma_sep<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

/// The type at which an EPCF computation is the canonical `loop`.
fn epcf_loop_type(c: &epcf::Comp) -> Option<&super::EpcfType> {
    use epcf::{Comp as C, Value as V};
    let C::Let(m, x, n) = c else { return None };
    let C::Fix(V::Lam(f, ty, body)) = m.as_ref() else { return None };
    let (dom, cod) = ty.as_arrow()?;
    let loops = *dom == super::EpcfType::Nat
        && matches!(body.as_ref(), C::Return(V::Var(g)) if g == f)
        && matches!(n.as_ref(), C::App(V::Var(y), V::Zero) if y == x);
    loops.then_some(cod)
}

fn is_ecps_loop(c: &ecps::Comp) -> bool {
    use ecps::{Comp as C, Value as V};
    match c {
        C::MuApp(f, V::Lam(ps, body), ws) => {
            matches!(ws.as_slice(), [V::Zero])
                && matches!(ps.as_slice(), [(x, super::EcpsType::Nat)]
                    if matches!(body.as_ref(), C::App(V::Var(g), args) if g == f && x != f && matches!(args.as_slice(), [V::Var(y)] if y == x)))
        }
        _ => false,
    }
}

impl Display for epcf::Comp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        use epcf::{Comp as C, OpArgs as O};
        if let Some(ty) = epcf_loop_type(self) {
            return if *ty == super::EpcfType::Nat { write!(f, "loop") } else { write!(f, "loop({ty})") };
        }
        match self {
            C::App(v, w) => write!(f, "{} {}", Atom(v), Atom(w)),
            C::Return(v) => write!(f, "return {v}"),
            C::Let(m, x, n) => write!(f, "let {x} = {m} in {n}"),
            C::Fix(v) => write!(f, "fix {}", Atom(v)),
            C::Case(v, m, x, n) => write!(f, "case {} of {{ zero -> {m} | succ {x} -> {n} }}", Atom(v)),
            C::Op(name, args) => {
                write!(f, "op[{name}](")?;
                match args {
                    O::Plain(ms) => comma_sep(f, ms)?,
                    O::Param(v, ms) => {
                        write!(f, "{v}; ")?;
                        comma_sep(f, ms)?;
                    }
                    O::Inf(w) => write!(f, "{w}")?,
                    O::ParamInf(v, w) => write!(f, "{v}; {w}")?,
                }
                write!(f, ")")
            }
        }
    }
}

impl Display for epcf::Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            epcf::Term::Value(v) => write!(f, "{v}"),
            epcf::Term::Comp(c) => write!(f, "{c}"),
        }
    }
}

impl Display for epcf::Stack {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "id")?;
        for fr in &self.frames {
            write!(f, " . (let (-) = {} in {})", fr.binder, fr.body)?;
        }
        Ok(())
    }
}

impl Display for ecps::Value {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        use ecps::Value as V;
        if let Some(n) = self.as_numeral() {
            return write!(f, "{n}");
        }
        match self {
            V::Star => write!(f, "*"),
            V::Zero => write!(f, "zero"),
            V::Succ(v) => write!(f, "succ({v})"),
            V::Var(x) => write!(f, "{x}"),
            V::Lam(params, t) => {
                write!(f, "fun (")?;
                for (i, (x, ty)) in params.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}:{ty}")?;
                }
                write!(f, ") -> {t}")
            }
        }
    }
}

impl Display for ecps::Comp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        use ecps::Comp as C;
        if is_ecps_loop(self) {
            return write!(f, "loop");
        }
        match self {
            C::App(v, ws) => {
                write!(f, "{}(", Atom(v))?;
                comma_sep(f, ws)?;
                write!(f, ")")
            }
            C::MuApp(x, v, ws) => {
                write!(f, "(mu {x}. {v})(")?;
                comma_sep(f, ws)?;
                write!(f, ")")
            }
            C::Op(name, v, x, t) => write!(f, "op[{name}]({v}, {x}. {t})"),
            C::Stop => write!(f, "stop"),
            C::Case(v, t, x, u) => write!(f, "case {} of {{ zero -> {t} | succ {x} -> {u} }}", Atom(v)),
        }
    }
}

impl Display for ecps::Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ecps::Term::Value(v) => write!(f, "{v}"),
            ecps::Term::Comp(c) => write!(f, "{c}"),
        }
    }
}

/// Multi-line rendering of an ECPS term: one binder body per indented line.
/// Parses back to the same term as the one-line form.
pub fn pretty_ecps_comp(c: &ecps::Comp) -> String {
    let mut out = String::new();
    pp_comp(c, 0, &mut out);
    out
}

pub fn pretty_ecps_value(v: &ecps::Value) -> String {
    let mut out = String::new();
    pp_value(v, 0, &mut out);
    out
}

const WIDTH: usize = 72;

fn indent(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn pp_value(v: &ecps::Value, depth: usize, out: &mut String) {
    let flat = v.to_string();
    if flat.len() + depth * 2 <= WIDTH {
        out.push_str(&flat);
        return;
    }
    match v {
        ecps::Value::Lam(params, t) => {
            out.push_str("fun (");
            for (i, (x, ty)) in params.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{x}:{ty}"));
            }
            out.push_str(") ->");
            indent(out, depth + 1);
            pp_comp(t, depth + 1, out);
        }
        _ => out.push_str(&flat),
    }
}

fn pp_atom(v: &ecps::Value, depth: usize, out: &mut String) {
    if matches!(v, ecps::Value::Lam(..)) {
        out.push('(');
        pp_value(v, depth, out);
        out.push(')');
    } else {
        pp_value(v, depth, out);
    }
}

fn pp_args(ws: &[ecps::Value], depth: usize, out: &mut String) {
    out.push('(');
    for (i, w) in ws.iter().enumerate() {
        if i > 0 {
            out.push(',');
            indent(out, depth + 1);
        }
        pp_value(w, depth + 1, out);
    }
    out.push(')');
}

fn pp_comp(c: &ecps::Comp, depth: usize, out: &mut String) {
    use ecps::Comp as C;
    let flat = c.to_string();
    if flat.len() + depth * 2 <= WIDTH {
        out.push_str(&flat);
        return;
    }
    match c {
        C::App(v, ws) => {
            pp_atom(v, depth, out);
            pp_args(ws, depth, out);
        }
        C::MuApp(x, v, ws) => {
            out.push_str(&format!("(mu {x}. "));
            pp_value(v, depth + 1, out);
            out.push(')');
            pp_args(ws, depth, out);
        }
        C::Op(name, v, x, t) => {
            out.push_str(&format!("op[{name}]({v}, {x}."));
            indent(out, depth + 1);
            pp_comp(t, depth + 1, out);
            out.push(')');
        }
        C::Stop => out.push_str("stop"),
        C::Case(v, t, x, u) => {
            out.push_str(&format!("case {v} of {{"));
            indent(out, depth + 1);
            out.push_str("zero -> ");
            pp_comp(t, depth + 2, out);
            indent(out, depth + 1);
            out.push_str(&format!("| succ {x} -> "));
            pp_comp(u, depth + 2, out);
            indent(out, depth);
            out.push('}');
        }
    }
}
