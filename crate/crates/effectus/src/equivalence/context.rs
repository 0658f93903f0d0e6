//! ECPS program contexts: one hole, accepting a value or a computation.

use std::fmt;

use thiserror::Error;

use crate::syntax::parse::{ecps_comp_hole, Parser, HOLE_COMP, HOLE_VALUE};
use crate::syntax::typing::{check_ecps_comp, type_of_ecps_value, TypeError};
use crate::syntax::{ecps, EcpsType, EffectSig, Name, ParseError, TypeEnv};

use ecps::{Comp, Value};

/// Value hole, value result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueToValue {
    Hole,
    Succ(Box<ValueToValue>),
    Lam(Vec<(Name, EcpsType)>, Box<ValueToComp>),
}

/// Value hole, computation result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueToComp {
    AppHead(Box<ValueToValue>, Vec<Value>),
    AppArg(Value, Vec<Value>, Box<ValueToValue>, Vec<Value>),
    MuHead(Name, Box<ValueToValue>, Vec<Value>),
    MuArg(Name, Value, Vec<Value>, Box<ValueToValue>, Vec<Value>),
    OpParam(Name, Box<ValueToValue>, Name, Comp),
    OpBody(Name, Value, Name, Box<ValueToComp>),
    CaseScrutinee(Box<ValueToValue>, Comp, Name, Comp),
    CaseZero(Value, Box<ValueToComp>, Name, Comp),
    CaseSucc(Value, Comp, Name, Box<ValueToComp>),
}

/// Computation hole, computation result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompToComp {
    Hole,
    AppHead(Box<CompToValue>, Vec<Value>),
    AppArg(Value, Vec<Value>, Box<CompToValue>, Vec<Value>),
    MuHead(Name, Box<CompToValue>, Vec<Value>),
    MuArg(Name, Value, Vec<Value>, Box<CompToValue>, Vec<Value>),
    OpBody(Name, Value, Name, Box<CompToComp>),
    CaseZero(Value, Box<CompToComp>, Name, Comp),
    CaseSucc(Value, Comp, Name, Box<CompToComp>),
}

/// Computation hole, value result: only a λ over a computation context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompToValue {
    pub params: Vec<(Name, EcpsType)>,
    pub body: Box<CompToComp>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    VV(ValueToValue),
    VC(ValueToComp),
    CC(CompToComp),
    CV(CompToValue),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Value,
    Comp,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Value => "value",
            Kind::Comp => "computation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("a context needs exactly one hole, found {0}")]
    HoleCount(usize),
    #[error("no context has the shape `{0}`")]
    Unrepresentable(String),
    #[error("the hole takes a {hole}, but a {given} was supplied")]
    KindMismatch { hole: Kind, given: Kind },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

// ------------------------------------------------------------ term view

fn is_value_hole(v: &Value) -> bool {
    matches!(v, Value::Var(x) if x == HOLE_VALUE)
}

fn is_comp_hole(c: &Comp) -> bool {
    matches!(c, Comp::App(Value::Var(x), args) if x == HOLE_COMP && args.is_empty())
}

fn holes_value(v: &Value) -> usize {
    match v {
        Value::Var(_) if is_value_hole(v) => 1,
        Value::Succ(w) => holes_value(w),
        Value::Lam(_, t) => holes_comp(t),
        _ => 0,
    }
}

fn holes_comp(c: &Comp) -> usize {
    if is_comp_hole(c) {
        return 1;
    }
    match c {
        Comp::App(v, ws) => holes_value(v) + ws.iter().map(holes_value).sum::<usize>(),
        Comp::MuApp(_, v, ws) => holes_value(v) + ws.iter().map(holes_value).sum::<usize>(),
        Comp::Op(_, v, _, t) => holes_value(v) + holes_comp(t),
        Comp::Stop => 0,
        Comp::Case(v, t, _, u) => holes_value(v) + holes_comp(t) + holes_comp(u),
    }
}

/// Which argument holds the hole, splitting the rest around it.
fn split_args(ws: &[Value]) -> Option<(Vec<Value>, &Value, Vec<Value>)> {
    let i = ws.iter().position(|w| holes_value(w) > 0)?;
    Some((ws[..i].to_vec(), &ws[i], ws[i + 1..].to_vec()))
}

fn unrep<T>(t: impl fmt::Display) -> Result<T, ContextError> {
    Err(ContextError::Unrepresentable(show_holes(&t.to_string())))
}

fn show_holes(s: &str) -> String {
    s.replace(&format!("{HOLE_COMP}()"), "[-]").replace(HOLE_VALUE, "[-]")
}

impl Context {
    pub fn hole_kind(&self) -> Kind {
        match self {
            Context::VV(_) | Context::VC(_) => Kind::Value,
            Context::CC(_) | Context::CV(_) => Kind::Comp,
        }
    }

    pub fn result_kind(&self) -> Kind {
        match self {
            Context::VV(_) | Context::CV(_) => Kind::Value,
            Context::VC(_) | Context::CC(_) => Kind::Comp,
        }
    }

    /// Reads a term containing exactly one hole marker as a context.
    pub fn from_term(t: &ecps::Term) -> Result<Context, ContextError> {
        let n = match t {
            ecps::Term::Value(v) => holes_value(v),
            ecps::Term::Comp(c) => holes_comp(c),
        };
        if n != 1 {
            return Err(ContextError::HoleCount(n));
        }
        match t {
            ecps::Term::Value(v) => {
                if value_has_value_hole(v) {
                    Ok(Context::VV(vv(v)?))
                } else {
                    Ok(Context::CV(cv(v)?))
                }
            }
            ecps::Term::Comp(c) => {
                if comp_has_value_hole(c) {
                    Ok(Context::VC(vc(c)?))
                } else {
                    Ok(Context::CC(cc(c)?))
                }
            }
        }
    }

    /// The context as a term with the hole marker in place.
    pub fn to_term(&self) -> ecps::Term {
        match self {
            Context::VV(c) => ecps::Term::Value(c.to_value()),
            Context::VC(c) => ecps::Term::Comp(c.to_comp()),
            Context::CC(c) => ecps::Term::Comp(c.to_comp()),
            Context::CV(c) => ecps::Term::Value(c.to_value()),
        }
    }

    /// Hole filling. Variables of `u` may be captured by binders of the
    /// context.
    pub fn fill(&self, u: &ecps::Term) -> Result<ecps::Term, ContextError> {
        let given = match u {
            ecps::Term::Value(_) => Kind::Value,
            ecps::Term::Comp(_) => Kind::Comp,
        };
        if given != self.hole_kind() {
            return Err(ContextError::KindMismatch { hole: self.hole_kind(), given });
        }
        Ok(match self.to_term() {
            ecps::Term::Value(v) => ecps::Term::Value(plug_value(&v, u)),
            ecps::Term::Comp(c) => ecps::Term::Comp(plug_comp(&c, u)),
        })
    }

    pub fn fill_value(&self, u: &Value) -> Result<ecps::Term, ContextError> {
        self.fill(&ecps::Term::Value(u.clone()))
    }

    pub fn fill_comp(&self, u: &Comp) -> Result<ecps::Term, ContextError> {
        self.fill(&ecps::Term::Comp(u.clone()))
    }

    /// `C[C']`: the hole of `self` replaced by `inner`.
    pub fn compose(&self, inner: &Context) -> Result<Context, ContextError> {
        Context::from_term(&self.fill(&inner.to_term())?)
    }

    pub fn comp_hole() -> Context {
        Context::CC(CompToComp::Hole)
    }

    pub fn value_hole() -> Context {
        Context::VV(ValueToValue::Hole)
    }
}

fn value_has_value_hole(v: &Value) -> bool {
    match v {
        Value::Var(_) => is_value_hole(v),
        Value::Succ(w) => value_has_value_hole(w),
        Value::Lam(_, t) => comp_has_value_hole(t),
        _ => false,
    }
}

fn comp_has_value_hole(c: &Comp) -> bool {
    match c {
        Comp::App(v, ws) | Comp::MuApp(_, v, ws) => value_has_value_hole(v) || ws.iter().any(value_has_value_hole),
        Comp::Op(_, v, _, t) => value_has_value_hole(v) || comp_has_value_hole(t),
        Comp::Stop => false,
        Comp::Case(v, t, _, u) => value_has_value_hole(v) || comp_has_value_hole(t) || comp_has_value_hole(u),
    }
}

fn vv(v: &Value) -> Result<ValueToValue, ContextError> {
    match v {
        Value::Var(_) if is_value_hole(v) => Ok(ValueToValue::Hole),
        Value::Succ(w) => Ok(ValueToValue::Succ(Box::new(vv(w)?))),
        Value::Lam(ps, t) => Ok(ValueToValue::Lam(ps.clone(), Box::new(vc(t)?))),
        other => unrep(other),
    }
}

fn vc(c: &Comp) -> Result<ValueToComp, ContextError> {
    use ValueToComp as K;
    Ok(match c {
        Comp::App(v, ws) if holes_value(v) > 0 => K::AppHead(Box::new(vv(v)?), ws.clone()),
        Comp::App(v, ws) => {
            let (l, h, r) = split_args(ws).expect("hole present");
            K::AppArg(v.clone(), l, Box::new(vv(h)?), r)
        }
        Comp::MuApp(x, v, ws) if holes_value(v) > 0 => K::MuHead(x.clone(), Box::new(vv(v)?), ws.clone()),
        Comp::MuApp(x, v, ws) => {
            let (l, h, r) = split_args(ws).expect("hole present");
            K::MuArg(x.clone(), v.clone(), l, Box::new(vv(h)?), r)
        }
        Comp::Op(s, v, x, t) if holes_value(v) > 0 => K::OpParam(s.clone(), Box::new(vv(v)?), x.clone(), t.as_ref().clone()),
        Comp::Op(s, v, x, t) => K::OpBody(s.clone(), v.clone(), x.clone(), Box::new(vc(t)?)),
        Comp::Case(v, t, x, u) if holes_value(v) > 0 => {
            K::CaseScrutinee(Box::new(vv(v)?), t.as_ref().clone(), x.clone(), u.as_ref().clone())
        }
        Comp::Case(v, t, x, u) if holes_comp(t) > 0 => K::CaseZero(v.clone(), Box::new(vc(t)?), x.clone(), u.as_ref().clone()),
        Comp::Case(v, t, x, u) => K::CaseSucc(v.clone(), t.as_ref().clone(), x.clone(), Box::new(vc(u)?)),
        Comp::Stop => unreachable!("no hole"),
    })
}

fn cv(v: &Value) -> Result<CompToValue, ContextError> {
    match v {
        Value::Lam(ps, t) => Ok(CompToValue { params: ps.clone(), body: Box::new(cc(t)?) }),
        other => unrep(other),
    }
}

fn cc(c: &Comp) -> Result<CompToComp, ContextError> {
    use CompToComp as K;
    if is_comp_hole(c) {
        return Ok(K::Hole);
    }
    Ok(match c {
        Comp::App(v, ws) if holes_value(v) > 0 => K::AppHead(Box::new(cv(v)?), ws.clone()),
        Comp::App(v, ws) => {
            let (l, h, r) = split_args(ws).expect("hole present");
            K::AppArg(v.clone(), l, Box::new(cv(h)?), r)
        }
        Comp::MuApp(x, v, ws) if holes_value(v) > 0 => K::MuHead(x.clone(), Box::new(cv(v)?), ws.clone()),
        Comp::MuApp(x, v, ws) => {
            let (l, h, r) = split_args(ws).expect("hole present");
            K::MuArg(x.clone(), v.clone(), l, Box::new(cv(h)?), r)
        }
        Comp::Op(_, v, _, _) if holes_value(v) > 0 => return unrep(c),
        Comp::Op(s, v, x, t) => K::OpBody(s.clone(), v.clone(), x.clone(), Box::new(cc(t)?)),
        Comp::Case(v, _, _, _) if holes_value(v) > 0 => return unrep(c),
        Comp::Case(v, t, x, u) if holes_comp(t) > 0 => K::CaseZero(v.clone(), Box::new(cc(t)?), x.clone(), u.as_ref().clone()),
        Comp::Case(v, t, x, u) => K::CaseSucc(v.clone(), t.as_ref().clone(), x.clone(), Box::new(cc(u)?)),
        Comp::Stop => unreachable!("no hole"),
    })
}

fn args_around(l: &[Value], h: Value, r: &[Value]) -> Vec<Value> {
    let mut out = l.to_vec();
    out.push(h);
    out.extend_from_slice(r);
    out
}

impl ValueToValue {
    pub fn to_value(&self) -> Value {
        match self {
            ValueToValue::Hole => Value::Var(HOLE_VALUE.into()),
            ValueToValue::Succ(c) => Value::Succ(Box::new(c.to_value())),
            ValueToValue::Lam(ps, c) => Value::Lam(ps.clone(), Box::new(c.to_comp())),
        }
    }
}

impl ValueToComp {
    pub fn to_comp(&self) -> Comp {
        use ValueToComp as K;
        match self {
            K::AppHead(c, ws) => Comp::App(c.to_value(), ws.clone()),
            K::AppArg(v, l, c, r) => Comp::App(v.clone(), args_around(l, c.to_value(), r)),
            K::MuHead(x, c, ws) => Comp::MuApp(x.clone(), c.to_value(), ws.clone()),
            K::MuArg(x, v, l, c, r) => Comp::MuApp(x.clone(), v.clone(), args_around(l, c.to_value(), r)),
            K::OpParam(s, c, x, t) => Comp::Op(s.clone(), c.to_value(), x.clone(), Box::new(t.clone())),
            K::OpBody(s, v, x, c) => Comp::Op(s.clone(), v.clone(), x.clone(), Box::new(c.to_comp())),
            K::CaseScrutinee(c, t, x, u) => Comp::case(c.to_value(), t.clone(), x.clone(), u.clone()),
            K::CaseZero(v, c, x, u) => Comp::case(v.clone(), c.to_comp(), x.clone(), u.clone()),
            K::CaseSucc(v, t, x, c) => Comp::case(v.clone(), t.clone(), x.clone(), c.to_comp()),
        }
    }
}

impl CompToComp {
    pub fn to_comp(&self) -> Comp {
        use CompToComp as K;
        match self {
            K::Hole => ecps_comp_hole(),
            K::AppHead(c, ws) => Comp::App(c.to_value(), ws.clone()),
            K::AppArg(v, l, c, r) => Comp::App(v.clone(), args_around(l, c.to_value(), r)),
            K::MuHead(x, c, ws) => Comp::MuApp(x.clone(), c.to_value(), ws.clone()),
            K::MuArg(x, v, l, c, r) => Comp::MuApp(x.clone(), v.clone(), args_around(l, c.to_value(), r)),
            K::OpBody(s, v, x, c) => Comp::Op(s.clone(), v.clone(), x.clone(), Box::new(c.to_comp())),
            K::CaseZero(v, c, x, u) => Comp::case(v.clone(), c.to_comp(), x.clone(), u.clone()),
            K::CaseSucc(v, t, x, c) => Comp::case(v.clone(), t.clone(), x.clone(), c.to_comp()),
        }
    }
}

impl CompToValue {
    pub fn to_value(&self) -> Value {
        Value::Lam(self.params.clone(), Box::new(self.body.to_comp()))
    }
}

fn plug_value(v: &Value, u: &ecps::Term) -> Value {
    match (v, u) {
        (Value::Var(_), ecps::Term::Value(w)) if is_value_hole(v) => w.clone(),
        (Value::Succ(w), _) => Value::Succ(Box::new(plug_value(w, u))),
        (Value::Lam(ps, t), _) => Value::Lam(ps.clone(), Box::new(plug_comp(t, u))),
        _ => v.clone(),
    }
}

fn plug_comp(c: &Comp, u: &ecps::Term) -> Comp {
    if let ecps::Term::Comp(t) = u {
        if is_comp_hole(c) {
            return t.clone();
        }
    }
    let pv = |v: &Value| plug_value(v, u);
    match c {
        Comp::App(v, ws) => Comp::App(pv(v), ws.iter().map(pv).collect()),
        Comp::MuApp(x, v, ws) => Comp::MuApp(x.clone(), pv(v), ws.iter().map(pv).collect()),
        Comp::Op(s, v, x, t) => Comp::Op(s.clone(), pv(v), x.clone(), Box::new(plug_comp(t, u))),
        Comp::Stop => Comp::Stop,
        Comp::Case(v, t, x, w) => Comp::Case(pv(v), Box::new(plug_comp(t, u)), x.clone(), Box::new(plug_comp(w, u))),
    }
}

// ------------------------------------------------------------ typing

/// `C : (Γ′ ⊢ B) ⇒ (Γ ⊢ A)`, with `B`/`A` absent on the computation side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextTyping {
    pub hole_env: TypeEnv<EcpsType>,
    pub hole_type: Option<EcpsType>,
    pub env: TypeEnv<EcpsType>,
    pub result_type: Option<EcpsType>,
}

/// Types a context in the outer environment `env`. A value hole needs its
/// type; the environment at the hole is `env` extended by the binders on
/// the path to it.
pub fn typecheck_context(
    sig: &EffectSig,
    ctx: &Context,
    env: &TypeEnv<EcpsType>,
    hole_type: Option<&EcpsType>,
) -> Result<ContextTyping, ContextError> {
    let marker = match (ctx.hole_kind(), hole_type) {
        (Kind::Value, Some(b)) => (HOLE_VALUE, b.clone()),
        (Kind::Value, None) => {
            return Err(ContextError::Type(TypeError::Rule {
                rule: "vv-id",
                term: "[-]".into(),
                reason: "a value hole needs a type".into(),
            }))
        }
        (Kind::Comp, _) => (HOLE_COMP, EcpsType::Neg(vec![])),
    };
    let mut hole_env = env.clone();
    for (x, t) in path_binders(&ctx.to_term()) {
        hole_env.insert(x, t);
    }
    let mut outer = env.clone();
    outer.insert(marker.0.into(), marker.1);
    let result_type = match ctx.to_term() {
        ecps::Term::Value(v) => Some(type_of_ecps_value(sig, &outer, &v)?),
        ecps::Term::Comp(c) => {
            check_ecps_comp(sig, &outer, &c)?;
            None
        }
    };
    Ok(ContextTyping {
        hole_env,
        hole_type: hole_type.filter(|_| ctx.hole_kind() == Kind::Value).cloned(),
        env: env.clone(),
        result_type,
    })
}

/// Binders enclosing the hole, outermost first.
fn path_binders(t: &ecps::Term) -> Vec<(Name, EcpsType)> {
    fn in_value(v: &Value, out: &mut Vec<(Name, EcpsType)>) -> bool {
        match v {
            Value::Var(_) => is_value_hole(v),
            Value::Succ(w) => in_value(w, out),
            Value::Lam(ps, t) => {
                let n = out.len();
                out.extend(ps.iter().cloned());
                let hit = in_comp(t, out);
                if !hit {
                    out.truncate(n);
                }
                hit
            }
            _ => false,
        }
    }
    fn in_comp(c: &Comp, out: &mut Vec<(Name, EcpsType)>) -> bool {
        if is_comp_hole(c) {
            return true;
        }
        match c {
            Comp::App(v, ws) => in_value(v, out) || ws.iter().any(|w| in_value(w, out)),
            Comp::MuApp(x, v, ws) => {
                let self_ty = match v {
                    Value::Lam(ps, _) => Some(EcpsType::Neg(ps.iter().map(|(_, t)| t.clone()).collect())),
                    _ => None,
                };
                let n = out.len();
                if let Some(t) = self_ty.clone() {
                    out.push((x.clone(), t));
                }
                if in_value(v, out) {
                    return true;
                }
                out.truncate(n);
                ws.iter().any(|w| in_value(w, out))
            }
            Comp::Op(_, v, x, t) => {
                if in_value(v, out) {
                    return true;
                }
                out.push((x.clone(), EcpsType::Nat));
                if in_comp(t, out) {
                    return true;
                }
                out.pop();
                false
            }
            Comp::Stop => false,
            Comp::Case(v, t, x, u) => {
                if in_value(v, out) || in_comp(t, out) {
                    return true;
                }
                out.push((x.clone(), EcpsType::Nat));
                if in_comp(u, out) {
                    return true;
                }
                out.pop();
                false
            }
        }
    }
    let mut out = Vec::new();
    match t {
        ecps::Term::Value(v) => in_value(v, &mut out),
        ecps::Term::Comp(c) => in_comp(c, &mut out),
    };
    out
}

// ------------------------------------------------------------ text

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show_holes(&self.to_term().to_string()))
    }
}

/// Parses a context. A bare `[-]` is a computation hole where a computation
/// is expected and a value hole elsewhere.
pub fn parse_context(src: &str) -> Result<Context, ContextError> {
    let mut p = Parser::new(src)?.with_holes();
    let t = p.ecps_term()?;
    p.expect_eof()?;
    read_context(&t, false)
}

fn read_context(t: &ecps::Term, value_hole: bool) -> Result<Context, ContextError> {
    match t {
        ecps::Term::Value(v) if is_value_hole(v) && !value_hole => Ok(Context::comp_hole()),
        _ => Context::from_term(t),
    }
}

/// Parses `;;`-separated contexts, each optionally prefixed by
/// `value <type> :` to declare a value hole of that type.
/// `#` header lines are skipped.
pub fn parse_contexts(src: &str) -> Result<Vec<(Context, Option<EcpsType>)>, ContextError> {
    use crate::syntax::lexer::Tok;
    let body = crate::syntax::parse::split_header(src)?.body;
    let mut p = Parser::new(&body)?.with_holes();
    let mut out = Vec::new();
    while !p.at_eof() {
        let ty = if p.is_kw("value") {
            p.bump();
            let t = p.ecps_type()?;
            p.expect(Tok::Colon)?;
            Some(t)
        } else {
            None
        };
        let t = p.ecps_term()?;
        out.push((read_context(&t, ty.is_some())?, ty));
        if p.at_eof() {
            break;
        }
        p.expect(Tok::Semi)?;
        p.expect(Tok::Semi)?;
    }
    Ok(out)
}
