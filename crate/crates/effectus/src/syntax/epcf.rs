//! Abstract syntax of EPCF, the fine-grained call-by-value calculus.

use std::collections::BTreeSet;

use super::types::EpcfType;
use super::Name;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Star,
    Zero,
    Succ(Box<Value>),
    Lam(Name, EpcfType, Box<Comp>),
    Var(Name),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Comp {
    App(Value, Value),
    Return(Value),
    /// `let x = M in N`, stored as (M, x, N).
    Let(Box<Comp>, Name, Box<Comp>),
    Fix(Value),
    /// `case V of { zero -> M | succ x -> N }`, stored as (V, M, x, N).
    Case(Value, Box<Comp>, Name, Box<Comp>),
    Op(Name, OpArgs),
}

/// Arguments of an operation call. The variant records which of the four
/// arities the call was written at.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpArgs {
    /// `σ(M0, …, Mn-1)` at arity αⁿ→α.
    Plain(Vec<Comp>),
    /// `σ(V; M0, …, Mn-1)` at arity ℕ×αⁿ→α.
    Param(Value, Vec<Comp>),
    /// `σ(W)` at arity α^ℕ→α, with `W : nat -> τ`.
    Inf(Value),
    /// `σ(V; W)` at arity ℕ×α^ℕ→α.
    ParamInf(Value, Value),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Value(Value),
    Comp(Comp),
}

/// One evaluation frame `let (−) = x in M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub binder: Name,
    pub body: Comp,
}

/// Evaluation stack. The last frame is the innermost one, i.e. the frame
/// that receives the next returned value. An empty stack is `id`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Stack {
    pub frames: Vec<Frame>,
}

impl Stack {
    pub fn id() -> Stack {
        Stack::default()
    }

    pub fn is_id(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn push(mut self, binder: impl Into<Name>, body: Comp) -> Stack {
        self.frames.push(Frame { binder: binder.into(), body });
        self
    }
}

impl Value {
    pub fn var(x: impl Into<Name>) -> Value {
        Value::Var(x.into())
    }

    pub fn numeral(n: u64) -> Value {
        let mut v = Value::Zero;
        for _ in 0..n {
            v = Value::Succ(Box::new(v));
        }
        v
    }

    pub fn lam(x: impl Into<Name>, ty: EpcfType, body: Comp) -> Value {
        Value::Lam(x.into(), ty, Box::new(body))
    }

    /// `Some(n)` when the value is the closed numeral succⁿ(zero).
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut v = self;
        loop {
            match v {
                Value::Zero => return Some(n),
                Value::Succ(inner) => {
                    n += 1;
                    v = inner;
                }
                _ => return None,
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_value(self, &mut Vec::new(), &mut out);
        out
    }
}

impl Comp {
    pub fn ret(v: Value) -> Comp {
        Comp::Return(v)
    }

    pub fn let_in(m: Comp, x: impl Into<Name>, n: Comp) -> Comp {
        Comp::Let(Box::new(m), x.into(), Box::new(n))
    }

    pub fn case(v: Value, zero: Comp, x: impl Into<Name>, succ: Comp) -> Comp {
        Comp::Case(v, Box::new(zero), x.into(), Box::new(succ))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_comp(self, &mut Vec::new(), &mut out);
        out
    }

    /// True when every operation call is already at arity ℕ×α^ℕ→α.
    pub fn is_arity_normal(&self) -> bool {
        match self {
            Comp::App(v, w) => v.is_arity_normal() && w.is_arity_normal(),
            Comp::Return(v) | Comp::Fix(v) => v.is_arity_normal(),
            Comp::Let(m, _, n) => m.is_arity_normal() && n.is_arity_normal(),
            Comp::Case(v, m, _, n) => {
                v.is_arity_normal() && m.is_arity_normal() && n.is_arity_normal()
            }
            Comp::Op(_, OpArgs::ParamInf(v, w)) => v.is_arity_normal() && w.is_arity_normal(),
            Comp::Op(..) => false,
        }
    }

    /// Number of syntax nodes, used to bound generated programs.
    pub fn size(&self) -> usize {
        match self {
            Comp::App(v, w) => 1 + v.size() + w.size(),
            Comp::Return(v) | Comp::Fix(v) => 1 + v.size(),
            Comp::Let(m, _, n) => 1 + m.size() + n.size(),
            Comp::Case(v, m, _, n) => 1 + v.size() + m.size() + n.size(),
            Comp::Op(_, args) => {
                1 + match args {
                    OpArgs::Plain(ms) => ms.iter().map(Comp::size).sum(),
                    OpArgs::Param(v, ms) => v.size() + ms.iter().map(Comp::size).sum::<usize>(),
                    OpArgs::Inf(w) => w.size(),
                    OpArgs::ParamInf(v, w) => v.size() + w.size(),
                }
            }
        }
    }
}

impl Value {
    pub fn is_arity_normal(&self) -> bool {
        match self {
            Value::Succ(v) => v.is_arity_normal(),
            Value::Lam(_, _, m) => m.is_arity_normal(),
            _ => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Value::Succ(v) => 1 + v.size(),
            Value::Lam(_, _, m) => 1 + m.size(),
            _ => 1,
        }
    }
}

fn fv_value(v: &Value, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match v {
        Value::Star | Value::Zero => {}
        Value::Succ(v) => fv_value(v, bound, out),
        Value::Lam(x, _, m) => {
            bound.push(x.clone());
            fv_comp(m, bound, out);
            bound.pop();
        }
        Value::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
    }
}

fn fv_comp(c: &Comp, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match c {
        Comp::App(v, w) => {
            fv_value(v, bound, out);
            fv_value(w, bound, out);
        }
        Comp::Return(v) | Comp::Fix(v) => fv_value(v, bound, out),
        Comp::Let(m, x, n) => {
            fv_comp(m, bound, out);
            bound.push(x.clone());
            fv_comp(n, bound, out);
            bound.pop();
        }
        Comp::Case(v, m, x, n) => {
            fv_value(v, bound, out);
            fv_comp(m, bound, out);
            bound.push(x.clone());
            fv_comp(n, bound, out);
            bound.pop();
        }
        Comp::Op(_, args) => match args {
            OpArgs::Plain(ms) => ms.iter().for_each(|m| fv_comp(m, bound, out)),
            OpArgs::Param(v, ms) => {
                fv_value(v, bound, out);
                ms.iter().for_each(|m| fv_comp(m, bound, out));
            }
            OpArgs::Inf(w) => fv_value(w, bound, out),
            OpArgs::ParamInf(v, w) => {
                fv_value(v, bound, out);
                fv_value(w, bound, out);
            }
        },
    }
}

/// Every identifier occurring in the computation, bound or free.
/// The diverging computation `let x = fix (fun (f:nat->ty) -> return f) in x zero`.
pub fn loop_comp(ty: &EpcfType) -> Comp {
    let arrow = EpcfType::arrow(EpcfType::Nat, ty.clone());
    Comp::let_in(Comp::Fix(Value::lam("f", arrow, Comp::Return(Value::var("f")))), "x", Comp::App(Value::var("x"), Value::Zero))
}

pub fn all_names_comp(c: &Comp, out: &mut BTreeSet<Name>) {
    match c {
        Comp::App(v, w) => {
            all_names_value(v, out);
            all_names_value(w, out);
        }
        Comp::Return(v) | Comp::Fix(v) => all_names_value(v, out),
        Comp::Let(m, x, n) => {
            out.insert(x.clone());
            all_names_comp(m, out);
            all_names_comp(n, out);
        }
        Comp::Case(v, m, x, n) => {
            out.insert(x.clone());
            all_names_value(v, out);
            all_names_comp(m, out);
            all_names_comp(n, out);
        }
        Comp::Op(_, args) => match args {
            OpArgs::Plain(ms) => ms.iter().for_each(|m| all_names_comp(m, out)),
            OpArgs::Param(v, ms) => {
                all_names_value(v, out);
                ms.iter().for_each(|m| all_names_comp(m, out));
            }
            OpArgs::Inf(w) => all_names_value(w, out),
            OpArgs::ParamInf(v, w) => {
                all_names_value(v, out);
                all_names_value(w, out);
            }
        },
    }
}

pub fn all_names_value(v: &Value, out: &mut BTreeSet<Name>) {
    match v {
        Value::Star | Value::Zero => {}
        Value::Succ(v) => all_names_value(v, out),
        Value::Lam(x, _, m) => {
            out.insert(x.clone());
            all_names_comp(m, out);
        }
        Value::Var(x) => {
            out.insert(x.clone());
        }
    }
}
