//! Abstract syntax of ECPS, the continuation-passing calculus.

use std::collections::BTreeSet;

use super::types::EcpsType;
use super::Name;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Zero,
    Succ(Box<Value>),
    Star,
    Lam(Vec<(Name, EcpsType)>, Box<Comp>),
    Var(Name),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Comp {
    App(Value, Vec<Value>),
    /// `(mu x. v)(w̄)`, stored as (x, v, w̄).
    MuApp(Name, Value, Vec<Value>),
    /// `op[σ](v, x. t)`, stored as (σ, v, x, t).
    Op(Name, Value, Name, Box<Comp>),
    Stop,
    /// `case v of { zero -> t | succ x -> u }`, stored as (v, t, x, u).
    Case(Value, Box<Comp>, Name, Box<Comp>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Value(Value),
    Comp(Comp),
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

    pub fn lam<S: Into<Name>>(params: Vec<(S, EcpsType)>, body: Comp) -> Value {
        Value::Lam(
            params.into_iter().map(|(x, t)| (x.into(), t)).collect(),
            Box::new(body),
        )
    }

    pub fn lam1(x: impl Into<Name>, ty: EcpsType, body: Comp) -> Value {
        Value::Lam(vec![(x.into(), ty)], Box::new(body))
    }

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

    pub fn size(&self) -> usize {
        match self {
            Value::Succ(v) => 1 + v.size(),
            Value::Lam(_, t) => 1 + t.size(),
            _ => 1,
        }
    }
}

impl Comp {
    pub fn app(f: Value, args: Vec<Value>) -> Comp {
        Comp::App(f, args)
    }

    pub fn app1(f: Value, arg: Value) -> Comp {
        Comp::App(f, vec![arg])
    }

    pub fn op(name: impl Into<Name>, v: Value, x: impl Into<Name>, body: Comp) -> Comp {
        Comp::Op(name.into(), v, x.into(), Box::new(body))
    }

    pub fn case(v: Value, zero: Comp, x: impl Into<Name>, succ: Comp) -> Comp {
        Comp::Case(v, Box::new(zero), x.into(), Box::new(succ))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_comp(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Comp::App(v, ws) => 1 + v.size() + ws.iter().map(Value::size).sum::<usize>(),
            Comp::MuApp(_, v, ws) => 1 + v.size() + ws.iter().map(Value::size).sum::<usize>(),
            Comp::Op(_, v, _, t) => 1 + v.size() + t.size(),
            Comp::Stop => 1,
            Comp::Case(v, t, _, u) => 1 + v.size() + t.size() + u.size(),
        }
    }
}

/// The diverging computation `(mu f. fun (x:nat) -> f(x))(zero)`.
pub fn loop_comp() -> Comp {
    Comp::MuApp(
        "f".into(),
        Value::lam1("x", EcpsType::Nat, Comp::app1(Value::var("f"), Value::var("x"))),
        vec![Value::Zero],
    )
}

fn fv_value(v: &Value, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match v {
        Value::Zero | Value::Star => {}
        Value::Succ(v) => fv_value(v, bound, out),
        Value::Lam(params, t) => {
            let n = bound.len();
            bound.extend(params.iter().map(|(x, _)| x.clone()));
            fv_comp(t, bound, out);
            bound.truncate(n);
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
        Comp::App(v, ws) => {
            fv_value(v, bound, out);
            ws.iter().for_each(|w| fv_value(w, bound, out));
        }
        Comp::MuApp(x, v, ws) => {
            bound.push(x.clone());
            fv_value(v, bound, out);
            bound.pop();
            ws.iter().for_each(|w| fv_value(w, bound, out));
        }
        Comp::Op(_, v, x, t) => {
            fv_value(v, bound, out);
            bound.push(x.clone());
            fv_comp(t, bound, out);
            bound.pop();
        }
        Comp::Stop => {}
        Comp::Case(v, t, x, u) => {
            fv_value(v, bound, out);
            fv_comp(t, bound, out);
            bound.push(x.clone());
            fv_comp(u, bound, out);
            bound.pop();
        }
    }
}

pub fn all_names_comp(c: &Comp, out: &mut BTreeSet<Name>) {
    match c {
        Comp::App(v, ws) => {
            all_names_value(v, out);
            ws.iter().for_each(|w| all_names_value(w, out));
        }
        Comp::MuApp(x, v, ws) => {
            out.insert(x.clone());
            all_names_value(v, out);
            ws.iter().for_each(|w| all_names_value(w, out));
        }
        Comp::Op(_, v, x, t) => {
            out.insert(x.clone());
            all_names_value(v, out);
            all_names_comp(t, out);
        }
        Comp::Stop => {}
        Comp::Case(v, t, x, u) => {
            out.insert(x.clone());
            all_names_value(v, out);
            all_names_comp(t, out);
            all_names_comp(u, out);
        }
    }
}

pub fn all_names_value(v: &Value, out: &mut BTreeSet<Name>) {
    match v {
        Value::Zero | Value::Star => {}
        Value::Succ(v) => all_names_value(v, out),
        Value::Lam(params, t) => {
            out.extend(params.iter().map(|(x, _)| x.clone()));
            all_names_comp(t, out);
        }
        Value::Var(x) => {
            out.insert(x.clone());
        }
    }
}
