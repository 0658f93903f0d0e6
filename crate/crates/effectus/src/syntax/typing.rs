//! Type checking for EPCF terms and stacks, and for ECPS terms.

use thiserror::Error;

use super::sig::{Arity, EffectSig};
use super::types::{EcpsType, EpcfType, TypeEnv};
use super::{ecps, epcf, Name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("rule ({rule}) fails at `{term}`: {reason}")]
    Rule {
        rule: &'static str,
        term: String,
        reason: String,
    },
    #[error("arity mismatch at `{term}`: expected {expected} argument(s), found {found}")]
    ArityMismatch {
        term: String,
        expected: usize,
        found: usize,
    },
    #[error("operation `{0}` is not in the signature")]
    UnknownOperation(Name),
}

fn rule_err(rule: &'static str, term: impl ToString, reason: impl Into<String>) -> TypeError {
    TypeError::Rule { rule, term: term.to_string(), reason: reason.into() }
}

/// What a well-formed ECPS term is given: values get a type, computations
/// are merely well formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EcpsJudgement {
    Value(EcpsType),
    Computation,
}

struct Scope<T> {
    vars: Vec<(Name, T)>,
}

impl<T: Clone> Scope<T> {
    fn from_env(env: &TypeEnv<T>) -> Self {
        Scope { vars: env.iter().map(|(x, t)| (x.clone(), t.clone())).collect() }
    }

    fn get(&self, x: &str) -> Result<T, TypeError> {
        self.vars
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| TypeError::UnboundVariable(x.to_string()))
    }

    fn with<R>(&mut self, x: &Name, t: T, f: impl FnOnce(&mut Self) -> R) -> R {
        self.vars.push((x.clone(), t));
        let r = f(self);
        self.vars.pop();
        r
    }
}

// ---------------------------------------------------------------- EPCF

pub fn typecheck_epcf(sig: &EffectSig, env: &TypeEnv<EpcfType>, term: &epcf::Term) -> Result<EpcfType, TypeError> {
    match term {
        epcf::Term::Value(v) => type_of_epcf_value(sig, env, v),
        epcf::Term::Comp(c) => type_of_epcf_comp(sig, env, c),
    }
}

pub fn type_of_epcf_value(sig: &EffectSig, env: &TypeEnv<EpcfType>, v: &epcf::Value) -> Result<EpcfType, TypeError> {
    ep_value(sig, &mut Scope::from_env(env), v)
}

pub fn type_of_epcf_comp(sig: &EffectSig, env: &TypeEnv<EpcfType>, c: &epcf::Comp) -> Result<EpcfType, TypeError> {
    ep_comp(sig, &mut Scope::from_env(env), c)
}

/// Given the type `hole` of the value the stack receives, returns
/// `(hole, result)` such that `Γ ⊢ S : hole ⇒ result`.
pub fn typecheck_stack(
    sig: &EffectSig,
    env: &TypeEnv<EpcfType>,
    stack: &epcf::Stack,
    hole: &EpcfType,
) -> Result<(EpcfType, EpcfType), TypeError> {
    let mut scope = Scope::from_env(env);
    let mut ty = hole.clone();
    for frame in stack.frames.iter().rev() {
        ty = scope.with(&frame.binder, ty, |s| ep_comp(sig, s, &frame.body))?;
    }
    Ok((hole.clone(), ty))
}

fn expect_nat(rule: &'static str, v: &epcf::Value, ty: &EpcfType) -> Result<(), TypeError> {
    if *ty == EpcfType::Nat {
        Ok(())
    } else {
        Err(rule_err(rule, v, format!("expected nat, found {ty}")))
    }
}

fn ep_value(sig: &EffectSig, sc: &mut Scope<EpcfType>, v: &epcf::Value) -> Result<EpcfType, TypeError> {
    use epcf::Value as V;
    match v {
        V::Star => Ok(EpcfType::Unit),
        V::Zero => Ok(EpcfType::Nat),
        V::Succ(w) => {
            let t = ep_value(sig, sc, w)?;
            expect_nat("succ", w, &t)?;
            Ok(EpcfType::Nat)
        }
        V::Var(x) => sc.get(x),
        V::Lam(x, dom, body) => {
            let cod = sc.with(x, dom.clone(), |s| ep_comp(sig, s, body))?;
            Ok(EpcfType::arrow(dom.clone(), cod))
        }
    }
}

fn check_op_form(sig: &EffectSig, name: &str, form: Arity, c: &epcf::Comp) -> Result<(), TypeError> {
    match sig.lookup(name) {
        None => Err(TypeError::UnknownOperation(name.to_string())),
        Some(None) => Ok(()),
        Some(Some(declared)) => {
            if declared == form || form == Arity::ParamInfinite {
                Ok(())
            } else {
                Err(rule_err("op", c, format!("operation `{name}` is declared at arity {declared:?}, used at {form:?}")))
            }
        }
    }
}

fn ep_comps_same(
    sig: &EffectSig,
    sc: &mut Scope<EpcfType>,
    ms: &[epcf::Comp],
    whole: &epcf::Comp,
) -> Result<EpcfType, TypeError> {
    let mut ty: Option<EpcfType> = None;
    for m in ms {
        let t = ep_comp(sig, sc, m)?;
        match &ty {
            None => ty = Some(t),
            Some(t0) if *t0 == t => {}
            Some(t0) => return Err(rule_err("op", whole, format!("arguments have types {t0} and {t}"))),
        }
    }
    ty.ok_or_else(|| rule_err("op", whole, "nullary operation: result type cannot be determined"))
}

fn ep_comp(sig: &EffectSig, sc: &mut Scope<EpcfType>, c: &epcf::Comp) -> Result<EpcfType, TypeError> {
    use epcf::{Comp as C, OpArgs as O};
    match c {
        C::App(v, w) => {
            let tv = ep_value(sig, sc, v)?;
            let tw = ep_value(sig, sc, w)?;
            match tv {
                EpcfType::Arrow(dom, cod) if *dom == tw => Ok(*cod),
                EpcfType::Arrow(dom, _) => Err(rule_err("app", c, format!("argument has type {tw}, expected {dom}"))),
                other => Err(rule_err("app", c, format!("applying a value of type {other}"))),
            }
        }
        C::Return(v) => ep_value(sig, sc, v),
        C::Let(m, x, n) => {
            let tm = ep_comp(sig, sc, m)?;
            sc.with(x, tm, |s| ep_comp(sig, s, n))
        }
        C::Fix(v) => {
            let tv = ep_value(sig, sc, v)?;
            match &tv {
                EpcfType::Arrow(a, b) if a == b && a.as_arrow().is_some() => Ok((**a).clone()),
                _ => Err(rule_err("fix", c, format!("expected (τ -> ρ) -> (τ -> ρ), found {tv}"))),
            }
        }
        C::Case(v, m, x, n) => {
            let tv = ep_value(sig, sc, v)?;
            expect_nat("case", v, &tv)?;
            let tm = ep_comp(sig, sc, m)?;
            let tn = sc.with(x, EpcfType::Nat, |s| ep_comp(sig, s, n))?;
            if tm == tn {
                Ok(tm)
            } else {
                Err(rule_err("case", c, format!("branches have types {tm} and {tn}")))
            }
        }
        C::Op(name, args) => match args {
            O::Plain(ms) => {
                check_op_form(sig, name, Arity::Finite(ms.len()), c)?;
                ep_comps_same(sig, sc, ms, c)
            }
            O::Param(v, ms) => {
                check_op_form(sig, name, Arity::ParamFinite(ms.len()), c)?;
                let tv = ep_value(sig, sc, v)?;
                expect_nat("op", v, &tv)?;
                ep_comps_same(sig, sc, ms, c)
            }
            O::Inf(w) => {
                check_op_form(sig, name, Arity::Infinite, c)?;
                op_fun_result(sig, sc, w, c)
            }
            O::ParamInf(v, w) => {
                check_op_form(sig, name, Arity::ParamInfinite, c)?;
                let tv = ep_value(sig, sc, v)?;
                expect_nat("op", v, &tv)?;
                op_fun_result(sig, sc, w, c)
            }
        },
    }
}

fn op_fun_result(
    sig: &EffectSig,
    sc: &mut Scope<EpcfType>,
    w: &epcf::Value,
    whole: &epcf::Comp,
) -> Result<EpcfType, TypeError> {
    match ep_value(sig, sc, w)? {
        EpcfType::Arrow(dom, cod) if *dom == EpcfType::Nat => Ok(*cod),
        other => Err(rule_err("op", whole, format!("expected nat -> τ, found {other}"))),
    }
}

// ---------------------------------------------------------------- ECPS

pub fn typecheck_ecps(sig: &EffectSig, env: &TypeEnv<EcpsType>, term: &ecps::Term) -> Result<EcpsJudgement, TypeError> {
    match term {
        ecps::Term::Value(v) => type_of_ecps_value(sig, env, v).map(EcpsJudgement::Value),
        ecps::Term::Comp(c) => check_ecps_comp(sig, env, c).map(|_| EcpsJudgement::Computation),
    }
}

pub fn type_of_ecps_value(sig: &EffectSig, env: &TypeEnv<EcpsType>, v: &ecps::Value) -> Result<EcpsType, TypeError> {
    ec_value(sig, &mut Scope::from_env(env), v)
}

pub fn check_ecps_comp(sig: &EffectSig, env: &TypeEnv<EcpsType>, c: &ecps::Comp) -> Result<(), TypeError> {
    ec_comp(sig, &mut Scope::from_env(env), c)
}

fn ec_value(sig: &EffectSig, sc: &mut Scope<EcpsType>, v: &ecps::Value) -> Result<EcpsType, TypeError> {
    use ecps::Value as V;
    match v {
        V::Star => Ok(EcpsType::Unit),
        V::Zero => Ok(EcpsType::Nat),
        V::Succ(w) => match ec_value(sig, sc, w)? {
            EcpsType::Nat => Ok(EcpsType::Nat),
            other => Err(rule_err("succ", w, format!("expected nat, found {other}"))),
        },
        V::Var(x) => sc.get(x),
        V::Lam(params, body) => {
            let n = sc.vars.len();
            for (x, t) in params {
                sc.vars.push((x.clone(), t.clone()));
            }
            let r = ec_comp(sig, sc, body);
            sc.vars.truncate(n);
            r?;
            Ok(EcpsType::Neg(params.iter().map(|(_, t)| t.clone()).collect()))
        }
    }
}

fn ec_args(
    sig: &EffectSig,
    sc: &mut Scope<EcpsType>,
    expected: &[EcpsType],
    args: &[ecps::Value],
    rule: &'static str,
    whole: &ecps::Comp,
) -> Result<(), TypeError> {
    if expected.len() != args.len() {
        return Err(TypeError::ArityMismatch {
            term: whole.to_string(),
            expected: expected.len(),
            found: args.len(),
        });
    }
    for (i, (a, w)) in expected.iter().zip(args).enumerate() {
        let tw = ec_value(sig, sc, w)?;
        if tw != *a {
            return Err(rule_err(rule, whole, format!("argument {i} has type {tw}, expected {a}")));
        }
    }
    Ok(())
}

fn ec_comp(sig: &EffectSig, sc: &mut Scope<EcpsType>, c: &ecps::Comp) -> Result<(), TypeError> {
    use ecps::Comp as C;
    match c {
        C::App(v, ws) => match ec_value(sig, sc, v)? {
            EcpsType::Neg(args) => ec_args(sig, sc, &args, ws, "app", c),
            other => Err(rule_err("app", c, format!("applying a value of type {other}"))),
        },
        C::MuApp(x, v, ws) => {
            let arg_types = match v {
                ecps::Value::Lam(params, _) => params.iter().map(|(_, t)| t.clone()).collect(),
                _ => ws.iter().map(|w| ec_value(sig, sc, w)).collect::<Result<Vec<_>, _>>()?,
            };
            let self_ty = EcpsType::Neg(arg_types.clone());
            let tv = sc.with(x, self_ty.clone(), |s| ec_value(sig, s, v))?;
            if tv != self_ty {
                return Err(rule_err("mu", c, format!("recursive body has type {tv}, expected {self_ty}")));
            }
            ec_args(sig, sc, &arg_types, ws, "mu", c)
        }
        C::Op(name, v, x, t) => {
            if !sig.contains(name) {
                return Err(TypeError::UnknownOperation(name.clone()));
            }
            match ec_value(sig, sc, v)? {
                EcpsType::Nat => {}
                other => return Err(rule_err("op", c, format!("parameter has type {other}, expected nat"))),
            }
            sc.with(x, EcpsType::Nat, |s| ec_comp(sig, s, t))
        }
        C::Stop => Ok(()),
        C::Case(v, t, x, u) => {
            match ec_value(sig, sc, v)? {
                EcpsType::Nat => {}
                other => return Err(rule_err("case", c, format!("scrutinee has type {other}, expected nat"))),
            }
            ec_comp(sig, sc, t)?;
            sc.with(x, EcpsType::Nat, |s| ec_comp(sig, s, u))
        }
    }
}
