//! Arity normalization and the typed CPS translation into ECPS.

pub mod gen;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{ecps_tree, epcf_tree, StepError};
use crate::syntax::fresh::NameSupply;
use crate::syntax::typing::{type_of_epcf_comp, type_of_epcf_value, typecheck_stack, TypeError};
use crate::syntax::{ecps, epcf, EcpsType, EffectSig, EpcfType, Name, TypeEnv};
use crate::trees::{relabel_values, tree_compatible_to, Compat, TreeApprox, TreeParams};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CpsError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Step(#[from] StepError),
}

fn names_of_comp(c: &epcf::Comp) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    epcf::all_names_comp(c, &mut out);
    out
}

fn names_of_stack(s: &epcf::Stack) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for f in &s.frames {
        out.insert(f.binder.clone());
        epcf::all_names_comp(&f.body, &mut out);
    }
    out
}

// ------------------------------------------------------------ normalization

/// `let x = fix (fun (f:nat->τ) -> return f) in x zero`, a diverging
/// computation of type τ.
pub fn epcf_loop(ty: &EpcfType, supply: &mut NameSupply) -> epcf::Comp {
    use epcf::{Comp as C, Value as V};
    let f = supply.fresh("f");
    let x = supply.fresh("x");
    let arrow = EpcfType::arrow(EpcfType::Nat, ty.clone());
    C::let_in(C::Fix(V::lam(f.clone(), arrow, C::Return(V::var(f)))), x.clone(), C::App(V::var(x), V::Zero))
}

struct Normalizer<'a> {
    sig: &'a EffectSig,
    supply: NameSupply,
    env: TypeEnv<EpcfType>,
}

impl Normalizer<'_> {
    fn value(&mut self, v: &epcf::Value) -> Result<epcf::Value, TypeError> {
        use epcf::Value as V;
        Ok(match v {
            V::Succ(w) => V::Succ(Box::new(self.value(w)?)),
            V::Lam(x, t, m) => {
                let body = self.under(x, t.clone(), m)?;
                V::Lam(x.clone(), t.clone(), Box::new(body))
            }
            other => other.clone(),
        })
    }

    fn under(&mut self, x: &Name, t: EpcfType, m: &epcf::Comp) -> Result<epcf::Comp, TypeError> {
        let saved = self.env.clone();
        self.env.insert(x.clone(), t);
        let r = self.comp(m);
        self.env = saved;
        r
    }

    /// `λx:ℕ. case x of {zero -> M₀ | succ x₁ -> case x₁ of {… | succ xₙ -> loop}}`.
    fn wrapper(&mut self, ms: &[epcf::Comp], ty: &EpcfType) -> epcf::Value {
        use epcf::{Comp as C, Value as V};
        let names: Vec<Name> = (0..=ms.len()).map(|_| self.supply.fresh("x")).collect();
        let mut body = epcf_loop(ty, &mut self.supply);
        for (i, m) in ms.iter().enumerate().rev() {
            body = C::case(V::var(names[i].clone()), m.clone(), names[i + 1].clone(), body);
        }
        V::lam(names[0].clone(), EpcfType::Nat, body)
    }

    fn comp(&mut self, c: &epcf::Comp) -> Result<epcf::Comp, TypeError> {
        use epcf::{Comp as C, OpArgs as O, Value as V};
        Ok(match c {
            C::App(v, w) => C::App(self.value(v)?, self.value(w)?),
            C::Return(v) => C::Return(self.value(v)?),
            C::Let(m, x, n) => {
                let tm = type_of_epcf_comp(self.sig, &self.env, m)?;
                let m2 = self.comp(m)?;
                let n2 = self.under(x, tm, n)?;
                C::Let(Box::new(m2), x.clone(), Box::new(n2))
            }
            C::Fix(v) => C::Fix(self.value(v)?),
            C::Case(v, m, x, n) => {
                let v2 = self.value(v)?;
                let m2 = self.comp(m)?;
                let n2 = self.under(x, EpcfType::Nat, n)?;
                C::Case(v2, Box::new(m2), x.clone(), Box::new(n2))
            }
            C::Op(name, args) => {
                let ty = type_of_epcf_comp(self.sig, &self.env, c)?;
                let args = match args {
                    O::Plain(ms) => {
                        let ms = ms.iter().map(|m| self.comp(m)).collect::<Result<Vec<_>, _>>()?;
                        O::ParamInf(V::Zero, self.wrapper(&ms, &ty))
                    }
                    O::Param(v, ms) => {
                        let v = self.value(v)?;
                        let ms = ms.iter().map(|m| self.comp(m)).collect::<Result<Vec<_>, _>>()?;
                        O::ParamInf(v, self.wrapper(&ms, &ty))
                    }
                    O::Inf(w) => O::ParamInf(V::Zero, self.value(w)?),
                    O::ParamInf(v, w) => O::ParamInf(self.value(v)?, self.value(w)?),
                };
                C::Op(name.clone(), args)
            }
        })
    }
}

/// Rewrites every operation to the `σ(V; W)` form.
pub fn normalize_arities(sig: &EffectSig, env: &TypeEnv<EpcfType>, m: &epcf::Comp) -> Result<epcf::Comp, TypeError> {
    type_of_epcf_comp(sig, env, m)?;
    let mut names = names_of_comp(m);
    names.extend(env.names());
    let mut n = Normalizer { sig, supply: NameSupply::avoiding(names), env: env.clone() };
    n.comp(m)
}

pub fn normalize_value(sig: &EffectSig, env: &TypeEnv<EpcfType>, v: &epcf::Value) -> Result<epcf::Value, TypeError> {
    type_of_epcf_value(sig, env, v)?;
    let mut names = BTreeSet::new();
    epcf::all_names_value(v, &mut names);
    names.extend(env.names());
    let mut n = Normalizer { sig, supply: NameSupply::avoiding(names), env: env.clone() };
    n.value(v)
}

/// Normalizes every frame body; `hole` is the type the stack receives.
pub fn normalize_stack(
    sig: &EffectSig,
    env: &TypeEnv<EpcfType>,
    s: &epcf::Stack,
    hole: &EpcfType,
) -> Result<epcf::Stack, TypeError> {
    let mut ty = hole.clone();
    let mut frames = Vec::with_capacity(s.frames.len());
    for fr in s.frames.iter().rev() {
        let inner = env.extended(&fr.binder, ty.clone());
        let body = normalize_arities(sig, &inner, &fr.body)?;
        ty = type_of_epcf_comp(sig, &inner, &fr.body)?;
        frames.push(epcf::Frame { binder: fr.binder.clone(), body });
    }
    frames.reverse();
    Ok(epcf::Stack { frames })
}

// ------------------------------------------------------------ translation

/// `ℕ* = nat`, `𝟙* = unit`, `(ρ→τ)* = ¬(ρ*, ¬τ*)`.
pub fn cps_type(t: &EpcfType) -> EcpsType {
    match t {
        EpcfType::Unit => EcpsType::Unit,
        EpcfType::Nat => EcpsType::Nat,
        EpcfType::Arrow(a, b) => EcpsType::Neg(vec![cps_type(a), EcpsType::neg1(cps_type(b))]),
    }
}

pub fn cps_env(env: &TypeEnv<EpcfType>) -> TypeEnv<EcpsType> {
    TypeEnv::from_pairs(env.iter().map(|(x, t)| (x.clone(), cps_type(t))))
}

/// `¬(¬τ*)`, the type of a translated computation of type τ.
pub fn cps_comp_type(t: &EpcfType) -> EcpsType {
    EcpsType::neg1(EcpsType::neg1(cps_type(t)))
}

pub struct Translator<'a> {
    sig: &'a EffectSig,
    supply: NameSupply,
}

impl<'a> Translator<'a> {
    /// Fresh names avoid everything in `avoid`.
    pub fn new(sig: &'a EffectSig, avoid: BTreeSet<Name>) -> Translator<'a> {
        Translator { sig, supply: NameSupply::avoiding(avoid) }
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.supply.fresh(base)
    }

    pub fn value(&mut self, env: &TypeEnv<EpcfType>, v: &epcf::Value) -> Result<(ecps::Value, EpcfType), TypeError> {
        use ecps::{Comp as CC, Value as CV};
        use epcf::Value as V;
        Ok(match v {
            V::Star => (CV::Star, EpcfType::Unit),
            V::Zero => (CV::Zero, EpcfType::Nat),
            V::Succ(w) => {
                let (w2, _) = self.value(env, w)?;
                (CV::Succ(Box::new(w2)), EpcfType::Nat)
            }
            V::Var(x) => {
                let t = env.get(x).cloned().ok_or_else(|| TypeError::UnboundVariable(x.clone()))?;
                (CV::Var(x.clone()), t)
            }
            V::Lam(x, rho, m) => {
                let inner = env.extended(x, rho.clone());
                let (m2, tau) = self.comp(&inner, m)?;
                let k = self.fresh("k");
                let body = CC::app1(m2, CV::var(k.clone()));
                let params = vec![(x.clone(), cps_type(rho)), (k, EcpsType::neg1(cps_type(&tau)))];
                (CV::Lam(params, Box::new(body)), EpcfType::arrow(rho.clone(), tau))
            }
        })
    }

    pub fn comp(&mut self, env: &TypeEnv<EpcfType>, c: &epcf::Comp) -> Result<(ecps::Value, EpcfType), TypeError> {
        use ecps::{Comp as CC, Value as CV};
        use epcf::{Comp as C, OpArgs as O};
        let kont = |k: &Name, tau: &EpcfType, body: CC| CV::lam1(k.clone(), EcpsType::neg1(cps_type(tau)), body);
        Ok(match c {
            C::App(v, w) => {
                let (v2, tv) = self.value(env, v)?;
                let (w2, _) = self.value(env, w)?;
                let tau = match tv {
                    EpcfType::Arrow(_, cod) => *cod,
                    other => return Err(TypeError::Rule { rule: "app", term: c.to_string(), reason: format!("applying {other}") }),
                };
                let k = self.fresh("k");
                (kont(&k, &tau, CC::app(v2, vec![w2, CV::var(k.clone())])), tau)
            }
            C::Return(v) => {
                let (v2, tau) = self.value(env, v)?;
                let k = self.fresh("k");
                (kont(&k, &tau, CC::app1(CV::var(k.clone()), v2)), tau)
            }
            C::Let(m, x, n) => {
                let (m2, rho) = self.comp(env, m)?;
                let inner = env.extended(x, rho.clone());
                let (n2, tau) = self.comp(&inner, n)?;
                let k = self.fresh("k");
                let cont = CV::lam1(x.clone(), cps_type(&rho), CC::app1(n2, CV::var(k.clone())));
                (kont(&k, &tau, CC::app1(m2, cont)), tau)
            }
            C::Fix(f) => {
                let (f2, tf) = self.value(env, f)?;
                let (tau, rho) = match tf.as_arrow().and_then(|(a, _)| a.as_arrow()) {
                    Some((a, b)) => (a.clone(), b.clone()),
                    None => return Err(TypeError::Rule { rule: "fix", term: c.to_string(), reason: format!("type {tf}") }),
                };
                let fun = EpcfType::arrow(tau.clone(), rho.clone());
                (self.fix_clause(f2, &tau, &rho), fun)
            }
            C::Case(v, m, x, n) => {
                let (v2, _) = self.value(env, v)?;
                let (m2, tau) = self.comp(env, m)?;
                let inner = env.extended(x, EpcfType::Nat);
                let (n2, _) = self.comp(&inner, n)?;
                let k = self.fresh("k");
                let body = CC::case(v2, CC::app1(m2, CV::var(k.clone())), x.clone(), CC::app1(n2, CV::var(k.clone())));
                (kont(&k, &tau, body), tau)
            }
            C::Op(name, O::ParamInf(v, w)) => {
                let (v2, _) = self.value(env, v)?;
                let (w2, tw) = self.value(env, w)?;
                let tau = match tw {
                    EpcfType::Arrow(_, cod) => *cod,
                    other => return Err(TypeError::Rule { rule: "op", term: c.to_string(), reason: format!("continuation of type {other}") }),
                };
                let _ = self.sig;
                let k = self.fresh("k");
                let x = self.fresh("x");
                let body = CC::op(name.clone(), v2, x.clone(), CC::app(w2, vec![CV::var(x), CV::var(k.clone())]));
                (kont(&k, &tau, body), tau)
            }
            C::Op(..) => {
                return Err(TypeError::Rule {
                    rule: "op",
                    term: c.to_string(),
                    reason: "operation must be arity-normalized before translation".into(),
                })
            }
        })
    }

    /// The translation of `fix F` at `F : (τ→ρ) → (τ→ρ)`.
    fn fix_clause(&mut self, f: ecps::Value, tau: &EpcfType, rho: &EpcfType) -> ecps::Value {
        use ecps::{Comp as CC, Value as CV};
        let ts = cps_type(tau);
        let nr = EcpsType::neg1(cps_type(rho));
        let fun = EcpsType::Neg(vec![ts.clone(), nr.clone()]);
        let nfun = EcpsType::neg1(fun.clone());
        let v = CV::var;

        let k = self.fresh("k");
        let x = self.fresh("x");
        let c = self.fresh("c");
        let x1 = self.fresh("x'");
        let k1 = self.fresh("k'");
        let k2 = self.fresh("k''");
        let l = self.fresh("l");
        let y = self.fresh("y");
        let l1 = self.fresh("l'");
        let p = self.fresh("p");
        let z = self.fresh("z");
        let p1 = self.fresh("p'");
        let w = self.fresh("w");
        let l2 = self.fresh("l''");

        // λ(y, l'). (λp. x(λz. (λp'. z(y, p'))(p)))(l')
        let call_z = CV::lam1(p1.clone(), nr.clone(), CC::app(v(z.clone()), vec![v(y.clone()), v(p1)]));
        let recur = CV::lam1(z, fun.clone(), CC::app1(call_z, v(p.clone())));
        let delayed = CV::lam1(p, nr.clone(), CC::app1(v(x.clone()), recur));
        let h = CV::Lam(vec![(y, ts.clone()), (l1.clone(), nr.clone())], Box::new(CC::app1(delayed, v(l1))));
        // (λl. F*(H, l)) (λw. (λl''. w(x', l''))(k''))
        let apply_f = CV::lam1(l.clone(), nfun.clone(), CC::app(f, vec![h, v(l)]));
        let call_w = CV::lam1(l2.clone(), nr.clone(), CC::app(v(w.clone()), vec![v(x1.clone()), v(l2)]));
        let then_w = CV::lam1(w, fun.clone(), CC::app1(call_w, v(k2.clone())));
        let body = CC::app1(apply_f, then_w);
        // λ(x', k'). (λk''. BODY)(k')
        let g = CV::Lam(
            vec![(x1, ts), (k1.clone(), nr.clone())],
            Box::new(CC::app1(CV::lam1(k2, nr, body), v(k1))),
        );
        let mu_body = CV::lam1(c.clone(), nfun.clone(), CC::app1(v(c), g));
        CV::lam1(k.clone(), nfun, CC::MuApp(x, mu_body, vec![v(k)]))
    }

    /// `id* = λx:ρ*.stop`, `(S∘let (−)=x in M)* = λx:τ*. M* S*`.
    pub fn stack(
        &mut self,
        env: &TypeEnv<EpcfType>,
        s: &epcf::Stack,
        hole: &EpcfType,
    ) -> Result<(ecps::Value, EpcfType), TypeError> {
        use ecps::{Comp as CC, Value as CV};
        // hole types of each frame, innermost first
        let mut holes = Vec::with_capacity(s.frames.len());
        let mut ty = hole.clone();
        for fr in s.frames.iter().rev() {
            holes.push(ty.clone());
            ty = type_of_epcf_comp(self.sig, &env.extended(&fr.binder, ty.clone()), &fr.body)?;
        }
        let result = ty;
        let x = self.fresh("x");
        let mut k = CV::lam1(x, cps_type(&result), CC::Stop);
        for (fr, h) in s.frames.iter().zip(holes.iter().rev()) {
            let (m2, _) = self.comp(&env.extended(&fr.binder, h.clone()), &fr.body)?;
            k = CV::lam1(fr.binder.clone(), cps_type(h), CC::app1(m2, k));
        }
        Ok((k, result))
    }
}

fn translator_for<'a>(sig: &'a EffectSig, env: &TypeEnv<EpcfType>, names: BTreeSet<Name>) -> Translator<'a> {
    let mut avoid = names;
    avoid.extend(env.names());
    Translator::new(sig, avoid)
}

pub fn cps_value(sig: &EffectSig, env: &TypeEnv<EpcfType>, v: &epcf::Value) -> Result<ecps::Value, TypeError> {
    let mut names = BTreeSet::new();
    epcf::all_names_value(v, &mut names);
    Ok(translator_for(sig, env, names).value(env, v)?.0)
}

pub fn cps_comp(sig: &EffectSig, env: &TypeEnv<EpcfType>, m: &epcf::Comp) -> Result<ecps::Value, TypeError> {
    Ok(translator_for(sig, env, names_of_comp(m)).comp(env, m)?.0)
}

pub fn cps_stack(
    sig: &EffectSig,
    env: &TypeEnv<EpcfType>,
    s: &epcf::Stack,
    hole: &EpcfType,
) -> Result<ecps::Value, TypeError> {
    Ok(translator_for(sig, env, names_of_stack(s)).stack(env, s, hole)?.0)
}

/// `M* S*`, the continuation-passing program for a configuration. The
/// configuration must already be arity-normalized.
pub fn cps_config(sig: &EffectSig, s: &epcf::Stack, m: &epcf::Comp) -> Result<ecps::Comp, TypeError> {
    let env = TypeEnv::new();
    let mut names = names_of_comp(m);
    names.extend(names_of_stack(s));
    let mut tr = translator_for(sig, &env, names);
    let (m2, tau) = tr.comp(&env, m)?;
    let (s2, _) = tr.stack(&env, s, &tau)?;
    Ok(ecps::Comp::app1(m2, s2))
}

// ------------------------------------------------------------ checking

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CheckConfig {
    pub epcf_budget: u64,
    pub cps_budget: u64,
    pub depth: usize,
    pub width: usize,
}

impl CheckConfig {
    pub fn new(epcf_budget: u64, depth: usize, width: usize) -> CheckConfig {
        CheckConfig { epcf_budget, cps_budget: epcf_budget * 8, depth, width }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationReport {
    pub stack: String,
    pub comp: String,
    pub config: CheckConfig,
    pub result: Compat,
    #[serde(skip)]
    pub epcf_tree: TreeApprox,
    #[serde(skip)]
    pub ecps_tree: TreeApprox,
}

/// Compares the relabelled tree of `(S, M)` with the tree of `M* S*`.
pub fn check_cps_correct(
    sig: &EffectSig,
    m: &epcf::Comp,
    s: &epcf::Stack,
    cfg: CheckConfig,
) -> Result<TranslationReport, CpsError> {
    let env = TypeEnv::new();
    let tau = type_of_epcf_comp(sig, &env, m)?;
    typecheck_stack(sig, &env, s, &tau)?;
    let m2 = normalize_arities(sig, &env, m)?;
    let s2 = normalize_stack(sig, &env, s, &tau)?;
    let params = TreeParams { depth: cfg.depth, width: cfg.width };
    let left = relabel_values(&epcf_tree(&s2, &m2, cfg.epcf_budget, params)?);
    let program = cps_config(sig, &s2, &m2)?;
    let right = ecps_tree(&program, cfg.cps_budget, params)?;
    let result = tree_compatible_to(&left, &right, cfg.depth).expect("same parameters");
    Ok(TranslationReport {
        stack: s.to_string(),
        comp: m.to_string(),
        config: cfg,
        result,
        epcf_tree: left,
        ecps_tree: right,
    })
}
