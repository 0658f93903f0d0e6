//! Capture-avoiding simultaneous substitution of values for variables.
//!
//! When every substituted value is closed (the only case the evaluators
//! need) no binder is ever renamed.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use super::fresh::NameSupply;
use super::{ecps, epcf, Name};

// Values are shared so that entering a binder copies pointers, not terms.
struct Ctx<V> {
    map: BTreeMap<Name, Rc<V>>,
    fvs: Rc<BTreeSet<Name>>,
}

impl<V> Ctx<V> {
    fn new(map: &BTreeMap<Name, V>, fvs: BTreeSet<Name>) -> Ctx<V>
    where
        V: Clone,
    {
        Ctx { map: map.iter().map(|(x, v)| (x.clone(), Rc::new(v.clone()))).collect(), fvs: Rc::new(fvs) }
    }

    fn get(&self, x: &str) -> Option<V>
    where
        V: Clone,
    {
        self.map.get(x).map(|v| V::clone(v))
    }
}

/// Renames under a binder when needed; returns `None` when nothing is left
/// to substitute below it.
fn under_binder<V: Clone>(
    ctx: &Ctx<V>,
    x: &Name,
    supply: &mut Option<NameSupply>,
    mk_var: impl Fn(Name) -> V,
    seed: impl FnOnce() -> BTreeSet<Name>,
) -> Option<(Name, Ctx<V>)> {
    let mut map = ctx.map.clone();
    map.remove(x);
    if map.is_empty() {
        return None;
    }
    if ctx.fvs.contains(x) {
        let supply = supply.get_or_insert_with(|| {
            let mut seeds: BTreeSet<Name> = ctx.fvs.iter().cloned().collect();
            seeds.extend(ctx.map.keys().cloned());
            NameSupply::avoiding(seeds)
        });
        for n in seed() {
            supply.avoid(&n);
        }
        let y = supply.fresh(x);
        map.insert(x.clone(), Rc::new(mk_var(y.clone())));
        Some((y, Ctx { map, fvs: ctx.fvs.clone() }))
    } else {
        Some((x.clone(), Ctx { map, fvs: ctx.fvs.clone() }))
    }
}

// ---------------------------------------------------------------- EPCF

pub fn subst_epcf_comp(c: &epcf::Comp, map: &BTreeMap<Name, epcf::Value>) -> epcf::Comp {
    let fvs = map.values().flat_map(|v| v.free_vars()).collect();
    let ctx = Ctx::new(map, fvs);
    let mut supply = None;
    ep_comp(c, &ctx, &mut supply)
}

pub fn subst_epcf_value(v: &epcf::Value, map: &BTreeMap<Name, epcf::Value>) -> epcf::Value {
    let fvs = map.values().flat_map(|v| v.free_vars()).collect();
    let ctx = Ctx::new(map, fvs);
    let mut supply = None;
    ep_value(v, &ctx, &mut supply)
}

/// `c[v/x]`.
pub fn subst1_epcf(c: &epcf::Comp, x: &str, v: &epcf::Value) -> epcf::Comp {
    let mut map = BTreeMap::new();
    map.insert(x.to_string(), v.clone());
    subst_epcf_comp(c, &map)
}

pub fn subst_epcf(term: &epcf::Term, map: &BTreeMap<Name, epcf::Value>) -> epcf::Term {
    match term {
        epcf::Term::Value(v) => epcf::Term::Value(subst_epcf_value(v, map)),
        epcf::Term::Comp(c) => epcf::Term::Comp(subst_epcf_comp(c, map)),
    }
}

fn ep_seed_comp(c: &epcf::Comp) -> BTreeSet<Name> {
    let mut s = BTreeSet::new();
    epcf::all_names_comp(c, &mut s);
    s
}

fn ep_value(v: &epcf::Value, ctx: &Ctx<epcf::Value>, sup: &mut Option<NameSupply>) -> epcf::Value {
    use epcf::Value as V;
    match v {
        V::Star | V::Zero => v.clone(),
        V::Succ(w) => V::Succ(Box::new(ep_value(w, ctx, sup))),
        V::Var(x) => ctx.get(x).unwrap_or_else(|| v.clone()),
        V::Lam(x, ty, body) => match under_binder(ctx, x, sup, V::Var, || ep_seed_comp(body)) {
            None => v.clone(),
            Some((y, inner)) => V::Lam(y, ty.clone(), Box::new(ep_comp(body, &inner, sup))),
        },
    }
}

fn ep_bound(
    x: &Name,
    body: &epcf::Comp,
    ctx: &Ctx<epcf::Value>,
    sup: &mut Option<NameSupply>,
) -> (Name, epcf::Comp) {
    match under_binder(ctx, x, sup, epcf::Value::Var, || ep_seed_comp(body)) {
        None => (x.clone(), body.clone()),
        Some((y, inner)) => (y, ep_comp(body, &inner, sup)),
    }
}

fn ep_comp(c: &epcf::Comp, ctx: &Ctx<epcf::Value>, sup: &mut Option<NameSupply>) -> epcf::Comp {
    use epcf::{Comp as C, OpArgs};
    match c {
        C::App(v, w) => C::App(ep_value(v, ctx, sup), ep_value(w, ctx, sup)),
        C::Return(v) => C::Return(ep_value(v, ctx, sup)),
        C::Fix(v) => C::Fix(ep_value(v, ctx, sup)),
        C::Let(m, x, n) => {
            let m = ep_comp(m, ctx, sup);
            let (y, n) = ep_bound(x, n, ctx, sup);
            C::Let(Box::new(m), y, Box::new(n))
        }
        C::Case(v, m, x, n) => {
            let v = ep_value(v, ctx, sup);
            let m = ep_comp(m, ctx, sup);
            let (y, n) = ep_bound(x, n, ctx, sup);
            C::Case(v, Box::new(m), y, Box::new(n))
        }
        C::Op(name, args) => {
            let args = match args {
                OpArgs::Plain(ms) => OpArgs::Plain(ms.iter().map(|m| ep_comp(m, ctx, sup)).collect()),
                OpArgs::Param(v, ms) => OpArgs::Param(
                    ep_value(v, ctx, sup),
                    ms.iter().map(|m| ep_comp(m, ctx, sup)).collect(),
                ),
                OpArgs::Inf(w) => OpArgs::Inf(ep_value(w, ctx, sup)),
                OpArgs::ParamInf(v, w) => OpArgs::ParamInf(ep_value(v, ctx, sup), ep_value(w, ctx, sup)),
            };
            C::Op(name.clone(), args)
        }
    }
}

// ---------------------------------------------------------------- ECPS

pub fn subst_ecps_comp(c: &ecps::Comp, map: &BTreeMap<Name, ecps::Value>) -> ecps::Comp {
    let fvs = map.values().flat_map(|v| v.free_vars()).collect();
    let ctx = Ctx::new(map, fvs);
    let mut supply = None;
    ec_comp(c, &ctx, &mut supply)
}

pub fn subst_ecps_value(v: &ecps::Value, map: &BTreeMap<Name, ecps::Value>) -> ecps::Value {
    let fvs = map.values().flat_map(|v| v.free_vars()).collect();
    let ctx = Ctx::new(map, fvs);
    let mut supply = None;
    ec_value(v, &ctx, &mut supply)
}

pub fn subst1_ecps(c: &ecps::Comp, x: &str, v: &ecps::Value) -> ecps::Comp {
    let mut map = BTreeMap::new();
    map.insert(x.to_string(), v.clone());
    subst_ecps_comp(c, &map)
}

pub fn subst_ecps(term: &ecps::Term, map: &BTreeMap<Name, ecps::Value>) -> ecps::Term {
    match term {
        ecps::Term::Value(v) => ecps::Term::Value(subst_ecps_value(v, map)),
        ecps::Term::Comp(c) => ecps::Term::Comp(subst_ecps_comp(c, map)),
    }
}

fn ec_seed_comp(c: &ecps::Comp) -> BTreeSet<Name> {
    let mut s = BTreeSet::new();
    ecps::all_names_comp(c, &mut s);
    s
}

fn ec_seed_value(v: &ecps::Value) -> BTreeSet<Name> {
    let mut s = BTreeSet::new();
    ecps::all_names_value(v, &mut s);
    s
}

fn ec_value(v: &ecps::Value, ctx: &Ctx<ecps::Value>, sup: &mut Option<NameSupply>) -> ecps::Value {
    use ecps::Value as V;
    match v {
        V::Star | V::Zero => v.clone(),
        V::Succ(w) => V::Succ(Box::new(ec_value(w, ctx, sup))),
        V::Var(x) => ctx.get(x).unwrap_or_else(|| v.clone()),
        V::Lam(params, body) => {
            // Binders of one lambda are handled left to right; each may shadow
            // or be renamed independently.
            let mut cur = Ctx { map: ctx.map.clone(), fvs: ctx.fvs.clone() };
            let mut new_params = Vec::with_capacity(params.len());
            let mut live = true;
            for (x, ty) in params {
                if !live {
                    new_params.push((x.clone(), ty.clone()));
                    continue;
                }
                match under_binder(&cur, x, sup, V::Var, || ec_seed_comp(body)) {
                    None => {
                        live = false;
                        new_params.push((x.clone(), ty.clone()));
                    }
                    Some((y, inner)) => {
                        new_params.push((y, ty.clone()));
                        cur = inner;
                    }
                }
            }
            if !live {
                // Remaining substitution is empty, but earlier renamings must
                // still be applied to the body.
                let renames: BTreeMap<Name, Rc<V>> = params
                    .iter()
                    .zip(new_params.iter())
                    .filter(|((x, _), (y, _))| x != y)
                    .map(|((x, _), (y, _))| (x.clone(), Rc::new(V::Var(y.clone()))))
                    .collect();
                if renames.is_empty() {
                    return V::Lam(new_params, body.clone());
                }
                let inner = Ctx { map: renames, fvs: Rc::new(BTreeSet::new()) };
                return V::Lam(new_params, Box::new(ec_comp(body, &inner, sup)));
            }
            V::Lam(new_params, Box::new(ec_comp(body, &cur, sup)))
        }
    }
}

fn ec_comp(c: &ecps::Comp, ctx: &Ctx<ecps::Value>, sup: &mut Option<NameSupply>) -> ecps::Comp {
    use ecps::Comp as C;
    match c {
        C::App(v, ws) => C::App(
            ec_value(v, ctx, sup),
            ws.iter().map(|w| ec_value(w, ctx, sup)).collect(),
        ),
        C::MuApp(x, v, ws) => {
            let ws = ws.iter().map(|w| ec_value(w, ctx, sup)).collect();
            match under_binder(ctx, x, sup, ecps::Value::Var, || ec_seed_value(v)) {
                None => C::MuApp(x.clone(), v.clone(), ws),
                Some((y, inner)) => C::MuApp(y, ec_value(v, &inner, sup), ws),
            }
        }
        C::Op(name, v, x, t) => {
            let v = ec_value(v, ctx, sup);
            match under_binder(ctx, x, sup, ecps::Value::Var, || ec_seed_comp(t)) {
                None => C::Op(name.clone(), v, x.clone(), t.clone()),
                Some((y, inner)) => C::Op(name.clone(), v, y, Box::new(ec_comp(t, &inner, sup))),
            }
        }
        C::Stop => C::Stop,
        C::Case(v, t, x, u) => {
            let v = ec_value(v, ctx, sup);
            let t = ec_comp(t, ctx, sup);
            match under_binder(ctx, x, sup, ecps::Value::Var, || ec_seed_comp(u)) {
                None => C::Case(v, Box::new(t), x.clone(), u.clone()),
                Some((y, inner)) => C::Case(v, Box::new(t), y, Box::new(ec_comp(u, &inner, sup))),
            }
        }
    }
}
