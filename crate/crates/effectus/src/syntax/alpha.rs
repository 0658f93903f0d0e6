//! Equality up to consistent renaming of bound variables.

use super::{ecps, epcf, Name};

/// Pairs of binders currently in scope, innermost last.
struct Scope<'a> {
    pairs: Vec<(&'a Name, &'a Name)>,
}

impl<'a> Scope<'a> {
    fn var_eq(&self, x: &Name, y: &Name) -> bool {
        for (a, b) in self.pairs.iter().rev() {
            let hit_l = *a == x;
            let hit_r = *b == y;
            if hit_l || hit_r {
                return hit_l && hit_r;
            }
        }
        x == y
    }
}

pub fn alpha_eq_epcf(a: &epcf::Term, b: &epcf::Term) -> bool {
    match (a, b) {
        (epcf::Term::Value(v), epcf::Term::Value(w)) => alpha_eq_epcf_value(v, w),
        (epcf::Term::Comp(m), epcf::Term::Comp(n)) => alpha_eq_epcf_comp(m, n),
        _ => false,
    }
}

pub fn alpha_eq_epcf_value(a: &epcf::Value, b: &epcf::Value) -> bool {
    ep_value(a, b, &mut Scope { pairs: Vec::new() })
}

pub fn alpha_eq_epcf_comp(a: &epcf::Comp, b: &epcf::Comp) -> bool {
    ep_comp(a, b, &mut Scope { pairs: Vec::new() })
}

/// Configurations are compared frame by frame; each frame binds its own
/// variable over its own body only.
pub fn alpha_eq_epcf_config(s1: &epcf::Stack, m1: &epcf::Comp, s2: &epcf::Stack, m2: &epcf::Comp) -> bool {
    s1.frames.len() == s2.frames.len()
        && alpha_eq_epcf_comp(m1, m2)
        && s1.frames.iter().zip(&s2.frames).all(|(f, g)| {
            let mut sc = Scope { pairs: vec![(&f.binder, &g.binder)] };
            ep_comp(&f.body, &g.body, &mut sc)
        })
}

fn ep_value<'a>(a: &'a epcf::Value, b: &'a epcf::Value, sc: &mut Scope<'a>) -> bool {
    use epcf::Value as V;
    match (a, b) {
        (V::Star, V::Star) | (V::Zero, V::Zero) => true,
        (V::Succ(x), V::Succ(y)) => ep_value(x, y, sc),
        (V::Var(x), V::Var(y)) => sc.var_eq(x, y),
        (V::Lam(x, t1, m), V::Lam(y, t2, n)) => {
            if t1 != t2 {
                return false;
            }
            sc.pairs.push((x, y));
            let r = ep_comp(m, n, sc);
            sc.pairs.pop();
            r
        }
        _ => false,
    }
}

fn ep_bound<'a>(x: &'a Name, m: &'a epcf::Comp, y: &'a Name, n: &'a epcf::Comp, sc: &mut Scope<'a>) -> bool {
    sc.pairs.push((x, y));
    let r = ep_comp(m, n, sc);
    sc.pairs.pop();
    r
}

fn ep_comps<'a>(a: &'a [epcf::Comp], b: &'a [epcf::Comp], sc: &mut Scope<'a>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(m, n)| ep_comp(m, n, sc))
}

fn ep_comp<'a>(a: &'a epcf::Comp, b: &'a epcf::Comp, sc: &mut Scope<'a>) -> bool {
    use epcf::{Comp as C, OpArgs as O};
    match (a, b) {
        (C::App(v1, w1), C::App(v2, w2)) => ep_value(v1, v2, sc) && ep_value(w1, w2, sc),
        (C::Return(v1), C::Return(v2)) | (C::Fix(v1), C::Fix(v2)) => ep_value(v1, v2, sc),
        (C::Let(m1, x, n1), C::Let(m2, y, n2)) => ep_comp(m1, m2, sc) && ep_bound(x, n1, y, n2, sc),
        (C::Case(v1, m1, x, n1), C::Case(v2, m2, y, n2)) => {
            ep_value(v1, v2, sc) && ep_comp(m1, m2, sc) && ep_bound(x, n1, y, n2, sc)
        }
        (C::Op(s1, a1), C::Op(s2, a2)) => {
            s1 == s2
                && match (a1, a2) {
                    (O::Plain(ms), O::Plain(ns)) => ep_comps(ms, ns, sc),
                    (O::Param(v, ms), O::Param(w, ns)) => ep_value(v, w, sc) && ep_comps(ms, ns, sc),
                    (O::Inf(v), O::Inf(w)) => ep_value(v, w, sc),
                    (O::ParamInf(v1, w1), O::ParamInf(v2, w2)) => {
                        ep_value(v1, v2, sc) && ep_value(w1, w2, sc)
                    }
                    _ => false,
                }
        }
        _ => false,
    }
}

pub fn alpha_eq_ecps(a: &ecps::Term, b: &ecps::Term) -> bool {
    match (a, b) {
        (ecps::Term::Value(v), ecps::Term::Value(w)) => alpha_eq_ecps_value(v, w),
        (ecps::Term::Comp(m), ecps::Term::Comp(n)) => alpha_eq_ecps_comp(m, n),
        _ => false,
    }
}

pub fn alpha_eq_ecps_value(a: &ecps::Value, b: &ecps::Value) -> bool {
    ec_value(a, b, &mut Scope { pairs: Vec::new() })
}

pub fn alpha_eq_ecps_comp(a: &ecps::Comp, b: &ecps::Comp) -> bool {
    ec_comp(a, b, &mut Scope { pairs: Vec::new() })
}

fn ec_values<'a>(a: &'a [ecps::Value], b: &'a [ecps::Value], sc: &mut Scope<'a>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(v, w)| ec_value(v, w, sc))
}

fn ec_value<'a>(a: &'a ecps::Value, b: &'a ecps::Value, sc: &mut Scope<'a>) -> bool {
    use ecps::Value as V;
    match (a, b) {
        (V::Star, V::Star) | (V::Zero, V::Zero) => true,
        (V::Succ(x), V::Succ(y)) => ec_value(x, y, sc),
        (V::Var(x), V::Var(y)) => sc.var_eq(x, y),
        (V::Lam(ps, t), V::Lam(qs, u)) => {
            if ps.len() != qs.len() || ps.iter().zip(qs).any(|((_, a), (_, b))| a != b) {
                return false;
            }
            let n = sc.pairs.len();
            for ((x, _), (y, _)) in ps.iter().zip(qs) {
                sc.pairs.push((x, y));
            }
            let r = ec_comp(t, u, sc);
            sc.pairs.truncate(n);
            r
        }
        _ => false,
    }
}

fn ec_comp<'a>(a: &'a ecps::Comp, b: &'a ecps::Comp, sc: &mut Scope<'a>) -> bool {
    use ecps::Comp as C;
    match (a, b) {
        (C::App(v, ws), C::App(u, zs)) => ec_value(v, u, sc) && ec_values(ws, zs, sc),
        (C::MuApp(x, v, ws), C::MuApp(y, u, zs)) => {
            if !ec_values(ws, zs, sc) {
                return false;
            }
            sc.pairs.push((x, y));
            let r = ec_value(v, u, sc);
            sc.pairs.pop();
            r
        }
        (C::Op(s1, v1, x, t1), C::Op(s2, v2, y, t2)) => {
            if s1 != s2 || !ec_value(v1, v2, sc) {
                return false;
            }
            sc.pairs.push((x, y));
            let r = ec_comp(t1, t2, sc);
            sc.pairs.pop();
            r
        }
        (C::Stop, C::Stop) => true,
        (C::Case(v1, t1, x, u1), C::Case(v2, t2, y, u2)) => {
            if !ec_value(v1, v2, sc) || !ec_comp(t1, t2, sc) {
                return false;
            }
            sc.pairs.push((x, y));
            let r = ec_comp(u1, u2, sc);
            sc.pairs.pop();
            r
        }
        _ => false,
    }
}
