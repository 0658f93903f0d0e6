//! The finitary fragment of the value logics F and V.

mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::effects::{check_observation, EffectError, Observation, ObservationFamily, Verdict};
use crate::semantics::{ecps_tree, StepError};
use crate::syntax::typing::{type_of_ecps_value, TypeError};
use crate::syntax::{ecps, EcpsType, EffectSig, TypeEnv};
use crate::trees::TreeParams;

pub use parse::parse_formula;


#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    NatIs(u64),
    /// `(φ₁, …, φₙ) ↦ P`
    ArrowF(Vec<Formula>, Observation),
    /// `(w₁, …, wₙ) ↦ P`
    ArrowV(Vec<ecps::Value>, Observation),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Logic {
    F,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Fragment {
    pub logic: Logic,
    /// Rejects negation.
    pub positive: bool,
}

impl Fragment {
    pub const F: Fragment = Fragment { logic: Logic::F, positive: false };
    pub const V: Fragment = Fragment { logic: Logic::V, positive: false };
}

impl Formula {
    pub fn arrow(ants: Vec<Formula>, p: Observation) -> Formula {
        Formula::ArrowF(ants, p)
    }

    /// The least fragment the formula lives in: V if it uses stored
    /// values, F otherwise.
    pub fn logic(&self) -> Logic {
        match self {
            Formula::ArrowV(..) => Logic::V,
            Formula::NatIs(_) => Logic::F,
            Formula::ArrowF(fs, _) | Formula::And(fs) | Formula::Or(fs) => {
                if fs.iter().any(|f| f.logic() == Logic::V) {
                    Logic::V
                } else {
                    Logic::F
                }
            }
            Formula::Not(f) => f.logic(),
        }
    }
}

/// Formula well-formedness at a type.
pub fn formula_wf(phi: &Formula, ty: &EcpsType, frag: Fragment) -> bool {
    match phi {
        Formula::NatIs(_) => *ty == EcpsType::Nat,
        Formula::ArrowF(ants, _) => {
            frag.logic == Logic::F
                && match ty.neg_args() {
                    Some(args) => args.len() == ants.len() && ants.iter().zip(args).all(|(f, a)| formula_wf(f, a, frag)),
                    None => false,
                }
        }
        Formula::ArrowV(ws, _) => {
            frag.logic == Logic::V
                && match ty.neg_args() {
                    Some(args) => {
                        let sig = EffectSig::open();
                        args.len() == ws.len()
                            && ws.iter().zip(args).all(|(w, a)| type_of_ecps_value(&sig, &TypeEnv::new(), w).as_ref() == Ok(a))
                    }
                    None => false,
                }
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| formula_wf(f, ty, frag)),
        Formula::Not(f) => !frag.positive && formula_wf(f, ty, frag),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("formula `{formula}` is not well formed at type {ty}")]
    TypeMismatch { formula: String, ty: String },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Effect(#[from] EffectError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// How universal quantification over closed values is approximated.
#[derive(Clone, Debug)]
pub struct QuantConfig {
    pub family: ObservationFamily,
    /// Numerals `0..=numeral_bound` stand in for all of ℕ where a finite
    /// set will not do.
    pub numeral_bound: u64,
    /// Extra candidate values per type.
    pub pools: Vec<(EcpsType, Vec<ecps::Value>)>,
    /// Include the built-in continuation library.
    pub library: bool,
    pub budget: u64,
    pub params: TreeParams,
}

impl QuantConfig {
    pub fn new(family: ObservationFamily) -> QuantConfig {
        QuantConfig { family, numeral_bound: 5, pools: Vec::new(), library: true, budget: 2000, params: TreeParams::default() }
    }

    pub fn with_pool(mut self, ty: EcpsType, values: Vec<ecps::Value>) -> QuantConfig {
        self.pools.push((ty, values));
        self
    }

    pub fn sig(&self) -> EffectSig {
        self.family.signature().to_ecps()
    }

    /// Candidate closed values of a type, and whether the list is the
    /// complete set of closed values of that type.
    pub fn candidates(&self, ty: &EcpsType) -> (Vec<ecps::Value>, bool) {
        let mut out = Vec::new();
        let exact = match ty {
            EcpsType::Unit => {
                out.push(ecps::Value::Star);
                true
            }
            EcpsType::Nat => {
                out.extend((0..=self.numeral_bound).map(ecps::Value::numeral));
                false
            }
            EcpsType::Neg(args) => {
                if self.library {
                    out.extend(library(args, self.numeral_bound));
                }
                false
            }
        };
        for (t, vs) in &self.pools {
            if t == ty {
                for v in vs {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        (out, exact)
    }
}

fn stop_lam(args: &[EcpsType], body: ecps::Comp) -> ecps::Value {
    let params = args.iter().enumerate().map(|(i, a)| (format!("a{i}"), a.clone())).collect();
    ecps::Value::Lam(params, Box::new(body))
}

/// `case x of {… n times …}`: stops exactly when `x` is `n`.
pub fn select(x: &str, n: u64) -> ecps::Comp {
    use ecps::{Comp as C, Value as V};
    let y = format!("{x}'");
    if n == 0 {
        C::case(V::var(x), C::Stop, y, ecps::loop_comp())
    } else {
        C::case(V::var(x), ecps::loop_comp(), y.clone(), select(&y, n - 1))
    }
}

fn default_value(ty: &EcpsType) -> ecps::Value {
    match ty {
        EcpsType::Unit => ecps::Value::Star,
        EcpsType::Nat => ecps::Value::Zero,
        EcpsType::Neg(args) => stop_lam(args, ecps::Comp::Stop),
    }
}

/// The built-in continuations of type `¬(args)`.
pub fn library(args: &[EcpsType], bound: u64) -> Vec<ecps::Value> {
    use ecps::{Comp as C, Value as V};
    let mut out = vec![stop_lam(args, C::Stop), stop_lam(args, ecps::loop_comp())];
    for (i, a) in args.iter().enumerate() {
        let x = format!("a{i}");
        match a {
            EcpsType::Nat => {
                out.push(stop_lam(args, C::case(V::var(x.clone()), C::Stop, "b", ecps::loop_comp())));
                for n in 0..=bound {
                    out.push(stop_lam(args, select(&x, n)));
                }
            }
            EcpsType::Neg(inner) => {
                let nat_pos: Vec<usize> = (0..inner.len()).filter(|&j| inner[j] == EcpsType::Nat).collect();
                let call = |fill: &dyn Fn(usize, &EcpsType) -> V| {
                    stop_lam(args, C::App(V::var(x.clone()), inner.iter().enumerate().map(|(j, b)| fill(j, b)).collect()))
                };
                out.push(call(&|_, b| default_value(b)));
                if !nat_pos.is_empty() {
                    for n in 1..=bound {
                        out.push(call(&|_, b| if *b == EcpsType::Nat { V::numeral(n) } else { default_value(b) }));
                    }
                }
                // pass an own argument of the same type through
                for (j, b) in inner.iter().enumerate() {
                    for (i2, a2) in args.iter().enumerate() {
                        if i2 != i && a2 == b && (b == &EcpsType::Nat || matches!(b, EcpsType::Neg(_))) {
                            out.push(call(&|jj, bb| if jj == j { V::var(format!("a{i2}")) } else { default_value(bb) }));
                        }
                    }
                }
            }
            EcpsType::Unit => {}
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|v| seen.insert(v.to_string()));
    out
}

/// A satisfaction verdict with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sat {
    pub verdict: Verdict,
    /// The verdict relies on a finite stand-in for "all closed values".
    pub pool_relative: bool,
    /// For a failing arrow formula: the argument tuple and the observation
    /// it refuted.
    pub witness: Option<(Vec<ecps::Value>, Observation)>,
    /// Number of argument tuples checked.
    pub tuples: usize,
}

impl Sat {
    fn plain(verdict: Verdict) -> Sat {
        Sat { verdict, pool_relative: false, witness: None, tuples: 0 }
    }
}

/// Satisfaction of an observation by a computation.
pub fn sat_comp(t: &ecps::Comp, p: &Observation, cfg: &QuantConfig) -> Result<Verdict, LogicError> {
    let tree = ecps_tree(t, cfg.budget, cfg.params)?;
    Ok(check_observation(&tree, p, &cfg.family)?)
}

pub fn sat_value(v: &ecps::Value, phi: &Formula, cfg: &QuantConfig) -> Result<Sat, LogicError> {
    let sig = cfg.sig();
    let ty = type_of_ecps_value(&sig, &TypeEnv::new(), v)?;
    let frag = Fragment { logic: phi.logic(), positive: false };
    if !formula_wf(phi, &ty, frag) {
        return Err(LogicError::TypeMismatch { formula: phi.to_string(), ty: ty.to_string() });
    }
    sat_at(v, &ty, phi, cfg)
}

fn sat_at(v: &ecps::Value, ty: &EcpsType, phi: &Formula, cfg: &QuantConfig) -> Result<Sat, LogicError> {
    match phi {
        Formula::NatIs(n) => Ok(Sat::plain(Verdict::from_bool(v.as_numeral() == Some(*n)))),
        Formula::ArrowV(ws, p) => {
            let verdict = sat_comp(&ecps::Comp::app(v.clone(), ws.clone()), p, cfg)?;
            let witness = (verdict == Verdict::Fails).then(|| (ws.clone(), p.clone()));
            Ok(Sat { verdict, pool_relative: false, witness, tuples: 1 })
        }
        Formula::ArrowF(ants, p) => sat_arrow(v, ty, ants, p, cfg),
        Formula::And(fs) | Formula::Or(fs) => {
            let is_and = matches!(phi, Formula::And(_));
            let mut acc = Sat::plain(Verdict::from_bool(is_and));
            for f in fs {
                let s = sat_at(v, ty, f, cfg)?;
                acc.pool_relative |= s.pool_relative;
                acc.tuples += s.tuples;
                let next = if is_and { acc.verdict.and(s.verdict) } else { acc.verdict.or(s.verdict) };
                if acc.witness.is_none() && s.witness.is_some() && next == Verdict::Fails {
                    acc.witness = s.witness;
                }
                acc.verdict = next;
            }
            if acc.verdict != Verdict::Fails {
                acc.witness = None;
            }
            Ok(acc)
        }
        Formula::Not(f) => {
            let s = sat_at(v, ty, f, cfg)?;
            Ok(Sat { verdict: s.verdict.not(), pool_relative: s.pool_relative, witness: None, tuples: s.tuples })
        }
    }
}

/// Set of naturals denoted by a formula at type nat: finite or cofinite.
#[derive(Clone, Debug, PartialEq, Eq)]
enum NatSet {
    Finite(BTreeSet<u64>),
    Cofinite(BTreeSet<u64>),
}

impl NatSet {
    fn of(phi: &Formula) -> NatSet {
        use NatSet::*;
        match phi {
            Formula::NatIs(n) => Finite([*n].into()),
            Formula::Not(f) => match NatSet::of(f) {
                Finite(s) => Cofinite(s),
                Cofinite(s) => Finite(s),
            },
            Formula::And(fs) => fs.iter().map(NatSet::of).fold(Cofinite(BTreeSet::new()), |a, b| match (a, b) {
                (Finite(x), Finite(y)) => Finite(&x & &y),
                (Finite(x), Cofinite(y)) | (Cofinite(y), Finite(x)) => Finite(&x - &y),
                (Cofinite(x), Cofinite(y)) => Cofinite(&x | &y),
            }),
            Formula::Or(fs) => fs.iter().map(NatSet::of).fold(Finite(BTreeSet::new()), |a, b| match (a, b) {
                (Finite(x), Finite(y)) => Finite(&x | &y),
                (Finite(x), Cofinite(y)) | (Cofinite(y), Finite(x)) => Cofinite(&y - &x),
                (Cofinite(x), Cofinite(y)) => Cofinite(&x & &y),
            }),
            _ => Finite(BTreeSet::new()),
        }
    }
}

/// Candidates for one argument position that satisfy its antecedent,
/// each tagged with whether the antecedent verdict was definitive.
struct Position {
    values: Vec<(ecps::Value, bool)>,
    pool_relative: bool,
}

fn position(ty: &EcpsType, ant: &Formula, cfg: &QuantConfig) -> Result<Position, LogicError> {
    if *ty == EcpsType::Nat {
        return Ok(match NatSet::of(ant) {
            NatSet::Finite(s) => Position { values: s.into_iter().map(|n| (ecps::Value::numeral(n), true)).collect(), pool_relative: false },
            NatSet::Cofinite(s) => {
                let top = cfg.numeral_bound.max(s.iter().next_back().map_or(0, |m| m + 1));
                Position {
                    values: (0..=top).filter(|n| !s.contains(n)).map(|n| (ecps::Value::numeral(n), true)).collect(),
                    pool_relative: true,
                }
            }
        });
    }
    let (cands, exact) = cfg.candidates(ty);
    let mut values = Vec::new();
    let mut pool_relative = !exact;
    for c in cands {
        let s = sat_at(&c, ty, ant, cfg)?;
        pool_relative |= s.pool_relative;
        match s.verdict {
            Verdict::Holds => values.push((c, true)),
            Verdict::Unknown => values.push((c, false)),
            Verdict::Fails => {}
        }
    }
    Ok(Position { values, pool_relative })
}

fn sat_arrow(
    v: &ecps::Value,
    ty: &EcpsType,
    ants: &[Formula],
    p: &Observation,
    cfg: &QuantConfig,
) -> Result<Sat, LogicError> {
    let args = ty.neg_args().expect("checked by formula_wf");
    let positions = args.iter().zip(ants).map(|(a, f)| position(a, f, cfg)).collect::<Result<Vec<_>, _>>()?;
    let pool_relative = positions.iter().any(|p| p.pool_relative);
    let mut verdict = Verdict::Holds;
    let mut tuples = 0usize;
    let mut idx = vec![0usize; positions.len()];
    if positions.iter().any(|p| p.values.is_empty()) {
        return Ok(Sat { verdict, pool_relative, witness: None, tuples });
    }
    loop {
        let tuple: Vec<ecps::Value> = idx.iter().zip(&positions).map(|(&i, p)| p.values[i].0.clone()).collect();
        let certain = idx.iter().zip(&positions).all(|(&i, p)| p.values[i].1);
        tuples += 1;
        let r = sat_comp(&ecps::Comp::app(v.clone(), tuple.clone()), p, cfg)?;
        match (r, certain) {
            (Verdict::Fails, true) => {
                return Ok(Sat { verdict: Verdict::Fails, pool_relative: false, witness: Some((tuple, p.clone())), tuples })
            }
            (Verdict::Holds, _) => {}
            _ => verdict = Verdict::Unknown,
        }
        // next tuple
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(Sat { verdict, pool_relative, witness: None, tuples });
            }
            idx[k] += 1;
            if idx[k] < positions[k].values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Distinction {
    /// One side holds and the other fails; `left_holds` tells which.
    Distinguished { left_holds: bool },
    NotByThisFormula,
    Unknown,
}

pub fn distinguish(v1: &ecps::Value, v2: &ecps::Value, phi: &Formula, cfg: &QuantConfig) -> Result<Distinction, LogicError> {
    let a = sat_value(v1, phi, cfg)?.verdict;
    let b = sat_value(v2, phi, cfg)?.verdict;
    Ok(match (a, b) {
        (Verdict::Holds, Verdict::Fails) => Distinction::Distinguished { left_holds: true },
        (Verdict::Fails, Verdict::Holds) => Distinction::Distinguished { left_holds: false },
        (Verdict::Unknown, _) | (_, Verdict::Unknown) => Distinction::Unknown,
        _ => Distinction::NotByThisFormula,
    })
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{it}")?;
            }
            Ok(())
        }
        match self {
            Formula::NatIs(n) => write!(f, "{{{n}}}"),
            Formula::ArrowF(ants, p) => {
                write!(f, "(")?;
                list(f, ants)?;
                write!(f, ") -> {p}")
            }
            Formula::ArrowV(ws, p) => {
                write!(f, "[")?;
                list(f, ws)?;
                write!(f, "] -> {p}")
            }
            Formula::And(fs) => {
                write!(f, "and[")?;
                list(f, fs)?;
                write!(f, "]")
            }
            Formula::Or(fs) => {
                write!(f, "or[")?;
                list(f, fs)?;
                write!(f, "]")
            }
            Formula::Not(g) => write!(f, "not({g})"),
        }
    }
}
