//! Observation families, their three-valued membership checks, and the
//! per-family witness constructions.

mod observation;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::syntax::{ecps, Arity, EffectSig, Name};
use crate::trees::{explored, BotKind, Tree, TreeApprox};

pub use observation::{parse_family, parse_observation};

pub type State = BTreeMap<Name, u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ObservationFamily {
    Pure,
    Nondet,
    Prob,
    Store { locations: Vec<Name>, value_range: u64 },
    Io,
}

impl ObservationFamily {
    pub fn store(locations: &[&str], value_range: u64) -> ObservationFamily {
        ObservationFamily::Store { locations: locations.iter().map(|l| l.to_string()).collect(), value_range }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObservationFamily::Pure => "pure",
            ObservationFamily::Nondet => "nondet",
            ObservationFamily::Prob => "prob",
            ObservationFamily::Store { .. } => "store",
            ObservationFamily::Io => "io",
        }
    }

    /// The direct-style signature of the family.
    pub fn signature(&self) -> EffectSig {
        match self {
            ObservationFamily::Pure => EffectSig::empty(),
            ObservationFamily::Nondet => EffectSig::new([("or", Arity::Finite(2))]),
            ObservationFamily::Prob => EffectSig::new([("p-or", Arity::Finite(2))]),
            ObservationFamily::Store { locations, .. } => EffectSig::new(locations.iter().flat_map(|l| {
                [(format!("lookup_{l}"), Arity::Infinite), (format!("update_{l}"), Arity::ParamFinite(1))]
            })),
            ObservationFamily::Io => EffectSig::new([("read", Arity::Infinite), ("write", Arity::ParamFinite(1))]),
        }
    }

    pub fn owns(&self, op: &str) -> bool {
        match self {
            ObservationFamily::Pure => false,
            ObservationFamily::Nondet => op == "or",
            ObservationFamily::Prob => op == "p-or",
            ObservationFamily::Store { .. } => self.store_op(op).is_some(),
            ObservationFamily::Io => op == "read" || op == "write",
        }
    }

    /// For a store operation, whether it is a lookup, and its location.
    pub fn store_op<'a>(&self, op: &'a str) -> Option<(bool, &'a str)> {
        let ObservationFamily::Store { locations, .. } = self else { return None };
        let (lookup, loc) = if let Some(l) = op.strip_prefix("lookup_") {
            (true, l)
        } else if let Some(l) = op.strip_prefix("update_") {
            (false, l)
        } else {
            return None;
        };
        locations.iter().any(|x| x == loc).then_some((lookup, loc))
    }

    /// All states with every location holding a value below the range.
    pub fn states(&self) -> Vec<State> {
        let ObservationFamily::Store { locations, value_range } = self else { return vec![] };
        let mut out = vec![State::new()];
        for l in locations {
            out = out
                .into_iter()
                .flat_map(|s| {
                    (0..*value_range).map(move |v| {
                        let mut s = s.clone();
                        s.insert(l.clone(), v);
                        s
                    })
                })
                .collect();
        }
        out
    }

    pub fn zero_state(&self) -> State {
        match self {
            ObservationFamily::Store { locations, .. } => locations.iter().map(|l| (l.clone(), 0)).collect(),
            _ => State::new(),
        }
    }
}

impl fmt::Display for ObservationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservationFamily::Store { locations, .. } => write!(f, "store {}", locations.join(" ")),
            other => write!(f, "{}", other.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IoEvent {
    In(u64),
    Out(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Observation {
    Terminate,
    AllTrees,
    May,
    Must,
    /// Termination probability strictly above the threshold, `0 ≤ q < 1`.
    ProbGt(BigRational),
    StoreStep(State, State),
    Trace(Vec<IoEvent>),
}

impl Observation {
    pub fn prob_gt(num: i64, den: i64) -> Observation {
        Observation::ProbGt(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Whether the observation belongs to the family's set.
    pub fn fits(&self, family: &ObservationFamily) -> bool {
        use ObservationFamily as F;
        match (self, family) {
            (Observation::AllTrees, _) => true,
            (Observation::Terminate, F::Pure) => true,
            (Observation::May | Observation::Must, F::Nondet) => true,
            (Observation::ProbGt(q), F::Prob) => *q >= BigRational::zero() && *q < BigRational::one(),
            (Observation::StoreStep(s, r), F::Store { locations, .. }) => {
                let keys = |m: &State| m.keys().cloned().collect::<Vec<_>>();
                let mut locs = locations.clone();
                locs.sort();
                keys(s) == locs && keys(r) == locs
            }
            (Observation::Trace(_), F::Io) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Holds, Holds) => Holds,
            _ => Unknown,
        }
    }

    pub fn or(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Holds, _) | (_, Holds) => Holds,
            (Fails, Fails) => Fails,
            _ => Unknown,
        }
    }

    pub fn not(self) -> Verdict {
        match self {
            Verdict::Holds => Verdict::Fails,
            Verdict::Fails => Verdict::Holds,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    pub fn is_definite(self) -> bool {
        self != Verdict::Unknown
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EffectError {
    #[error("`{what}` does not belong to the {family} family")]
    FamilyMismatch { what: String, family: String },
    #[error("child {needed} of `{op}` was not forced (width {width})")]
    WidthInsufficient { op: String, needed: u64, width: usize },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

fn mismatch<T>(what: impl fmt::Display, family: &ObservationFamily) -> Result<T, EffectError> {
    Err(EffectError::FamilyMismatch { what: what.to_string(), family: family.name().to_string() })
}

pub fn check_observation(t: &TreeApprox, p: &Observation, family: &ObservationFamily) -> Result<Verdict, EffectError> {
    check_tree(&t.root, p, family)
}

pub fn check_tree(t: &Tree, p: &Observation, family: &ObservationFamily) -> Result<Verdict, EffectError> {
    if !p.fits(family) {
        return mismatch(p, family);
    }
    match p {
        Observation::AllTrees => Ok(Verdict::Holds),
        Observation::Terminate => match t {
            Tree::Stop | Tree::Val(_) => Ok(Verdict::Holds),
            Tree::Bot(BotKind::Certified) => Ok(Verdict::Fails),
            Tree::Bot(BotKind::Budget) => Ok(Verdict::Unknown),
            Tree::Node { op, .. } => mismatch(op, family),
        },
        Observation::May => modal(t, family, true),
        Observation::Must => modal(t, family, false),
        Observation::ProbGt(q) => {
            let lower = prob_bound(t, family, false)?;
            let upper = prob_bound(t, family, true)?;
            Ok(if lower > *q {
                Verdict::Holds
            } else if upper <= *q {
                Verdict::Fails
            } else {
                Verdict::Unknown
            })
        }
        Observation::StoreStep(s, r) => Ok(match exec_tree(t, s, family)? {
            Exec::Terminated(end) => Verdict::from_bool(end == *r),
            Exec::CertifiedDiverge => Verdict::Fails,
            Exec::Unknown => Verdict::Unknown,
        }),
        Observation::Trace(w) => trace_tree(t, w, family),
    }
}

fn modal(t: &Tree, family: &ObservationFamily, may: bool) -> Result<Verdict, EffectError> {
    match t {
        Tree::Stop | Tree::Val(_) => Ok(Verdict::Holds),
        Tree::Bot(BotKind::Certified) => Ok(Verdict::Fails),
        Tree::Bot(BotKind::Budget) => Ok(Verdict::Unknown),
        Tree::Node { op, children, .. } => {
            if !family.owns(op) {
                return mismatch(op, family);
            }
            let mut acc = Verdict::from_bool(!may);
            for i in 0..2 {
                let v = match children.get(i) {
                    Some(c) => modal(c, family, may)?,
                    None => Verdict::Unknown,
                };
                acc = if may { acc.or(v) } else { acc.and(v) };
            }
            Ok(acc)
        }
    }
}

/// Termination probability with budget-⊥ read as 0 (`optimistic` false)
/// or as 1 (`optimistic` true). Certified ⊥ is always 0.
fn prob_bound(t: &Tree, family: &ObservationFamily, optimistic: bool) -> Result<BigRational, EffectError> {
    match t {
        Tree::Stop | Tree::Val(_) => Ok(BigRational::one()),
        Tree::Bot(BotKind::Certified) => Ok(BigRational::zero()),
        Tree::Bot(BotKind::Budget) => Ok(if optimistic { BigRational::one() } else { BigRational::zero() }),
        Tree::Node { op, children, .. } => {
            if !family.owns(op) {
                return mismatch(op, family);
            }
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let mut sum = BigRational::zero();
            for i in 0..2 {
                sum += match children.get(i) {
                    Some(c) => prob_bound(c, family, optimistic)?,
                    None if optimistic => BigRational::one(),
                    None => BigRational::zero(),
                };
            }
            Ok(sum * half)
        }
    }
}

/// Lower bound on ℙ, and whether it is exact.
pub fn prob_lower(t: &TreeApprox) -> Result<(BigRational, bool), EffectError> {
    let fam = ObservationFamily::Prob;
    let lower = prob_bound(&t.root, &fam, false)?;
    Ok((lower, explored(&t.root, &fam)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Exec {
    Terminated(State),
    CertifiedDiverge,
    Unknown,
}

pub fn exec_store(t: &TreeApprox, s: &State, family: &ObservationFamily) -> Result<Exec, EffectError> {
    exec_tree(&t.root, s, family)
}

pub fn exec_tree(t: &Tree, s: &State, family: &ObservationFamily) -> Result<Exec, EffectError> {
    if !matches!(family, ObservationFamily::Store { .. }) {
        return mismatch("exec", family);
    }
    let mut state = s.clone();
    let mut t = t;
    loop {
        match t {
            Tree::Stop | Tree::Val(_) => return Ok(Exec::Terminated(state)),
            Tree::Bot(BotKind::Certified) => return Ok(Exec::CertifiedDiverge),
            Tree::Bot(BotKind::Budget) => return Ok(Exec::Unknown),
            Tree::Node { op, index, children, .. } => {
                let Some((lookup, loc)) = family.store_op(op) else { return mismatch(op, family) };
                let next = if lookup {
                    state.get(loc).copied().unwrap_or(0)
                } else {
                    let Some(n) = index else { return mismatch(format!("{op} without a value"), family) };
                    state.insert(loc.to_string(), *n);
                    0
                };
                match children.get(next as usize) {
                    Some(c) => t = c,
                    None => {
                        return Err(EffectError::WidthInsufficient { op: op.clone(), needed: next, width: children.len() })
                    }
                }
            }
        }
    }
}

pub fn trace_sat(t: &TreeApprox, w: &[IoEvent]) -> Result<Verdict, EffectError> {
    trace_tree(&t.root, w, &ObservationFamily::Io)
}

fn trace_tree(t: &Tree, w: &[IoEvent], family: &ObservationFamily) -> Result<Verdict, EffectError> {
    let Some((ev, rest)) = w.split_first() else { return Ok(Verdict::Holds) };
    match t {
        Tree::Bot(BotKind::Budget) => Ok(Verdict::Unknown),
        Tree::Bot(BotKind::Certified) | Tree::Stop | Tree::Val(_) => Ok(Verdict::Fails),
        Tree::Node { op, index, children, .. } => {
            let next = match (op.as_str(), ev) {
                ("read", IoEvent::In(n)) => *n,
                ("write", IoEvent::Out(n)) => {
                    if *index != Some(*n) {
                        return Ok(Verdict::Fails);
                    }
                    0
                }
                ("read", _) | ("write", _) => return Ok(Verdict::Fails),
                _ => return mismatch(op, family),
            };
            match children.get(next as usize) {
                Some(c) => trace_tree(c, rest, family),
                None => Err(EffectError::WidthInsufficient { op: op.clone(), needed: next, width: children.len() }),
            }
        }
    }
}

/// Per-child observations for a node-rooted tree in `p`: each child of the
/// root is in its observation, and any children in those observations put
/// the node back in `p`.
pub fn decompose_witness(
    p: &Observation,
    t: &TreeApprox,
    family: &ObservationFamily,
) -> Result<Vec<Observation>, EffectError> {
    decompose_tree(p, &t.root, family)
}

pub fn decompose_tree(p: &Observation, t: &Tree, family: &ObservationFamily) -> Result<Vec<Observation>, EffectError> {
    if check_tree(t, p, family)? != Verdict::Holds {
        return Err(EffectError::PreconditionFailed(format!("the tree is not known to satisfy {p}")));
    }
    let Tree::Node { op, index, children, .. } = t else {
        return Err(EffectError::PreconditionFailed("the root is not an operation node".into()));
    };
    let n = children.len();
    let mut out = vec![Observation::AllTrees; n];
    match p {
        Observation::AllTrees => {}
        Observation::Terminate => unreachable!("a node never satisfies termination"),
        Observation::May => {
            let i = (0..n.min(2))
                .find(|&i| modal(&children[i], family, true) == Ok(Verdict::Holds))
                .expect("one of the first two children may terminate");
            out[i] = Observation::May;
        }
        Observation::Must => {
            out[0] = Observation::Must;
            out[1] = Observation::Must;
        }
        Observation::ProbGt(q) => {
            let l0 = prob_bound(&children[0], family, false)?;
            let l1 = prob_bound(&children[1], family, false)?;
            let two_q = q * BigRational::from_integer(BigInt::from(2));
            if l0.is_zero() {
                out[1] = Observation::ProbGt(two_q);
            } else if l1.is_zero() {
                out[0] = Observation::ProbGt(two_q);
            } else {
                let total = &l0 + &l1;
                out[0] = Observation::ProbGt(&l0 / &total * &two_q);
                out[1] = Observation::ProbGt(&l1 / &total * &two_q);
            }
        }
        Observation::StoreStep(s, r) => {
            let (lookup, loc) = family.store_op(op).expect("checked above");
            if lookup {
                out[s[loc] as usize] = Observation::StoreStep(s.clone(), r.clone());
            } else {
                let mut s2 = s.clone();
                s2.insert(loc.to_string(), index.expect("update carries a value"));
                out[0] = Observation::StoreStep(s2, r.clone());
            }
        }
        Observation::Trace(w) => {
            if let Some((ev, rest)) = w.split_first() {
                let i = match ev {
                    IoEvent::In(m) => *m as usize,
                    IoEvent::Out(_) => 0,
                };
                out[i] = Observation::Trace(rest.to_vec());
            }
        }
    }
    Ok(out)
}

/// A non-trivial observation together with a computation known to satisfy it.
pub fn consistency_witness(family: &ObservationFamily) -> (Observation, ecps::Comp) {
    let p = match family {
        ObservationFamily::Pure => Observation::Terminate,
        ObservationFamily::Nondet => Observation::May,
        ObservationFamily::Prob => Observation::prob_gt(0, 1),
        ObservationFamily::Store { .. } => {
            let s = family.zero_state();
            Observation::StoreStep(s.clone(), s)
        }
        ObservationFamily::Io => {
            let t = ecps::Comp::op("write", ecps::Value::Zero, "x", ecps::Comp::Stop);
            return (Observation::Trace(vec![IoEvent::Out(0)]), t);
        }
    };
    (p, ecps::Comp::Stop)
}

/// The observations checked when comparing two computations: the whole
/// family for the finite cases, a threshold grid for probability.
pub fn observation_set(family: &ObservationFamily) -> Vec<Observation> {
    match family {
        ObservationFamily::Pure => vec![Observation::Terminate],
        ObservationFamily::Nondet => vec![Observation::May, Observation::Must],
        ObservationFamily::Prob => (0..10).rev().map(|i| Observation::prob_gt(i, 10)).collect(),
        ObservationFamily::Store { .. } => {
            let states = family.states();
            states
                .iter()
                .flat_map(|s| states.iter().map(move |r| Observation::StoreStep(s.clone(), r.clone())))
                .collect()
        }
        ObservationFamily::Io => {
            let events: Vec<IoEvent> = (0..3).flat_map(|n| [IoEvent::In(n), IoEvent::Out(n)]).collect();
            let mut out = vec![Observation::Trace(vec![])];
            out.extend(events.iter().map(|e| Observation::Trace(vec![*e])));
            for a in &events {
                out.extend(events.iter().map(|b| Observation::Trace(vec![*a, *b])));
            }
            out
        }
    }
}
