//! Bounded applicative bisimilarity and context-based testing.

mod context;

pub use context::{
    parse_context, parse_contexts, typecheck_context, CompToComp, CompToValue, Context, ContextError, ContextTyping,
    Kind, ValueToComp, ValueToValue,
};

use serde::Serialize;
use thiserror::Error;

use crate::effects::{
    check_observation, exec_store, observation_set, prob_lower, EffectError, Exec, IoEvent, Observation,
    ObservationFamily, Verdict,
};
use crate::logic::{library, QuantConfig};
use crate::semantics::{ecps_tree, StepError};
use crate::syntax::alpha::alpha_eq_ecps_comp;
use crate::syntax::typing::{check_ecps_comp, type_of_ecps_value, typecheck_ecps, EcpsJudgement, TypeError};
use crate::syntax::{ecps, EcpsType, TypeEnv};
use crate::trees::{BotKind, Tree, TreeApprox};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("the two values have different types {left} and {right}")]
    TypeMismatch { left: String, right: String },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Effect(#[from] EffectError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// One observation checked on both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub observation: String,
    pub left: Verdict,
    pub right: Verdict,
}

/// What separates the two sides: the arguments or context used, and an
/// observation on which their verdicts disagree definitively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub arguments: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    pub observation: String,
    pub left: Verdict,
    pub right: Verdict,
    #[serde(skip)]
    pub observed: Option<Observation>,
    #[serde(skip)]
    pub argument_values: Vec<ecps::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub left: String,
    pub right: String,
    pub family: String,
    /// Holds: no difference found. Fails: a definitive difference.
    pub verdict: Verdict,
    /// Agreement is relative to a finite pool of arguments or contexts.
    pub pool_relative: bool,
    /// Argument tuples or contexts tried.
    pub exercised: usize,
    pub checks: Vec<Check>,
    pub witness: Option<Witness>,
}

impl EquivReport {
    fn new(left: String, right: String, family: &ObservationFamily) -> EquivReport {
        EquivReport {
            left,
            right,
            family: family.to_string(),
            verdict: Verdict::Holds,
            pool_relative: false,
            exercised: 0,
            checks: Vec::new(),
            witness: None,
        }
    }

    fn fail(&mut self, w: Witness) {
        self.verdict = Verdict::Fails;
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    fn record(&mut self, p: &Observation, left: Verdict, right: Verdict) -> bool {
        self.checks.push(Check { observation: p.to_string(), left, right });
        if left.is_definite() && right.is_definite() {
            if left != right {
                self.fail(observed(p, left, right));
                return true;
            }
        } else if self.verdict == Verdict::Holds {
            self.verdict = Verdict::Unknown;
        }
        false
    }
}

fn observed(p: &Observation, left: Verdict, right: Verdict) -> Witness {
    Witness {
        arguments: Vec::new(),
        context: None,
        observation: p.to_string(),
        left,
        right,
        observed: Some(p.clone()),
        argument_values: Vec::new(),
    }
}

fn trees(s: &ecps::Comp, t: &ecps::Comp, cfg: &QuantConfig) -> Result<(TreeApprox, TreeApprox), EquivError> {
    Ok((ecps_tree(s, cfg.budget, cfg.params)?, ecps_tree(t, cfg.budget, cfg.params)?))
}

/// Compares the effect summaries of two closed computations.
pub fn bisim_comp(s: &ecps::Comp, t: &ecps::Comp, cfg: &QuantConfig) -> Result<EquivReport, EquivError> {
    let family = &cfg.family;
    let mut report = EquivReport::new(s.to_string(), t.to_string(), family);
    // Evaluation is deterministic, so alpha-equal terms have equal summaries
    // even where the bounded trees leave them undecided.
    if alpha_eq_ecps_comp(s, t) {
        check_ecps_comp(&cfg.sig(), &TypeEnv::new(), s)?;
        return Ok(report);
    }
    let (ts, tt) = trees(s, t, cfg)?;
    match family {
        ObservationFamily::Pure | ObservationFamily::Nondet => {
            for p in observation_set(family) {
                let (a, b) = (check_observation(&ts, &p, family)?, check_observation(&tt, &p, family)?);
                if report.record(&p, a, b) {
                    break;
                }
            }
        }
        ObservationFamily::Prob => {
            for p in observation_set(family) {
                let (a, b) = (check_observation(&ts, &p, family)?, check_observation(&tt, &p, family)?);
                if report.record(&p, a, b) {
                    return Ok(report);
                }
            }
            let ((ps, es), (pt, et)) = (prob_lower(&ts)?, prob_lower(&tt)?);
            if es && et {
                if ps == pt {
                    report.verdict = Verdict::Holds;
                } else {
                    let q = ps.clone().min(pt.clone());
                    let p = Observation::ProbGt(q);
                    let (a, b) = (check_observation(&ts, &p, family)?, check_observation(&tt, &p, family)?);
                    report.record(&p, a, b);
                }
            } else {
                report.verdict = Verdict::Unknown;
            }
        }
        ObservationFamily::Store { .. } => {
            for st in family.states() {
                let (a, b) = (exec_store(&ts, &st, family)?, exec_store(&tt, &st, family)?);
                match (&a, &b) {
                    (Exec::Unknown, _) | (_, Exec::Unknown) => {
                        if report.verdict == Verdict::Holds {
                            report.verdict = Verdict::Unknown;
                        }
                    }
                    _ if a == b => {}
                    _ => {
                        let r = match (&a, &b) {
                            (Exec::Terminated(r), _) | (_, Exec::Terminated(r)) => r.clone(),
                            _ => unreachable!("distinct definite outcomes include a termination"),
                        };
                        let p = Observation::StoreStep(st.clone(), r);
                        let (x, y) = (check_observation(&ts, &p, family)?, check_observation(&tt, &p, family)?);
                        report.record(&p, x, y);
                        return Ok(report);
                    }
                }
            }
        }
        ObservationFamily::Io => {
            let (v, w) = io_compare(&ts.root, &tt.root, &mut Vec::new());
            match (v, w) {
                (Verdict::Fails, Some(trace)) => {
                    let p = Observation::Trace(trace);
                    let (a, b) = (check_observation(&ts, &p, family)?, check_observation(&tt, &p, family)?);
                    report.record(&p, a, b);
                }
                (Verdict::Unknown, _) => report.verdict = Verdict::Unknown,
                _ => {}
            }
        }
    }
    Ok(report)
}

/// Compares the sets of I/O traces two trees produce. On a difference,
/// returns a trace produced by exactly one side.
fn io_compare(a: &Tree, b: &Tree, prefix: &mut Vec<IoEvent>) -> (Verdict, Option<Vec<IoEvent>>) {
    let first = |t: &Tree| -> Option<IoEvent> {
        match t {
            Tree::Node { op, index, .. } if op == "write" => Some(IoEvent::Out(index.unwrap_or(0))),
            Tree::Node { op, .. } if op == "read" => Some(IoEvent::In(0)),
            _ => None,
        }
    };
    let with = |prefix: &[IoEvent], e: IoEvent| {
        let mut w = prefix.to_vec();
        w.push(e);
        w
    };
    match (a, b) {
        (Tree::Bot(BotKind::Budget), _) | (_, Tree::Bot(BotKind::Budget)) => (Verdict::Unknown, None),
        (Tree::Node { op: oa, index: ia, children: ca, truncated: ta }, Tree::Node { op: ob, index: ib, children: cb, truncated: tb })
            if oa == ob && (oa != "write" || ia == ib) =>
        {
            let n = if oa == "write" { 1 } else { ca.len().min(cb.len()) };
            let mut verdict = if oa == "read" && (*ta || *tb) { Verdict::Unknown } else { Verdict::Holds };
            for i in 0..n {
                let e = if oa == "write" { IoEvent::Out(ia.unwrap_or(0)) } else { IoEvent::In(i as u64) };
                prefix.push(e);
                let (v, w) = io_compare(&ca[i], &cb[i], prefix);
                prefix.pop();
                match v {
                    Verdict::Fails => return (v, w),
                    Verdict::Unknown => verdict = Verdict::Unknown,
                    Verdict::Holds => {}
                }
            }
            (verdict, None)
        }
        _ => match first(a).or_else(|| first(b)) {
            Some(e) => (Verdict::Fails, Some(with(prefix, e))),
            None => (Verdict::Holds, None),
        },
    }
}

/// Closed candidate tuples for the given argument types.
fn tuples(args: &[EcpsType], cfg: &QuantConfig) -> (Vec<Vec<ecps::Value>>, bool) {
    let mut out = vec![Vec::new()];
    let mut exact = true;
    for a in args {
        let (cands, ex) = cfg.candidates(a);
        exact &= ex;
        out = out.into_iter().flat_map(|t| cands.iter().map(move |c| [t.clone(), vec![c.clone()]].concat())).collect();
    }
    (out, exact)
}

/// Compares two closed values of the same type by applying them to every
/// candidate argument tuple.
pub fn bisim_value(v: &ecps::Value, w: &ecps::Value, cfg: &QuantConfig) -> Result<EquivReport, EquivError> {
    let sig = cfg.sig();
    let (tv, tw) = (type_of_ecps_value(&sig, &TypeEnv::new(), v)?, type_of_ecps_value(&sig, &TypeEnv::new(), w)?);
    if tv != tw {
        return Err(EquivError::TypeMismatch { left: tv.to_string(), right: tw.to_string() });
    }
    let mut report = EquivReport::new(v.to_string(), w.to_string(), &cfg.family);
    match &tv {
        EcpsType::Unit => {}
        EcpsType::Nat => {
            if v.as_numeral() != w.as_numeral() {
                let p = Observation::AllTrees;
                report.fail(Witness {
                    observation: format!("{{{}}}", v.as_numeral().unwrap_or(0)),
                    ..observed(&p, Verdict::Holds, Verdict::Fails)
                });
            }
        }
        EcpsType::Neg(args) => {
            let (ts, exact) = tuples(args, cfg);
            report.pool_relative = !exact;
            for tuple in ts {
                report.exercised += 1;
                let sub = bisim_comp(&ecps::Comp::app(v.clone(), tuple.clone()), &ecps::Comp::app(w.clone(), tuple.clone()), cfg)?;
                match sub.verdict {
                    Verdict::Fails => {
                        let mut wit = sub.witness.expect("failing reports carry a witness");
                        wit.arguments = tuple.iter().map(|a| a.to_string()).collect();
                        wit.argument_values = tuple;
                        report.checks.extend(sub.checks);
                        report.fail(wit);
                        report.pool_relative = false;
                        return Ok(report);
                    }
                    Verdict::Unknown => report.verdict = Verdict::Unknown,
                    Verdict::Holds => {}
                }
            }
        }
    }
    Ok(report)
}

/// A generated stock of closing contexts for terms of the given shape:
/// applications to candidate arguments, λ-closers over `env`, and case
/// wrappers for numerals.
pub fn stock_contexts(env: &TypeEnv<EcpsType>, hole: Option<&EcpsType>, cfg: &QuantConfig) -> Vec<Context> {
    let params: Vec<(String, EcpsType)> = env.iter().map(|(x, t)| (x.clone(), t.clone())).collect();
    let env_types: Vec<EcpsType> = params.iter().map(|(_, t)| t.clone()).collect();
    let (closers, _) = tuples(&env_types, cfg);
    let mut out = Vec::new();
    match hole {
        None => {
            for args in closers {
                if params.is_empty() {
                    out.push(Context::comp_hole());
                } else {
                    let lam = CompToValue { params: params.clone(), body: Box::new(CompToComp::Hole) };
                    out.push(Context::CC(CompToComp::AppHead(Box::new(lam), args)));
                }
            }
        }
        Some(ty) => {
            let inner: Vec<ValueToComp> = match ty {
                EcpsType::Unit => vec![ValueToComp::AppArg(
                    ecps::Value::lam1("u", EcpsType::Unit, ecps::Comp::Stop),
                    vec![],
                    Box::new(ValueToValue::Hole),
                    vec![],
                )],
                EcpsType::Nat => library(&[EcpsType::Nat], cfg.numeral_bound)
                    .into_iter()
                    .map(|k| ValueToComp::AppArg(k, vec![], Box::new(ValueToValue::Hole), vec![]))
                    .collect(),
                EcpsType::Neg(args) => {
                    tuples(args, cfg).0.into_iter().map(|a| ValueToComp::AppHead(Box::new(ValueToValue::Hole), a)).collect()
                }
            };
            for c in inner {
                if params.is_empty() {
                    out.push(Context::VC(c));
                } else {
                    for args in &closers {
                        let lam = ValueToValue::Lam(params.clone(), Box::new(c.clone()));
                        out.push(Context::VC(ValueToComp::AppHead(Box::new(lam), args.clone())));
                    }
                }
            }
        }
    }
    out
}

/// Runs two terms in each context and compares all family observations.
pub fn ctx_test(
    s: &ecps::Term,
    t: &ecps::Term,
    env: &TypeEnv<EcpsType>,
    contexts: &[Context],
    cfg: &QuantConfig,
) -> Result<EquivReport, EquivError> {
    let sig = cfg.sig();
    let family = &cfg.family;
    let mut report = EquivReport::new(s.to_string(), t.to_string(), family);
    report.pool_relative = true;
    if let (EcpsJudgement::Value(a), EcpsJudgement::Value(b)) = (typecheck_ecps(&sig, env, s)?, typecheck_ecps(&sig, env, t)?) {
        if a != b {
            return Err(EquivError::TypeMismatch { left: a.to_string(), right: b.to_string() });
        }
    }
    let obs = observation_set(family);
    for ctx in contexts {
        let (fs, ft) = match (ctx.fill(s)?, ctx.fill(t)?) {
            (ecps::Term::Comp(a), ecps::Term::Comp(b)) => (a, b),
            _ => return Err(ContextError::KindMismatch { hole: Kind::Comp, given: Kind::Value }.into()),
        };
        check_ecps_comp(&sig, &TypeEnv::new(), &fs)?;
        check_ecps_comp(&sig, &TypeEnv::new(), &ft)?;
        report.exercised += 1;
        let (ta, tb) = trees(&fs, &ft, cfg)?;
        for p in &obs {
            let (a, b) = (check_observation(&ta, p, family)?, check_observation(&tb, p, family)?);
            if a.is_definite() && b.is_definite() && a != b {
                report.checks.push(Check { observation: p.to_string(), left: a, right: b });
                report.fail(Witness { context: Some(ctx.to_string()), ..observed(p, a, b) });
                report.pool_relative = false;
                return Ok(report);
            }
            if !(a.is_definite() && b.is_definite()) && report.verdict == Verdict::Holds {
                report.verdict = Verdict::Unknown;
            }
        }
    }
    Ok(report)
}
