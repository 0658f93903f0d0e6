//! Small-step evaluation of both calculi and finite tree construction.

use thiserror::Error;

use crate::syntax::alpha::{alpha_eq_ecps_comp, alpha_eq_epcf_config};
use crate::syntax::fresh::NameSupply;
use crate::syntax::subst::{subst1_ecps, subst1_epcf, subst_ecps_comp};
use crate::syntax::types::EpcfType;
use crate::syntax::{ecps, epcf, Name};
use crate::trees::{Tree, TreeApprox, TreeParams};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("stuck term: {0}")]
    Stuck(String),
}

fn stuck<T>(what: impl std::fmt::Display) -> Result<T, StepError> {
    Err(StepError::Stuck(what.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpcfConfig {
    pub stack: epcf::Stack,
    pub comp: epcf::Comp,
}

impl EpcfConfig {
    pub fn new(stack: epcf::Stack, comp: epcf::Comp) -> EpcfConfig {
        EpcfConfig { stack, comp }
    }

    pub fn start(comp: epcf::Comp) -> EpcfConfig {
        EpcfConfig { stack: epcf::Stack::id(), comp }
    }
}

/// How an effect node's children are produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpcfKont {
    /// Child `n` is `(S, W n̄)`.
    Fun(epcf::Stack, epcf::Value),
    /// Finitely many children `(S, Mᵢ)`, for operations not yet normalized.
    Comps(epcf::Stack, Vec<epcf::Comp>),
}

/// Child `n` is `t[n̄/x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcpsKont {
    pub binder: Name,
    pub body: ecps::Comp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Effect<K> {
    pub op: Name,
    pub index: Option<u64>,
    pub kont: K,
}

impl Effect<EpcfKont> {
    /// `None` for infinite branching.
    pub fn arity(&self) -> Option<usize> {
        match &self.kont {
            EpcfKont::Fun(..) => None,
            EpcfKont::Comps(_, ms) => Some(ms.len()),
        }
    }

    pub fn child(&self, n: u64) -> Option<EpcfConfig> {
        match &self.kont {
            EpcfKont::Fun(s, w) => Some(EpcfConfig::new(s.clone(), epcf::Comp::App(w.clone(), epcf::Value::numeral(n)))),
            EpcfKont::Comps(s, ms) => ms.get(n as usize).map(|m| EpcfConfig::new(s.clone(), m.clone())),
        }
    }
}

impl Effect<EcpsKont> {
    pub fn arity(&self) -> Option<usize> {
        None
    }

    pub fn child(&self, n: u64) -> Option<ecps::Comp> {
        Some(subst1_ecps(&self.kont.body, &self.kont.binder, &ecps::Value::numeral(n)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome<C, K> {
    Pure(C),
    /// A direct-style computation returned into the empty stack.
    Returned(epcf::Value),
    /// A continuation-passing computation reached `stop`.
    Stopped,
    Effect(Effect<K>),
    /// Emitted by the drivers, never by a single step: pure reduction
    /// revisited a configuration after `cycle` steps.
    Diverged { cycle: u64 },
}

pub type EpcfOutcome = StepOutcome<EpcfConfig, EpcfKont>;
pub type EcpsOutcome = StepOutcome<ecps::Comp, EcpsKont>;

fn index_of_epcf(v: &epcf::Value) -> Result<u64, StepError> {
    match v.as_numeral() {
        Some(n) => Ok(n),
        None => stuck(format!("operation parameter `{v}` is not a numeral")),
    }
}

/// The value `fix F` returns:
/// `λx:τ. let F(λy:τ. let fix F = z in z y) = w in w x`.
pub fn fix_unfolding(f: &epcf::Value) -> Result<epcf::Value, StepError> {
    use epcf::{Comp as C, Value as V};
    let dom = match f {
        V::Lam(_, EpcfType::Arrow(dom, _), _) => (**dom).clone(),
        other => return stuck(format!("fix applied to `{other}`")),
    };
    let inner = V::lam("y", dom.clone(), C::let_in(C::Fix(f.clone()), "z", C::App(V::var("z"), V::var("y"))));
    let body = C::let_in(C::App(f.clone(), inner), "w", C::App(V::var("w"), V::var("x")));
    Ok(V::lam("x", dom, body))
}

pub fn epcf_step(cfg: &EpcfConfig) -> Result<EpcfOutcome, StepError> {
    use epcf::{Comp as C, OpArgs as O, Value as V};
    let pure = |stack: epcf::Stack, comp: C| Ok(StepOutcome::Pure(EpcfConfig { stack, comp }));
    match &cfg.comp {
        C::Let(m, x, n) => pure(cfg.stack.clone().push(x.clone(), (**n).clone()), (**m).clone()),
        C::Return(v) => {
            let mut stack = cfg.stack.clone();
            match stack.frames.pop() {
                None => Ok(StepOutcome::Returned(v.clone())),
                Some(fr) => {
                    let next = subst1_epcf(&fr.body, &fr.binder, v);
                    pure(stack, next)
                }
            }
        }
        C::App(V::Lam(x, _, m), v) => pure(cfg.stack.clone(), subst1_epcf(m, x, v)),
        C::App(..) => stuck(&cfg.comp),
        C::Fix(f) => pure(cfg.stack.clone(), C::Return(fix_unfolding(f)?)),
        C::Case(V::Zero, m, _, _) => pure(cfg.stack.clone(), (**m).clone()),
        C::Case(V::Succ(v), _, x, n) => pure(cfg.stack.clone(), subst1_epcf(n, x, v)),
        C::Case(..) => stuck(&cfg.comp),
        C::Op(name, args) => {
            let s = cfg.stack.clone();
            let (index, kont) = match args {
                O::Plain(ms) => (None, EpcfKont::Comps(s, ms.clone())),
                O::Param(v, ms) => (Some(index_of_epcf(v)?), EpcfKont::Comps(s, ms.clone())),
                O::Inf(w) => (None, EpcfKont::Fun(s, w.clone())),
                O::ParamInf(v, w) => (Some(index_of_epcf(v)?), EpcfKont::Fun(s, w.clone())),
            };
            Ok(StepOutcome::Effect(Effect { op: name.clone(), index, kont }))
        }
    }
}

fn index_of_ecps(v: &ecps::Value) -> Result<u64, StepError> {
    match v.as_numeral() {
        Some(n) => Ok(n),
        None => stuck(format!("operation parameter `{v}` is not a numeral")),
    }
}

pub fn ecps_step(t: &ecps::Comp) -> Result<EcpsOutcome, StepError> {
    use ecps::{Comp as C, Value as V};
    match t {
        C::Stop => Ok(StepOutcome::Stopped),
        C::App(V::Lam(params, body), args) => {
            if params.len() != args.len() {
                return stuck(t);
            }
            let map = params.iter().map(|(x, _)| x.clone()).zip(args.iter().cloned()).collect();
            Ok(StepOutcome::Pure(subst_ecps_comp(body, &map)))
        }
        C::App(..) => stuck(t),
        C::MuApp(x, v, args) => {
            let tys = match v {
                V::Lam(params, _) => params.iter().map(|(_, a)| a.clone()).collect::<Vec<_>>(),
                _ => return stuck(t),
            };
            let mut names = std::collections::BTreeSet::new();
            ecps::all_names_value(v, &mut names);
            names.insert(x.clone());
            let mut supply = NameSupply::avoiding(names);
            let ys: Vec<Name> = tys.iter().map(|_| supply.fresh("y")).collect();
            let unrolled = V::Lam(
                ys.iter().cloned().zip(tys).collect(),
                Box::new(C::MuApp(x.clone(), v.clone(), ys.iter().map(V::var).collect())),
            );
            let map = [(x.clone(), unrolled)].into_iter().collect();
            let head = crate::syntax::subst::subst_ecps_value(v, &map);
            Ok(StepOutcome::Pure(C::App(head, args.clone())))
        }
        C::Op(name, v, x, body) => Ok(StepOutcome::Effect(Effect {
            op: name.clone(),
            index: Some(index_of_ecps(v)?),
            kont: EcpsKont { binder: x.clone(), body: (**body).clone() },
        })),
        C::Case(V::Zero, z, _, _) => Ok(StepOutcome::Pure((**z).clone())),
        C::Case(V::Succ(v), _, x, s) => Ok(StepOutcome::Pure(subst1_ecps(s, x, v))),
        C::Case(..) => stuck(t),
    }
}

/// Result of running pure steps from a starting point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run<C, K> {
    /// `Pure` only when the budget ran out; then it holds the last state.
    pub outcome: StepOutcome<C, K>,
    /// Steps consumed, including the final non-pure one.
    pub steps: u64,
}

impl<C, K> Run<C, K> {
    pub fn out_of_budget(&self) -> bool {
        matches!(self.outcome, StepOutcome::Pure(_))
    }
}

/// Runs pure steps until a non-pure outcome, a detected cycle, or
/// `budget` steps. Cycle detection is Brent's algorithm over the sequence
/// of states compared by `same`.
pub fn drive<C: Clone, K>(
    start: C,
    budget: u64,
    detect: bool,
    step: impl Fn(&C) -> Result<StepOutcome<C, K>, StepError>,
    same: impl Fn(&C, &C) -> bool,
) -> Result<Run<C, K>, StepError> {
    let mut current = start;
    let mut tortoise = current.clone();
    let (mut power, mut lam) = (1u64, 0u64);
    let mut steps = 0u64;
    while steps < budget {
        let out = step(&current)?;
        steps += 1;
        match out {
            StepOutcome::Pure(next) => {
                current = next;
                if detect {
                    lam += 1;
                    if same(&tortoise, &current) {
                        return Ok(Run { outcome: StepOutcome::Diverged { cycle: lam }, steps });
                    }
                    if lam == power {
                        tortoise = current.clone();
                        power *= 2;
                        lam = 0;
                    }
                }
            }
            other => return Ok(Run { outcome: other, steps }),
        }
    }
    Ok(Run { outcome: StepOutcome::Pure(current), steps })
}

pub fn epcf_same(a: &EpcfConfig, b: &EpcfConfig) -> bool {
    alpha_eq_epcf_config(&a.stack, &a.comp, &b.stack, &b.comp)
}

pub fn run_epcf(cfg: EpcfConfig, budget: u64, detect: bool) -> Result<Run<EpcfConfig, EpcfKont>, StepError> {
    drive(cfg, budget, detect, epcf_step, epcf_same)
}

pub fn run_ecps(t: ecps::Comp, budget: u64, detect: bool) -> Result<Run<ecps::Comp, EcpsKont>, StepError> {
    drive(t, budget, detect, ecps_step, alpha_eq_ecps_comp)
}

/// `|S,M|ₙ`: every step, return and effect consumes one unit of budget
/// along its own path.
pub fn epcf_tree(
    stack: &epcf::Stack,
    comp: &epcf::Comp,
    steps: u64,
    params: TreeParams,
) -> Result<TreeApprox, StepError> {
    let root = epcf_subtree(EpcfConfig::new(stack.clone(), comp.clone()), steps, params.depth, params)?;
    Ok(TreeApprox::new(params, root))
}

fn epcf_subtree(cfg: EpcfConfig, budget: u64, depth: usize, params: TreeParams) -> Result<Tree, StepError> {
    let run = run_epcf(cfg, budget, true)?;
    let left = budget - run.steps;
    Ok(match run.outcome {
        StepOutcome::Pure(_) => Tree::budget(),
        StepOutcome::Diverged { .. } => Tree::certified(),
        StepOutcome::Returned(v) => Tree::Val(v),
        StepOutcome::Stopped => unreachable!("direct-style steps never stop"),
        StepOutcome::Effect(e) => {
            if depth == 0 {
                return Ok(Tree::budget());
            }
            let (count, truncated) = match e.arity() {
                Some(n) => (n.min(params.width), n > params.width),
                None => (params.width, true),
            };
            let mut children = Vec::with_capacity(count);
            for n in 0..count as u64 {
                let child = e.child(n).expect("child within arity");
                children.push(epcf_subtree(child, left, depth - 1, params)?);
            }
            Tree::Node { op: e.op, index: e.index, children, truncated }
        }
    })
}

/// `⌊t⌋ₙ`.
pub fn ecps_tree(t: &ecps::Comp, steps: u64, params: TreeParams) -> Result<TreeApprox, StepError> {
    let root = ecps_subtree(t.clone(), steps, params.depth, params)?;
    Ok(TreeApprox::new(params, root))
}

fn ecps_subtree(t: ecps::Comp, budget: u64, depth: usize, params: TreeParams) -> Result<Tree, StepError> {
    let run = run_ecps(t, budget, true)?;
    let left = budget - run.steps;
    Ok(match run.outcome {
        StepOutcome::Pure(_) => Tree::budget(),
        StepOutcome::Diverged { .. } => Tree::certified(),
        StepOutcome::Stopped => Tree::Stop,
        StepOutcome::Returned(_) => unreachable!("continuation-passing steps never return"),
        StepOutcome::Effect(e) => {
            if depth == 0 {
                return Ok(Tree::budget());
            }
            let mut children = Vec::with_capacity(params.width);
            for n in 0..params.width as u64 {
                let child = e.child(n).expect("total child generator");
                children.push(ecps_subtree(child, left, depth - 1, params)?);
            }
            Tree::Node { op: e.op, index: e.index, children, truncated: true }
        }
    })
}
