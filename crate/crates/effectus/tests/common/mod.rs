#![allow(dead_code)]

use effectus::cps::gen::{gen_program, GenConfig};
use effectus::effects::ObservationFamily;
use effectus::syntax::epcf;
use effectus::trees::{BotKind, Tree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn families() -> Vec<ObservationFamily> {
    vec![
        ObservationFamily::Pure,
        ObservationFamily::Nondet,
        ObservationFamily::Prob,
        ObservationFamily::store(&["l0"], 3),
        ObservationFamily::Io,
    ]
}

/// Width that forces every child the family's observations can reach.
pub const WIDTH: usize = 3;

pub fn program(seed: u64, family: &ObservationFamily) -> epcf::Comp {
    gen_program(&mut rng(seed), family, &GenConfig::default()).0
}

pub struct TreeGen {
    pub family: ObservationFamily,
    /// Bottom kinds allowed at leaves.
    pub bots: Vec<BotKind>,
    pub max_depth: usize,
}

impl TreeGen {
    pub fn new(family: ObservationFamily) -> TreeGen {
        TreeGen { family, bots: vec![BotKind::Budget, BotKind::Certified], max_depth: 4 }
    }

    pub fn certified_only(mut self) -> TreeGen {
        self.bots = vec![BotKind::Certified];
        self
    }

    pub fn tree(&self, rng: &mut impl Rng) -> Tree {
        self.go(rng, self.max_depth)
    }

    fn leaf(&self, rng: &mut impl Rng) -> Tree {
        match rng.gen_range(0..3) {
            0 => Tree::Bot(self.bots[rng.gen_range(0..self.bots.len())]),
            _ if matches!(self.family, ObservationFamily::Pure) || rng.gen_bool(0.5) => Tree::Stop,
            _ => Tree::Val(epcf::Value::numeral(rng.gen_range(0..3))),
        }
    }

    fn go(&self, rng: &mut impl Rng, depth: usize) -> Tree {
        if depth == 0 || matches!(self.family, ObservationFamily::Pure) || rng.gen_bool(0.35) {
            return self.leaf(rng);
        }
        let kids = |rng: &mut _| (0..WIDTH).map(|_| self.go(rng, depth - 1)).collect::<Vec<_>>();
        match &self.family {
            ObservationFamily::Nondet => Tree::node("or", None, kids(rng), true),
            ObservationFamily::Prob => Tree::node("p-or", None, kids(rng), true),
            ObservationFamily::Store { locations, value_range } => {
                let loc = &locations[rng.gen_range(0..locations.len())];
                if rng.gen_bool(0.5) {
                    Tree::node(format!("lookup_{loc}"), Some(0), kids(rng), true)
                } else {
                    Tree::node(format!("update_{loc}"), Some(rng.gen_range(0..*value_range)), kids(rng), true)
                }
            }
            ObservationFamily::Io => {
                if rng.gen_bool(0.5) {
                    Tree::node("read", Some(0), kids(rng), true)
                } else {
                    Tree::node("write", Some(rng.gen_range(0..3)), kids(rng), true)
                }
            }
            ObservationFamily::Pure => unreachable!(),
        }
    }
}

/// Replaces random subtrees by ⊥ of the given kinds, giving a tree below
/// the input.
pub fn coarsen(t: &Tree, rng: &mut impl Rng, bots: &[BotKind]) -> Tree {
    if rng.gen_bool(0.2) {
        return Tree::Bot(bots[rng.gen_range(0..bots.len())]);
    }
    match t {
        Tree::Node { op, index, children, truncated } => Tree::Node {
            op: op.clone(),
            index: *index,
            children: children.iter().map(|c| coarsen(c, rng, bots)).collect(),
            truncated: *truncated,
        },
        other => other.clone(),
    }
}

/// The tree with every bottom made the same kind.
pub fn erase_bots(t: &Tree) -> Tree {
    match t {
        Tree::Bot(_) => Tree::budget(),
        Tree::Node { op, index, children, truncated } => Tree::Node {
            op: op.clone(),
            index: *index,
            children: children.iter().map(erase_bots).collect(),
            truncated: *truncated,
        },
        other => other.clone(),
    }
}

pub fn has_budget_bot(t: &Tree) -> bool {
    match t {
        Tree::Bot(BotKind::Budget) => true,
        Tree::Node { children, .. } => children.iter().any(has_budget_bot),
        _ => false,
    }
}
