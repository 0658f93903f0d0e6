//! Finite approximations of effect trees.

mod snapshot;

use serde::Serialize;
use thiserror::Error;

use crate::effects::ObservationFamily;
use crate::syntax::alpha::alpha_eq_epcf_value;
use crate::syntax::{epcf, Name};

pub use snapshot::{parse_snapshot, to_snapshot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BotKind {
    /// The step or depth budget ran out; the true subtree is unknown.
    Budget,
    /// Pure reduction was shown to cycle; the true subtree is ⊥.
    Certified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Bot(BotKind),
    Stop,
    /// Only in trees of direct-style computations.
    Val(epcf::Value),
    Node {
        op: Name,
        /// The natural-number parameter; `None` for operations without one.
        index: Option<u64>,
        children: Vec<Tree>,
        /// More children exist than were forced.
        truncated: bool,
    },
}

impl Tree {
    pub fn budget() -> Tree {
        Tree::Bot(BotKind::Budget)
    }

    pub fn certified() -> Tree {
        Tree::Bot(BotKind::Certified)
    }

    pub fn node(op: impl Into<Name>, index: Option<u64>, children: Vec<Tree>, truncated: bool) -> Tree {
        Tree::Node { op: op.into(), index, children, truncated }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Tree::Bot(_))
    }

    /// Number of `Node` constructors on the longest path.
    pub fn height(&self) -> usize {
        match self {
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::height).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn count_nodes(&self) -> usize {
        match self {
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::count_nodes).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Tree> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                Tree::Node { children, .. } => children.get(*i)?.at_path(rest),
                _ => None,
            },
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Tree::Bot(BotKind::Budget) => "bot(budget)".into(),
            Tree::Bot(BotKind::Certified) => "bot(certified)".into(),
            Tree::Stop => "stop".into(),
            Tree::Val(v) => format!("val({v})"),
            Tree::Node { op, index: Some(i), .. } => format!("{op}_{i}"),
            Tree::Node { op, index: None, .. } => op.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TreeParams {
    /// Maximum number of nodes on any path.
    pub depth: usize,
    /// Number of children forced at ℕ-branching nodes.
    pub width: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { depth: 6, width: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeApprox {
    pub params: TreeParams,
    pub root: Tree,
}

impl TreeApprox {
    pub fn new(params: TreeParams, root: Tree) -> TreeApprox {
        TreeApprox { params, root }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree parameters differ: {left:?} vs {right:?}")]
    ParamMismatch { left: TreeParams, right: TreeParams },
    #[error("snapshot {line}:{col}: {message}")]
    Snapshot { line: usize, col: usize, message: String },
}

fn same_params(a: &TreeApprox, b: &TreeApprox) -> Result<(), TreeError> {
    if a.params == b.params {
        Ok(())
    } else {
        Err(TreeError::ParamMismatch { left: a.params, right: b.params })
    }
}

/// `a ≤ b`: `a` is `b` with some subtrees replaced by ⊥.
pub fn tree_leq(a: &TreeApprox, b: &TreeApprox) -> Result<bool, TreeError> {
    same_params(a, b)?;
    Ok(leq(&a.root, &b.root))
}

pub fn leq(a: &Tree, b: &Tree) -> bool {
    match (a, b) {
        (Tree::Bot(_), _) => true,
        (Tree::Stop, Tree::Stop) => true,
        (Tree::Val(v), Tree::Val(w)) => alpha_eq_epcf_value(v, w),
        (
            Tree::Node { op: o1, index: i1, children: c1, truncated: t1 },
            Tree::Node { op: o2, index: i2, children: c2, truncated: t2 },
        ) => o1 == o2 && i1 == i2 && t1 == t2 && c1.len() == c2.len() && c1.iter().zip(c2).all(|(x, y)| leq(x, y)),
        _ => false,
    }
}

pub fn tree_eq(a: &TreeApprox, b: &TreeApprox) -> Result<bool, TreeError> {
    Ok(tree_leq(a, b)? && tree_leq(b, a)?)
}

pub fn relabel_values(t: &TreeApprox) -> TreeApprox {
    TreeApprox { params: t.params, root: relabel(&t.root) }
}

pub fn relabel(t: &Tree) -> Tree {
    match t {
        Tree::Val(_) => Tree::Stop,
        Tree::Node { op, index, children, truncated } => Tree::Node {
            op: op.clone(),
            index: *index,
            children: children.iter().map(relabel).collect(),
            truncated: *truncated,
        },
        other => other.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Compat {
    Equal,
    Divergent { path: Vec<usize>, left: String, right: String },
    Unresolved,
}

impl Compat {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Compat::Divergent { .. })
    }
}

/// Compares two approximations position by position. A certain label
/// (anything but budget-⊥) facing a different certain label is a divergence.
pub fn tree_compatible(a: &TreeApprox, b: &TreeApprox) -> Result<Compat, TreeError> {
    tree_compatible_to(a, b, usize::MAX)
}

/// As [`tree_compatible`], but budget-⊥ at or below edge depth `depth`
/// does not make the result unresolved. Conflicts are still reported.
pub fn tree_compatible_to(a: &TreeApprox, b: &TreeApprox, depth: usize) -> Result<Compat, TreeError> {
    same_params(a, b)?;
    let mut path = Vec::new();
    let mut unresolved = false;
    if let Some((l, r)) = compat(&a.root, &b.root, depth, &mut path, &mut unresolved) {
        return Ok(Compat::Divergent { path, left: l, right: r });
    }
    Ok(if unresolved { Compat::Unresolved } else { Compat::Equal })
}

fn compat(a: &Tree, b: &Tree, depth: usize, path: &mut Vec<usize>, unresolved: &mut bool) -> Option<(String, String)> {
    let conflict = || Some((a.label(), b.label()));
    match (a, b) {
        (Tree::Bot(BotKind::Budget), _) | (_, Tree::Bot(BotKind::Budget)) => {
            if path.len() < depth {
                *unresolved = true;
            }
            None
        }
        (Tree::Bot(BotKind::Certified), Tree::Bot(BotKind::Certified)) | (Tree::Stop, Tree::Stop) => None,
        (Tree::Val(v), Tree::Val(w)) => {
            if alpha_eq_epcf_value(v, w) {
                None
            } else {
                conflict()
            }
        }
        (
            Tree::Node { op: o1, index: i1, children: c1, .. },
            Tree::Node { op: o2, index: i2, children: c2, .. },
        ) => {
            if o1 != o2 || i1 != i2 || c1.len() != c2.len() {
                return conflict();
            }
            for (i, (x, y)) in c1.iter().zip(c2).enumerate() {
                path.push(i);
                if let Some(d) = compat(x, y, depth, path, unresolved) {
                    return Some(d);
                }
                path.pop();
            }
            None
        }
        _ => conflict(),
    }
}

/// Indices of the children of a node that some execution under the family
/// can visit.
pub fn occurrable(family: &ObservationFamily, op: &str, children: usize) -> Vec<usize> {
    let all = || (0..children).collect();
    match family {
        ObservationFamily::Pure => all(),
        ObservationFamily::Nondet | ObservationFamily::Prob => {
            if family.owns(op) {
                (0..children.min(2)).collect()
            } else {
                all()
            }
        }
        ObservationFamily::Store { value_range, .. } => match family.store_op(op) {
            Some((true, _)) => (0..children.min(*value_range as usize)).collect(),
            Some((false, _)) => (0..children.min(1)).collect(),
            None => all(),
        },
        ObservationFamily::Io => match op {
            "write" => (0..children.min(1)).collect(),
            _ => all(),
        },
    }
}

/// True iff no budget-⊥ leaf lies on a path that can occur under the family.
pub fn fully_explored(t: &TreeApprox, family: &ObservationFamily) -> bool {
    explored(&t.root, family)
}

pub fn explored(t: &Tree, family: &ObservationFamily) -> bool {
    match t {
        Tree::Bot(BotKind::Budget) => false,
        Tree::Node { op, children, .. } => {
            occurrable(family, op, children.len()).into_iter().all(|i| explored(&children[i], family))
        }
        _ => true,
    }
}
