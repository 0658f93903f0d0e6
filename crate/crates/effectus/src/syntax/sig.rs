use std::collections::BTreeMap;

use super::Name;

/// The four operation arities of the direct-style calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arity {
    /// αⁿ→α
    Finite(usize),
    /// ℕ×αⁿ→α
    ParamFinite(usize),
    /// α^ℕ→α
    Infinite,
    /// ℕ×α^ℕ→α, the only arity left after normalization.
    ParamInfinite,
}

/// A set of operation symbols with their declared arities.
///
/// An `open` signature accepts any operation name; it is used when a file
/// carries no `#effects` header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectSig {
    ops: BTreeMap<Name, Arity>,
    open: bool,
}

impl EffectSig {
    pub fn empty() -> EffectSig {
        EffectSig { ops: BTreeMap::new(), open: false }
    }

    pub fn open() -> EffectSig {
        EffectSig { ops: BTreeMap::new(), open: true }
    }

    pub fn new<I, S>(ops: I) -> EffectSig
    where
        I: IntoIterator<Item = (S, Arity)>,
        S: Into<Name>,
    {
        EffectSig {
            ops: ops.into_iter().map(|(n, a)| (n.into(), a)).collect(),
            open: false,
        }
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    /// `None` if the name is not declared and the signature is closed;
    /// `Some(None)` if the signature is open and the name is undeclared.
    pub fn lookup(&self, name: &str) -> Option<Option<Arity>> {
        match self.ops.get(name) {
            Some(a) => Some(Some(*a)),
            None if self.open => Some(None),
            None => None,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.ops.keys()
    }

    /// The signature seen by the continuation-passing calculus: same names,
    /// every arity collapsed to ℕ×α^ℕ→α.
    pub fn to_ecps(&self) -> EffectSig {
        EffectSig {
            ops: self.ops.keys().map(|n| (n.clone(), Arity::ParamInfinite)).collect(),
            open: self.open,
        }
    }
}
