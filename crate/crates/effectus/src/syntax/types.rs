use std::fmt;

use super::Name;

/// Types of the direct-style calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EpcfType {
    Unit,
    Nat,
    Arrow(Box<EpcfType>, Box<EpcfType>),
}

impl EpcfType {
    pub fn arrow(dom: EpcfType, cod: EpcfType) -> EpcfType {
        EpcfType::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn as_arrow(&self) -> Option<(&EpcfType, &EpcfType)> {
        match self {
            EpcfType::Arrow(d, c) => Some((d, c)),
            _ => None,
        }
    }
}

/// Types of the continuation-passing calculus. `Neg(args)` is the type of a
/// function that consumes `args` and never returns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EcpsType {
    Unit,
    Nat,
    Neg(Vec<EcpsType>),
}

impl EcpsType {
    pub fn neg1(arg: EcpsType) -> EcpsType {
        EcpsType::Neg(vec![arg])
    }

    pub fn neg_args(&self) -> Option<&[EcpsType]> {
        match self {
            EcpsType::Neg(args) => Some(args),
            _ => None,
        }
    }
}

impl fmt::Display for EpcfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpcfType::Unit => write!(f, "unit"),
            EpcfType::Nat => write!(f, "nat"),
            EpcfType::Arrow(d, c) => {
                if d.as_arrow().is_some() {
                    write!(f, "({d}) -> {c}")
                } else {
                    write!(f, "{d} -> {c}")
                }
            }
        }
    }
}

impl fmt::Display for EcpsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcpsType::Unit => write!(f, "unit"),
            EcpsType::Nat => write!(f, "nat"),
            EcpsType::Neg(args) => {
                write!(f, "not(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An ordered, duplicate-free typing environment. Binding a name that is
/// already present replaces the old entry (the inner binder shadows it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeEnv<T> {
    entries: Vec<(Name, T)>,
}

impl<T> Default for TypeEnv<T> {
    fn default() -> Self {
        TypeEnv { entries: Vec::new() }
    }
}

impl<T: Clone> TypeEnv<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Name, T)>>(pairs: I) -> Self {
        let mut env = Self::new();
        for (x, t) in pairs {
            env.insert(x, t);
        }
        env
    }

    pub fn insert(&mut self, x: Name, t: T) {
        self.entries.retain(|(y, _)| *y != x);
        self.entries.push((x, t));
    }

    pub fn extended(&self, x: &str, t: T) -> Self {
        let mut env = self.clone();
        env.insert(x.to_string(), t);
        env
    }

    pub fn get(&self, x: &str) -> Option<&T> {
        self.entries.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.get(x).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &T)> {
        self.entries.iter().map(|(x, t)| (x, t))
    }

    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(x, _)| x.clone()).collect()
    }
}
