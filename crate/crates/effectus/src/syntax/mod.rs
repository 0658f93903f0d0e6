//! Terms, types, parsing, printing and typing for both calculi.

pub mod alpha;
pub mod ecps;
pub mod epcf;
pub mod fresh;
pub mod lexer;
pub mod parse;
pub mod print;
pub mod sig;
pub mod subst;
pub mod types;
pub mod typing;

pub type Name = String;

pub use lexer::ParseError;
pub use sig::{Arity, EffectSig};
pub use types::{EcpsType, EpcfType, TypeEnv};
pub use typing::TypeError;
