//! Effectful PCF, its CPS target, interaction trees and program logics.

pub mod syntax;
pub mod effects;
pub mod semantics;
pub mod trees;
pub mod cps;
pub mod logic;
pub mod corpus;
pub mod equivalence;
