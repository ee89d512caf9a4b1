//! Finite calculus of types in n-adic trees, tree-embedding transducers and
//! their actions on types, standard gaps and the catalogs of minimal gaps.

pub mod tree;
pub mod types;
pub mod witness;
pub mod embed;
pub mod word;
pub mod gaps;
pub mod catalog;
pub mod cli;
