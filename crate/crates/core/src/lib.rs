//! Nonisomorphic leaf-induced subtrees of topological rooted trees.

pub mod asymptotics;
pub mod cli;
pub mod dp;
pub mod fib;
pub mod induce;
pub mod recurrence;
pub mod tree;

pub use tree::{
    canonical_code, is_isomorphic, parse, serialize, CanonicalCode, CodeId, CodeSet, Interner,
    NodeId, TopTree, TreeBuilder, TreeError,
};
