//! Exact set of nonisomorphic leaf-induced subtrees, computed bottom-up.
//!
//! An induced subtree of the subtree at `v` either lives inside one branch of
//! `v`, or its leaves meet two or more branches and `v` is its root. In the
//! second case its branches are arbitrary induced subtrees of the branches
//! that were hit, one per branch. Treating both cases at once: pick at most
//! one induced subtree from each branch of `v`; one pick is the subtree
//! itself (the unary root is suppressed), two or more picks hang below `v`.
//!
//! Picks are accumulated branch by branch as multisets ("forests"), deduplicated
//! as they grow; the last branch is streamed against the stored forests so
//! the Cartesian product is never held in memory.

use std::collections::HashSet;

use num_bigint::BigUint;
use thiserror::Error;

use crate::tree::{CodeId, CodeSet, Interner, TopTree};

/// Default cap on the number of classes (and partial forests) a computation
/// may create.
pub const DEFAULT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("more than {cap} distinct codes; instance is intractable at this cap")]
    DistinctSetOverflow { cap: usize },
    #[error("a single-vertex tree has no root-containing subtrees with two or more leaves")]
    SingleLeafTree,
}

impl DpError {
    pub fn name(&self) -> &'static str {
        match self {
            DpError::DistinctSetOverflow { .. } => "DistinctSetOverflow",
            DpError::SingleLeafTree => "SingleLeafTree",
        }
    }
}

struct Engine {
    interner: Interner,
    cap: usize,
    stamp: Vec<u32>,
    epoch: u32,
    buf: Vec<CodeId>,
}

impl Engine {
    fn new(cap: usize) -> Self {
        Engine {
            interner: Interner::new(),
            cap,
            stamp: Vec::new(),
            epoch: 0,
            buf: Vec::new(),
        }
    }

    fn overflow(&self) -> DpError {
        DpError::DistinctSetOverflow { cap: self.cap }
    }

    /// Distinct sets of every node below the root, indexed by node id.
    fn sets_below_root(&mut self, tree: &TopTree) -> Result<Vec<Vec<CodeId>>, DpError> {
        let root = tree.root();
        let mut sets: Vec<Vec<CodeId>> = vec![Vec::new(); tree.arena_len()];
        for id in tree.node_ids().take(root.index()) {
            let ch = tree.children(id);
            let out = if ch.is_empty() {
                vec![CodeId::LEAF]
            } else {
                let branch_sets: Vec<&[CodeId]> =
                    ch.iter().map(|c| sets[c.index()].as_slice()).collect();
                self.combine(&branch_sets, 1)?
            };
            sets[id.index()] = out;
        }
        Ok(sets)
    }

    /// Classes obtained by picking at most one member from each of
    /// `branch_sets`, at least `min_picks` in total, and joining the picks.
    fn combine(
        &mut self,
        branch_sets: &[&[CodeId]],
        min_picks: usize,
    ) -> Result<Vec<CodeId>, DpError> {
        let (last, init) = branch_sets.split_last().expect("internal vertex");

        // forests are kept sorted by id so equal multisets compare equal
        let mut forests: Vec<Vec<CodeId>> = vec![Vec::new()];
        let mut known: HashSet<Vec<CodeId>> = HashSet::new();
        known.insert(Vec::new());
        for set in init {
            let before = forests.len();
            for f in 0..before {
                for &c in set.iter() {
                    let mut g = forests[f].clone();
                    let at = g.partition_point(|&x| x <= c);
                    g.insert(at, c);
                    if known.insert(g.clone()) {
                        forests.push(g);
                        if forests.len() > self.cap {
                            return Err(self.overflow());
                        }
                    }
                }
            }
        }

        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let mut out = Vec::new();
        for f in &forests {
            if f.len() >= min_picks && !f.is_empty() {
                self.emit(f, None, &mut out)?;
            }
            if f.len() + 1 >= min_picks {
                for &c in last.iter() {
                    self.emit(f, Some(c), &mut out)?;
                }
            }
        }
        Ok(out)
    }

    fn emit(
        &mut self,
        forest: &[CodeId],
        extra: Option<CodeId>,
        out: &mut Vec<CodeId>,
    ) -> Result<(), DpError> {
        self.buf.clear();
        self.buf.extend_from_slice(forest);
        self.buf.extend(extra);
        let code = self.interner.join(&mut self.buf);
        if self.interner.len() > self.cap {
            return Err(self.overflow());
        }
        if self.stamp.len() < self.interner.len() {
            self.stamp.resize(self.interner.len(), 0);
        }
        let slot = &mut self.stamp[code.index()];
        if *slot != self.epoch {
            *slot = self.epoch;
            out.push(code);
        }
        Ok(())
    }

    fn root_set(mut self, tree: &TopTree, min_picks: usize) -> Result<CodeSet, DpError> {
        let root = tree.root();
        let ch = tree.children(root);
        if ch.is_empty() {
            return if min_picks <= 1 {
                Ok(CodeSet::new(self.interner, vec![CodeId::LEAF]))
            } else {
                Err(DpError::SingleLeafTree)
            };
        }
        let sets = self.sets_below_root(tree)?;
        let branch_sets: Vec<&[CodeId]> = ch.iter().map(|c| sets[c.index()].as_slice()).collect();
        let ids = self.combine(&branch_sets, min_picks)?;
        Ok(CodeSet::new(self.interner, ids))
    }
}

/// Every nonisomorphic leaf-induced subtree of `tree`.
pub fn distinct_codes(tree: &TopTree, cap: usize) -> Result<CodeSet, DpError> {
    Engine::new(cap).root_set(tree, 1)
}

/// Number of nonisomorphic leaf-induced subtrees of `tree`.
pub fn count_distinct(tree: &TopTree, cap: usize) -> Result<BigUint, DpError> {
    distinct_codes(tree, cap).map(|s| BigUint::from(s.len()))
}

/// Induced subtrees whose leaves meet at least two branches of the root, so
/// that the root of `tree` is their root.
pub fn root_containing_codes(tree: &TopTree, cap: usize) -> Result<CodeSet, DpError> {
    Engine::new(cap).root_set(tree, 2)
}
