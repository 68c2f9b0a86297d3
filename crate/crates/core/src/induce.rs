//! Leaf-induced subtrees and the exhaustive subset oracle.
//!
//! The subtree induced by a set of leaves is the minimal subtree spanning
//! them, rooted at its vertex nearest the original root, with every
//! outdegree-1 vertex suppressed. Suppression happens while the subtree is
//! assembled: a vertex with a single surviving branch simply forwards that
//! branch upwards, so no unary vertex is ever created.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::tree::{CodeId, CodeSet, Interner, NodeId, TopTree, TreeBuilder};

/// Default cap on the number of subsets the brute-force oracle may visit.
pub const DEFAULT_SUBSET_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InduceError {
    #[error("leaf selection is empty")]
    EmptySelection,
    #[error("leaf index {index} out of range for a tree with {leaves} leaves")]
    IndexOutOfRange { index: usize, leaves: u128 },
    #[error("{leaves} leaves need 2^{leaves} - 1 subsets, over the budget of {limit}")]
    BudgetExceeded { leaves: u128, limit: u64 },
}

impl InduceError {
    pub fn name(&self) -> &'static str {
        match self {
            InduceError::EmptySelection => "EmptySelection",
            InduceError::IndexOutOfRange { .. } => "IndexOutOfRange",
            InduceError::BudgetExceeded { .. } => "BudgetExceeded",
        }
    }
}

/// A nonempty set of leaf positions, numbered 0.. in depth-first
/// left-to-right order of the tree they refer to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeafSelection(Vec<usize>);

impl LeafSelection {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self, InduceError> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(InduceError::EmptySelection);
        }
        Ok(LeafSelection(v))
    }

    /// Bit `i` of `mask` selects leaf `i`.
    pub fn from_mask(mask: u64) -> Result<Self, InduceError> {
        Self::new((0..64).filter(|i| mask >> i & 1 == 1))
    }

    /// Every leaf of a tree with `leaves` leaves.
    pub fn all(leaves: usize) -> Result<Self, InduceError> {
        Self::new(0..leaves)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The leaf-induced subtree of `tree` on `sel`.
pub fn induce(tree: &TopTree, sel: &LeafSelection) -> Result<TopTree, InduceError> {
    let counts = tree.leaf_counts();
    let total = counts[tree.root().index()];
    let sel = sel.indices();
    let last = *sel.last().expect("selections are nonempty");
    if last as u128 >= total {
        return Err(InduceError::IndexOutOfRange {
            index: last,
            leaves: total,
        });
    }

    let mut out = TreeBuilder::new();
    let mut cursor = 0usize; // next unconsumed position in `sel`
    let mut passed: u128 = 0; // leaves left of the current position
    let mut pending: Vec<NodeId> = Vec::new();
    // (node, next child, start of its surviving branches in `pending`)
    let mut stack: Vec<(NodeId, usize, usize)> = vec![(tree.root(), 0, 0)];

    while let Some(top) = stack.last_mut() {
        let (id, next, start) = *top;
        let ch = tree.children(id);
        if next < ch.len() {
            top.1 += 1;
            let c = ch[next];
            let span = counts[c.index()];
            if cursor == sel.len() || sel[cursor] as u128 >= passed + span {
                passed += span;
            } else if tree.is_leaf(c) {
                pending.push(out.leaf());
                passed += 1;
                cursor += 1;
            } else {
                stack.push((c, 0, pending.len()));
            }
            continue;
        }
        stack.pop();
        if ch.is_empty() {
            // single-vertex input tree
            pending.push(out.leaf());
            continue;
        }
        match pending.len() - start {
            0 | 1 => {}
            _ => {
                let node = out.node(&pending[start..]).expect("at least two branches");
                pending.truncate(start);
                pending.push(node);
            }
        }
    }

    let root = pending.pop().expect("a selected leaf survives");
    Ok(out.finish(root).expect("builder holds the induced subtree"))
}

/// `2^k - 1`, the number of leaf-induced subtrees of a tree with `k` leaves
/// when isomorphic copies are counted separately.
pub fn count_labeled(tree: &TopTree) -> BigUint {
    let k = usize::try_from(tree.leaf_count()).expect("leaf count fits in usize");
    (BigUint::one() << k) - BigUint::one()
}

/// Result of the exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct BruteForce {
    pub codes: CodeSet,
    pub subsets_visited: u64,
}

/// Induces every nonempty leaf subset, in increasing bitmask order, and
/// collects the distinct isomorphism classes.
pub fn enumerate_bruteforce(tree: &TopTree, limit: u64) -> Result<BruteForce, InduceError> {
    let leaves = tree.leaf_count();
    if leaves > 63 || (1u64 << leaves) - 1 > limit {
        return Err(InduceError::BudgetExceeded { leaves, limit });
    }
    let t = tree.expand();
    let n = t.arena_len();

    // leaf bits under each node; post-order numbering puts leaves in DFS order
    let mut under = vec![0u64; n];
    let mut next_bit = 0;
    for id in t.node_ids() {
        let ch = t.children(id);
        under[id.index()] = if ch.is_empty() {
            next_bit += 1;
            1u64 << (next_bit - 1)
        } else {
            ch.iter().fold(0, |acc, c| acc | under[c.index()])
        };
    }

    let mut interner = Interner::new();
    // entries of nodes without selected leaves are stale and never read
    let mut res = vec![CodeId::LEAF; n];
    let mut buf: Vec<CodeId> = Vec::new();
    let mut seen: Vec<bool> = vec![false; 1];
    let mut found: Vec<CodeId> = Vec::new();
    let mut visited = 0u64;

    for mask in 1..(1u64 << leaves) {
        visited += 1;
        for id in t.node_ids() {
            let i = id.index();
            let hit = under[i] & mask;
            if hit == 0 || hit.is_power_of_two() {
                // at most one selected leaf below: nothing, or a bare leaf
                res[i] = CodeId::LEAF;
                continue;
            }
            buf.clear();
            for c in t.children(id) {
                let h = under[c.index()] & mask;
                if h != 0 {
                    buf.push(res[c.index()]);
                }
            }
            res[i] = interner.join(&mut buf);
        }
        let code = res[n - 1];
        if seen.len() < interner.len() {
            seen.resize(interner.len(), false);
        }
        if !seen[code.index()] {
            seen[code.index()] = true;
            found.push(code);
        }
    }

    Ok(BruteForce {
        codes: CodeSet::new(interner, found),
        subsets_visited: visited,
    })
}
