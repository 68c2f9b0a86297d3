//! Topological rooted trees: rooted, unlabeled, and free of outdegree-1 vertices.
//!
//! A [`TopTree`] is stored as an arena in which every child id is smaller than
//! its parent id and the root is the last node. Nodes may be shared between
//! several parents, so the arena is a DAG whose unfolding from the root is the
//! tree. Generators use sharing to keep `f_n` linear in `n`; parsing never does.
//!
//! Because children always precede parents, every bottom-up computation in the
//! crate is a plain ascending loop over node ids and no traversal recurses.

mod canon;
mod dialect;

pub use canon::{
    canonical_code, is_isomorphic, CanonicalCode, CodeBytes, CodeId, CodeSet, Interner,
};
pub use dialect::{parse, parse_forest, serialize, ForestEntry};

use std::fmt;

use thiserror::Error;

/// Errors raised while building or parsing trees.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("vertex with exactly one child at byte {pos}")]
    UnaryVertex { pos: usize },
    #[error("unknown node id {0}")]
    UnknownNode(u32),
}

impl TreeError {
    /// Stable name used for machine-readable diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            TreeError::Syntax { .. } => "SyntaxError",
            TreeError::UnaryVertex { .. } => "UnaryVertexError",
            TreeError::UnknownNode(_) => "UnknownNode",
        }
    }
}

/// Index of a node inside one [`TopTree`] or [`TreeBuilder`] arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Incremental constructor for [`TopTree`] arenas.
///
/// Nodes are added children-first, which is what keeps the "child id < parent
/// id" invariant. A node id may be passed to several [`TreeBuilder::node`]
/// calls to share a subtree.
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    first: Vec<u32>,
    kids: Vec<NodeId>,
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder {
            first: vec![0],
            kids: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.first.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn leaf(&mut self) -> NodeId {
        self.push(&[])
    }

    /// Adds an internal vertex over `children`, which must already exist.
    pub fn node(&mut self, children: &[NodeId]) -> Result<NodeId, TreeError> {
        if children.len() < 2 {
            return Err(TreeError::UnaryVertex { pos: 0 });
        }
        let len = self.len() as u32;
        if let Some(bad) = children.iter().find(|c| c.0 >= len) {
            return Err(TreeError::UnknownNode(bad.0));
        }
        Ok(self.push(children))
    }

    /// Copies every node of `tree` into this builder and returns the id of
    /// its root here. Sharing inside `tree` is preserved.
    pub fn graft(&mut self, tree: &TopTree) -> NodeId {
        let offset = self.len() as u32;
        let mut buf = Vec::new();
        for id in tree.node_ids() {
            buf.clear();
            buf.extend(tree.children(id).iter().map(|c| NodeId(c.0 + offset)));
            self.push(&buf);
        }
        NodeId(offset + tree.root().0)
    }

    fn push(&mut self, children: &[NodeId]) -> NodeId {
        let id = NodeId(self.len() as u32);
        self.kids.extend_from_slice(children);
        self.first.push(self.kids.len() as u32);
        id
    }

    /// Seals the arena with `root` as the root. Nodes not reachable from
    /// `root` are dropped and the rest renumbered in the same relative order.
    pub fn finish(self, root: NodeId) -> Result<TopTree, TreeError> {
        let n = self.len();
        if root.index() >= n {
            return Err(TreeError::UnknownNode(root.0));
        }
        let children = |i: usize| &self.kids[self.first[i] as usize..self.first[i + 1] as usize];
        if root.index() == n - 1 {
            let mut reachable = vec![false; n];
            reachable[root.index()] = true;
            for i in (0..n).rev() {
                if reachable[i] {
                    for c in children(i) {
                        reachable[c.index()] = true;
                    }
                }
            }
            if reachable.iter().all(|&r| r) {
                return Ok(TopTree {
                    first: self.first,
                    kids: self.kids,
                });
            }
        }

        let mut reachable = vec![false; n];
        reachable[root.index()] = true;
        for i in (0..=root.index()).rev() {
            if reachable[i] {
                for c in children(i) {
                    reachable[c.index()] = true;
                }
            }
        }
        let mut remap = vec![u32::MAX; n];
        let mut out = TreeBuilder::new();
        let mut buf = Vec::new();
        for i in 0..=root.index() {
            if !reachable[i] {
                continue;
            }
            buf.clear();
            buf.extend(children(i).iter().map(|c| NodeId(remap[c.index()])));
            remap[i] = out.push(&buf).0;
        }
        Ok(TopTree {
            first: out.first,
            kids: out.kids,
        })
    }
}

/// A rooted unlabeled tree with no vertex of outdegree 1.
///
/// Child order is stored (and reflected by non-canonical serialization) but
/// carries no meaning: every derived quantity is invariant under permuting
/// children.
#[derive(Clone, PartialEq, Eq)]
pub struct TopTree {
    first: Vec<u32>,
    kids: Vec<NodeId>,
}

impl fmt::Debug for TopTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TopTree({})", serialize(self, false))
    }
}

impl fmt::Display for TopTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self, false))
    }
}

impl TopTree {
    /// The single-vertex tree.
    pub fn leaf() -> Self {
        TopTree {
            first: vec![0, 0],
            kids: Vec::new(),
        }
    }

    /// A root whose branches are `branches`, in the given order.
    pub fn join(branches: &[TopTree]) -> Result<Self, TreeError> {
        if branches.len() < 2 {
            return Err(TreeError::UnaryVertex { pos: 0 });
        }
        let mut b = TreeBuilder::new();
        let roots: Vec<NodeId> = branches.iter().map(|t| b.graft(t)).collect();
        let root = b.node(&roots)?;
        b.finish(root)
    }

    pub fn root(&self) -> NodeId {
        NodeId((self.first.len() - 2) as u32)
    }

    /// Number of arena nodes; shared nodes count once.
    pub fn arena_len(&self) -> usize {
        self.first.len() - 1
    }

    pub fn node_ids(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.arena_len() as u32).map(NodeId)
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        let i = id.index();
        &self.kids[self.first[i] as usize..self.first[i + 1] as usize]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.children(id).is_empty()
    }

    pub fn is_single_vertex(&self) -> bool {
        self.arena_len() == 1
    }

    /// True when no arena node has more than one parent.
    pub fn is_unshared(&self) -> bool {
        self.kids.len() + 1 == self.arena_len()
    }

    /// Per-node leaf counts of the unfolded subtrees, indexed by node id.
    pub fn leaf_counts(&self) -> Vec<u128> {
        let mut counts = vec![0u128; self.arena_len()];
        for id in self.node_ids() {
            let ch = self.children(id);
            counts[id.index()] = if ch.is_empty() {
                1
            } else {
                ch.iter().fold(0u128, |acc, c| {
                    acc.checked_add(counts[c.index()])
                        .expect("leaf count exceeds u128")
                })
            };
        }
        counts
    }

    /// Number of leaves of the (unfolded) tree.
    pub fn leaf_count(&self) -> u128 {
        self.leaf_counts()[self.root().index()]
    }

    /// Greatest edge distance from the root to a leaf.
    pub fn height(&self) -> u64 {
        let mut h = vec![0u64; self.arena_len()];
        for id in self.node_ids() {
            h[id.index()] = self
                .children(id)
                .iter()
                .map(|c| h[c.index()] + 1)
                .max()
                .unwrap_or(0);
        }
        h[self.root().index()]
    }

    /// Number of vertices of the unfolded tree.
    pub fn vertex_count(&self) -> u128 {
        let mut v = vec![0u128; self.arena_len()];
        for id in self.node_ids() {
            v[id.index()] = self.children(id).iter().fold(1u128, |acc, c| {
                acc.checked_add(v[c.index()])
                    .expect("vertex count exceeds u128")
            });
        }
        v[self.root().index()]
    }

    /// Unfolds shared nodes so that every vertex appears once. Node ids of
    /// the result follow post-order, hence leaves appear in depth-first
    /// left-to-right order.
    pub fn expand(&self) -> TopTree {
        if self.is_unshared() && self.is_postorder() {
            return self.clone();
        }
        let mut out = TreeBuilder::new();
        let mut pending: Vec<NodeId> = Vec::new();
        // (node, next child, start of this frame's entries in `pending`)
        let mut stack: Vec<(NodeId, usize, usize)> = vec![(self.root(), 0, 0)];
        while let Some(top) = stack.last_mut() {
            let (id, next, start) = *top;
            let ch = self.children(id);
            if next < ch.len() {
                top.1 += 1;
                stack.push((ch[next], 0, pending.len()));
                continue;
            }
            stack.pop();
            let new_id = if ch.is_empty() {
                out.leaf()
            } else {
                let new_id = out.push(&pending[start..]);
                pending.truncate(start);
                new_id
            };
            pending.push(new_id);
        }
        TopTree {
            first: out.first,
            kids: out.kids,
        }
    }

    fn is_postorder(&self) -> bool {
        // post-order: each subtree occupies the contiguous id range ending at its root
        let mut size = vec![0usize; self.arena_len()];
        for id in self.node_ids() {
            let mut expect_end = id.index();
            let ch = self.children(id);
            let mut total = 1;
            for c in ch.iter().rev() {
                if c.index() + 1 != expect_end {
                    return false;
                }
                expect_end -= size[c.index()];
                total += size[c.index()];
            }
            size[id.index()] = total;
        }
        true
    }

    /// Leaf node ids in depth-first, left-to-right order of the unfolded
    /// tree (shared leaves may repeat).
    pub fn leaves_dfs(&self) -> Vec<NodeId> {
        let mut leaves = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(id) = stack.pop() {
            let ch = self.children(id);
            if ch.is_empty() {
                leaves.push(id);
            } else {
                stack.extend(ch.iter().rev());
            }
        }
        leaves
    }

    /// Copy of the tree with the children of every node reordered by
    /// `order`, which receives the node id and its child list.
    pub fn permute_children<F>(&self, mut order: F) -> TopTree
    where
        F: FnMut(NodeId, &mut [NodeId]),
    {
        let mut kids = self.kids.clone();
        for id in self.node_ids() {
            let i = id.index();
            let slice = &mut kids[self.first[i] as usize..self.first[i + 1] as usize];
            order(id, slice);
        }
        TopTree {
            first: self.first.clone(),
            kids,
        }
    }
}
