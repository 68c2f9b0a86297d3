//! Canonical codes and the code interner.
//!
//! The canonical code of a tree is its dialect text with the children of every
//! vertex listed in increasing (length, byte-lexicographic) order of their own
//! codes. Two trees have the same code exactly when they are isomorphic as
//! rooted trees.
//!
//! Codes are never stored as text. The [`Interner`] keeps one entry per
//! isomorphism class, holding the ids of its branches in canonical order, so a
//! DP over millions of classes only pays a few machine words per class. Text
//! is streamed out of the structure on demand by [`CodeBytes`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::BuildHasher;

use hashbrown::{DefaultHashBuilder, HashTable};

use super::{parse, TopTree};

/// Handle of one isomorphism class inside an [`Interner`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodeId(u32);

impl CodeId {
    /// The single-vertex tree; present in every interner.
    pub const LEAF: CodeId = CodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Textual canonical form of a rooted topological tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn of(tree: &TopTree) -> Self {
        canonical_code(tree)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn to_tree(&self) -> TopTree {
        parse(&self.0).expect("canonical codes are valid dialect text")
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CanonicalCode {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone)]
struct Entry {
    start: u32,
    arity: u32,
    text_len: u64,
    leaves: u64,
}

/// Hash-consing table of rooted-tree isomorphism classes.
///
/// Every branch of an interned class has a smaller id than the class itself.
#[derive(Debug, Clone)]
pub struct Interner {
    entries: Vec<Entry>,
    pool: Vec<CodeId>,
    table: HashTable<u32>,
    hasher: DefaultHashBuilder,
}

impl Default for Interner {
    fn default() -> Self {
        Self::new()
    }
}

fn branches_of<'a>(entries: &[Entry], pool: &'a [CodeId], id: u32) -> &'a [CodeId] {
    let e = &entries[id as usize];
    &pool[e.start as usize..(e.start + e.arity) as usize]
}

impl Interner {
    pub fn new() -> Self {
        let mut interner = Interner {
            entries: vec![Entry {
                start: 0,
                arity: 0,
                text_len: 1,
                leaves: 1,
            }],
            pool: Vec::new(),
            table: HashTable::new(),
            hasher: DefaultHashBuilder::default(),
        };
        let h = interner.hasher.hash_one::<&[CodeId]>(&[]);
        interner.table.insert_unique(h, 0, |_| h);
        interner
    }

    /// Number of classes interned so far, including the leaf.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Branches of `id` in canonical order; empty for the leaf.
    pub fn branches(&self, id: CodeId) -> &[CodeId] {
        branches_of(&self.entries, &self.pool, id.0)
    }

    pub fn leaves(&self, id: CodeId) -> u64 {
        self.entries[id.index()].leaves
    }

    /// Length in bytes of the code text.
    pub fn text_len(&self, id: CodeId) -> u64 {
        self.entries[id.index()].text_len
    }

    /// The fixed total order on codes: shorter text first, then bytewise.
    pub fn cmp_codes(&self, a: CodeId, b: CodeId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.text_len(a)
            .cmp(&self.text_len(b))
            .then_with(|| self.bytes(a).cmp(self.bytes(b)))
    }

    pub fn bytes(&self, id: CodeId) -> CodeBytes<'_> {
        CodeBytes {
            interner: self,
            stack: vec![(id, 0)],
        }
    }

    pub fn render(&self, id: CodeId) -> CanonicalCode {
        let mut s = String::with_capacity(self.text_len(id) as usize);
        s.extend(self.bytes(id).map(char::from));
        CanonicalCode(s)
    }

    /// Class of a root whose branches are `branches`. A single branch is
    /// returned unchanged, matching the suppression of outdegree-1 vertices.
    /// `branches` is reordered in place.
    ///
    /// Panics on an empty slice or when the id space (`u32`) is exhausted.
    pub fn join(&mut self, branches: &mut [CodeId]) -> CodeId {
        match branches.len() {
            0 => panic!("join of an empty forest"),
            1 => return branches[0],
            _ => {}
        }
        branches.sort_unstable_by(|&a, &b| self.cmp_codes(a, b));
        let hash = self.hasher.hash_one(&*branches);
        let Interner {
            entries,
            pool,
            table,
            hasher,
        } = self;
        if let Some(&id) = table.find(hash, |&id| branches_of(entries, pool, id) == &*branches) {
            return CodeId(id);
        }
        let id = u32::try_from(entries.len())
            .ok()
            .filter(|&id| id < u32::MAX)
            .expect("interner id space exhausted");
        let start = u32::try_from(pool.len()).expect("interner branch pool exhausted");
        let mut text_len = 1 + branches.len() as u64; // parens plus commas
        let mut leaves = 0u64;
        for b in branches.iter() {
            let e = &entries[b.index()];
            text_len += e.text_len;
            leaves += e.leaves;
        }
        pool.extend_from_slice(branches);
        entries.push(Entry {
            start,
            arity: branches.len() as u32,
            text_len,
            leaves,
        });
        table.insert_unique(hash, id, |&k| {
            hasher.hash_one(branches_of(entries, pool, k))
        });
        CodeId(id)
    }

    /// Like [`Interner::join`] but never inserts.
    pub fn find(&self, branches: &mut [CodeId]) -> Option<CodeId> {
        match branches.len() {
            0 => return None,
            1 => return Some(branches[0]),
            _ => {}
        }
        branches.sort_unstable_by(|&a, &b| self.cmp_codes(a, b));
        let hash = self.hasher.hash_one(&*branches);
        self.table
            .find(hash, |&id| self.branches(CodeId(id)) == &*branches)
            .map(|&id| CodeId(id))
    }

    /// Interns every subtree of `tree` and returns the class of the root.
    pub fn intern_tree(&mut self, tree: &TopTree) -> CodeId {
        let mut code = vec![CodeId::LEAF; tree.arena_len()];
        let mut buf = Vec::new();
        for id in tree.node_ids() {
            let ch = tree.children(id);
            if ch.is_empty() {
                continue;
            }
            buf.clear();
            buf.extend(ch.iter().map(|c| code[c.index()]));
            code[id.index()] = self.join(&mut buf);
        }
        code[tree.root().index()]
    }

    /// Class of `tree` if it (and hence every subtree) is already interned.
    pub fn find_tree(&self, tree: &TopTree) -> Option<CodeId> {
        let mut code = vec![CodeId::LEAF; tree.arena_len()];
        let mut buf = Vec::new();
        for id in tree.node_ids() {
            let ch = tree.children(id);
            if ch.is_empty() {
                continue;
            }
            buf.clear();
            buf.extend(ch.iter().map(|c| code[c.index()]));
            code[id.index()] = self.find(&mut buf)?;
        }
        Some(code[tree.root().index()])
    }

    /// Maps classes of `other` to the same classes here, without inserting.
    pub fn locate_all(&self, other: &Interner, ids: &[CodeId]) -> Vec<Option<CodeId>> {
        let Some(top) = ids.iter().map(|id| id.index()).max() else {
            return Vec::new();
        };
        let mut needed = vec![false; top + 1];
        for id in ids {
            needed[id.index()] = true;
        }
        for i in (0..=top).rev() {
            if needed[i] {
                for b in other.branches(CodeId(i as u32)) {
                    needed[b.index()] = true;
                }
            }
        }
        let mut map: Vec<Option<CodeId>> = vec![None; top + 1];
        let mut buf = Vec::new();
        for i in 0..=top {
            if !needed[i] {
                continue;
            }
            let bs = other.branches(CodeId(i as u32));
            map[i] = if bs.is_empty() {
                Some(CodeId::LEAF)
            } else {
                buf.clear();
                let mut ok = true;
                for b in bs {
                    match map[b.index()] {
                        Some(x) => buf.push(x),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    self.find(&mut buf)
                } else {
                    None
                }
            };
        }
        ids.iter().map(|id| map[id.index()]).collect()
    }
}

/// Streams the canonical code text of one class byte by byte.
#[derive(Debug, Clone)]
pub struct CodeBytes<'a> {
    interner: &'a Interner,
    // (class, step): step 0 emits "(", odd steps descend into a branch,
    // even steps emit "," or ")"
    stack: Vec<(CodeId, u32)>,
}

impl Iterator for CodeBytes<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        loop {
            let (id, step) = self.stack.last_mut()?;
            let branches = self.interner.branches(*id);
            if branches.is_empty() {
                self.stack.pop();
                return Some(b'L');
            }
            let s = *step;
            *step += 1;
            if s == 0 {
                return Some(b'(');
            }
            if s % 2 == 1 {
                let child = branches[(s as usize - 1) / 2];
                self.stack.push((child, 0));
                continue;
            }
            if (s as usize / 2) < branches.len() {
                return Some(b',');
            }
            self.stack.pop();
            return Some(b')');
        }
    }
}

/// Canonical code of `tree`.
pub fn canonical_code(tree: &TopTree) -> CanonicalCode {
    let mut interner = Interner::new();
    let id = interner.intern_tree(tree);
    interner.render(id)
}

/// Rooted isomorphism test.
pub fn is_isomorphic(a: &TopTree, b: &TopTree) -> bool {
    let mut interner = Interner::new();
    interner.intern_tree(a) == interner.intern_tree(b)
}

/// A set of isomorphism classes together with the interner that names them.
#[derive(Debug, Clone)]
pub struct CodeSet {
    interner: Interner,
    ids: Vec<CodeId>,
}

impl CodeSet {
    pub fn new(interner: Interner, mut ids: Vec<CodeId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        CodeSet { interner, ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Member ids in increasing id order.
    pub fn ids(&self) -> &[CodeId] {
        &self.ids
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    pub fn contains_id(&self, id: CodeId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn contains_tree(&self, tree: &TopTree) -> bool {
        self.interner
            .find_tree(tree)
            .is_some_and(|id| self.contains_id(id))
    }

    pub fn contains_code(&self, code: &CanonicalCode) -> bool {
        self.contains_tree(&code.to_tree())
    }

    /// All member codes, sorted bytewise.
    pub fn codes(&self) -> Vec<CanonicalCode> {
        let mut v: Vec<CanonicalCode> = self
            .ids
            .iter()
            .map(|&id| self.interner.render(id))
            .collect();
        v.sort_unstable();
        v
    }

    /// True when every class of `self` is a class of `other`.
    pub fn is_subset(&self, other: &CodeSet) -> bool {
        other
            .interner
            .locate_all(&self.interner, &self.ids)
            .into_iter()
            .all(|m| m.is_some_and(|id| other.contains_id(id)))
    }

    /// Set equality, independent of how either side numbered its classes.
    pub fn same_codes(&self, other: &CodeSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    /// The subset of classes with at least `k` leaves.
    pub fn with_min_leaves(&self, k: u64) -> CodeSet {
        let ids = self
            .ids
            .iter()
            .copied()
            .filter(|&id| self.interner.leaves(id) >= k)
            .collect();
        CodeSet::new(self.interner.clone(), ids)
    }

    /// Number of classes per leaf count.
    pub fn leaf_histogram(&self) -> BTreeMap<u64, usize> {
        let mut h = BTreeMap::new();
        for &id in &self.ids {
            *h.entry(self.interner.leaves(id)).or_insert(0) += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{serialize, TreeBuilder};

    fn code(s: &str) -> String {
        canonical_code(&parse(s).unwrap()).into_string()
    }

    #[test]
    fn small_codes() {
        assert_eq!(code("L"), "L");
        assert_eq!(code("(L,L)"), "(L,L)");
        assert_eq!(code("((L,L),L)"), "(L,(L,L))");
        assert_eq!(code("(L,(L,L))"), "(L,(L,L))");
        // shorter branch first
        assert_eq!(code("((L,(L,L)),(L,L,L))"), "((L,L,L),(L,(L,L)))");
        // equal lengths: "(L,(L,L))" < "(L,L,L,L)" since '(' < 'L'
        assert_eq!(code("((L,L,L,L),(L,(L,L)))"), "((L,(L,L)),(L,L,L,L))");
    }

    #[test]
    fn join_suppresses_single_branch() {
        let mut i = Interner::new();
        let cherry = i.join(&mut [CodeId::LEAF, CodeId::LEAF]);
        assert_eq!(i.join(&mut [cherry]), cherry);
        assert_eq!(i.render(cherry).as_str(), "(L,L)");
        assert_eq!(i.leaves(cherry), 2);
        assert_eq!(i.text_len(cherry), 5);
    }

    #[test]
    fn find_does_not_insert() {
        let i = Interner::new();
        assert_eq!(i.find(&mut [CodeId::LEAF, CodeId::LEAF]), None);
        assert_eq!(i.len(), 1);
        let t = parse("(L,L)").unwrap();
        assert_eq!(i.find_tree(&TopTree::leaf()), Some(CodeId::LEAF));
        assert_eq!(i.find_tree(&t), None);
    }

    #[test]
    fn isomorphism() {
        let f2 = parse("((L,L),L)").unwrap();
        let m = parse("(L,(L,L))").unwrap();
        assert!(is_isomorphic(&f2, &m));
        assert!(!is_isomorphic(&parse("(L,L)").unwrap(), &TopTree::leaf()));
    }

    #[test]
    fn locate_across_interners() {
        let mut a = Interner::new();
        let mut b = Interner::new();
        let x = a.intern_tree(&parse("((L,L),(L,(L,L)))").unwrap());
        b.intern_tree(&parse("(L,(L,L),L)").unwrap());
        let y = b.intern_tree(&parse("((L,(L,L)),(L,L))").unwrap());
        assert_eq!(
            b.locate_all(&a, &[x, CodeId::LEAF]),
            vec![Some(y), Some(CodeId::LEAF)]
        );
        let z = a.intern_tree(&parse("(L,L,L,L,L)").unwrap());
        assert_eq!(b.locate_all(&a, &[z]), vec![None]);
    }

    #[test]
    fn rendered_text_matches_length() {
        let mut b = TreeBuilder::new();
        let l = b.leaf();
        let c = b.node(&[l, l, l]).unwrap();
        let d = b.node(&[c, l]).unwrap();
        let r = b.node(&[d, c, l, d]).unwrap();
        let t = b.finish(r).unwrap();
        let mut i = Interner::new();
        let id = i.intern_tree(&t);
        assert_eq!(i.render(id).as_str().len() as u64, i.text_len(id));
        assert_eq!(i.leaves(id), t.leaf_count() as u64);
        assert!(is_isomorphic(&t, &parse(&serialize(&t, true)).unwrap()));
    }
}
