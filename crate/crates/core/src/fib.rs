//! Fibonacci numbers and the two Fibonacci tree families.
//!
//! Both generators share subtrees: the arena of `f_n` holds `n + 1` internal
//! classes' worth of nodes instead of `F_{n+2}` leaves.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::tree::{NodeId, TopTree, TreeBuilder};

/// Exact Fibonacci number, `F_0 = 0`, `F_1 = 1`.
pub fn fibonacci(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `F_0..=F_n` as machine integers; panics past `F_186`.
pub fn fibonacci_table(n: usize) -> Vec<u128> {
    let mut v = vec![0u128, 1];
    while v.len() <= n {
        let k = v.len();
        v.push(
            v[k - 1]
                .checked_add(v[k - 2])
                .expect("Fibonacci number exceeds u128"),
        );
    }
    v.truncate(n + 1);
    v
}

/// Leaf-Fibonacci tree `f_n`: `f_0` is a single vertex, `f_1` a cherry, and
/// `f_n` a root over `f_{n-1}` (stored first) and `f_{n-2}`.
pub fn leaf_fibonacci(n: u32) -> TopTree {
    let mut b = TreeBuilder::new();
    let leaf = b.leaf();
    let root = if n == 0 {
        leaf
    } else {
        let mut prev = leaf;
        let mut cur = b.node(&[leaf, leaf]).expect("binary node");
        for _ in 2..=n {
            let next = b.node(&[cur, prev]).expect("binary node");
            prev = cur;
            cur = next;
        }
        cur
    };
    b.finish(root).expect("root is the last node")
}

/// Knuth's Fibonacci tree of the given order: orders 0 and 1 are the single
/// vertex, order `k` is a root over orders `k - 1` (left) and `k - 2`.
pub fn knuth_fibonacci(order: u32) -> TopTree {
    if order < 2 {
        return TopTree::leaf();
    }
    let mut b = TreeBuilder::new();
    let leaf = b.leaf();
    let (mut prev, mut cur): (NodeId, NodeId) = (leaf, leaf);
    for _ in 2..=order {
        let next = b.node(&[cur, prev]).expect("binary node");
        prev = cur;
        cur = next;
    }
    b.finish(cur).expect("root is the last node")
}
