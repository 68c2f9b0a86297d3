use num_bigint::BigUint;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use leafine::dp::{count_distinct, distinct_codes, DEFAULT_CAP};
use leafine::induce::{
    count_labeled, enumerate_bruteforce, induce, LeafSelection, DEFAULT_SUBSET_BUDGET,
};
use leafine::recurrence::{first_bound_violation, n_sequence};
use leafine::{canonical_code, is_isomorphic, parse, serialize, CanonicalCode, TopTree};

#[derive(Debug, Clone)]
enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

fn shape() -> impl Strategy<Value = Shape> {
    Just(Shape::Leaf).prop_recursive(5, 16, 4, |inner| {
        prop::collection::vec(inner, 2..=4).prop_map(Shape::Node)
    })
}

fn build(s: &Shape) -> TopTree {
    match s {
        Shape::Leaf => TopTree::leaf(),
        Shape::Node(kids) => TopTree::join(&kids.iter().map(build).collect::<Vec<_>>()).unwrap(),
    }
}

fn tree() -> impl Strategy<Value = TopTree> {
    shape().prop_map(|s| build(&s))
}

/// Canonical text by plain string sorting, independent of the interner.
fn naive_code(s: &Shape) -> String {
    match s {
        Shape::Leaf => "L".to_string(),
        Shape::Node(kids) => {
            let mut parts: Vec<String> = kids.iter().map(naive_code).collect();
            parts.sort_by(|a, b| {
                a.len()
                    .cmp(&b.len())
                    .then_with(|| a.as_bytes().cmp(b.as_bytes()))
            });
            format!("({})", parts.join(","))
        }
    }
}

fn shuffled(t: &TopTree, seed: u64) -> TopTree {
    let mut rng = StdRng::seed_from_u64(seed);
    t.permute_children(|_, kids| kids.shuffle(&mut rng))
}

fn selection(leaves: usize, mask: u64) -> LeafSelection {
    let picked: Vec<usize> = (0..leaves).filter(|i| mask >> (i % 64) & 1 == 1).collect();
    if picked.is_empty() {
        LeafSelection::new([mask as usize % leaves]).unwrap()
    } else {
        LeafSelection::new(picked).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn code_matches_naive_sort(s in shape()) {
        prop_assert_eq!(canonical_code(&build(&s)).into_string(), naive_code(&s));
    }

    #[test]
    fn code_ignores_child_order(t in tree(), seed in any::<u64>()) {
        let u = shuffled(&t, seed);
        prop_assert!(is_isomorphic(&t, &u));
        prop_assert_eq!(canonical_code(&t), canonical_code(&u));
    }

    #[test]
    fn text_round_trips(t in tree()) {
        let text = serialize(&t, false);
        prop_assert_eq!(serialize(&parse(&text).unwrap(), false), text.clone());
        let code = canonical_code(&t);
        prop_assert_eq!(canonical_code(&code.to_tree()), code.clone());
        prop_assert_eq!(serialize(&t, true), code.as_str());
        let spaced = text.replace(',', " , ") + " ;";
        prop_assert!(is_isomorphic(&parse(&spaced).unwrap(), &t));
    }

    #[test]
    fn induced_subtrees_are_topological(t in tree(), mask in any::<u64>()) {
        let k = t.leaf_count() as usize;
        let sel = selection(k, mask);
        let s = induce(&t, &sel).unwrap();
        prop_assert_eq!(s.leaf_count() as usize, sel.len());
        for id in s.node_ids() {
            prop_assert!(s.children(id).len() != 1);
        }
        // reparsing rejects unary vertices, so this also checks suppression
        prop_assert!(parse(&serialize(&s, false)).is_ok());
    }

    #[test]
    fn induction_composes(t in tree(), outer in any::<u64>(), inner in any::<u64>()) {
        let k = t.leaf_count() as usize;
        let s1 = selection(k, outer);
        let sub = induce(&t, &s1).unwrap();
        let s2 = selection(s1.len(), inner);
        let nested = induce(&sub, &s2).unwrap();
        let direct_sel = LeafSelection::new(s2.indices().iter().map(|&j| s1.indices()[j])).unwrap();
        let direct = induce(&t, &direct_sel).unwrap();
        prop_assert!(is_isomorphic(&nested, &direct));
    }

    #[test]
    fn induction_respects_isomorphism(t in tree(), seed in any::<u64>()) {
        // the full selection returns the tree; a shuffled copy has the same classes
        let k = t.leaf_count() as usize;
        prop_assert!(is_isomorphic(&induce(&t, &LeafSelection::all(k).unwrap()).unwrap(), &t));
        let u = shuffled(&t, seed);
        let a = distinct_codes(&t, DEFAULT_CAP).unwrap();
        let b = distinct_codes(&u, DEFAULT_CAP).unwrap();
        prop_assert_eq!(a.codes(), b.codes());
    }

    #[test]
    fn every_induced_class_is_found(t in tree(), mask in any::<u64>()) {
        let k = t.leaf_count() as usize;
        let s = induce(&t, &selection(k, mask)).unwrap();
        prop_assert!(distinct_codes(&t, DEFAULT_CAP).unwrap().contains_tree(&s));
    }

    #[test]
    fn dp_equals_brute_force(t in tree()) {
        let brute = enumerate_bruteforce(&t, DEFAULT_SUBSET_BUDGET).unwrap();
        let dp = distinct_codes(&t, DEFAULT_CAP).unwrap();
        prop_assert!(brute.codes.same_codes(&dp));
        prop_assert_eq!(brute.codes.codes(), dp.codes());
        let labeled = count_labeled(&t);
        prop_assert_eq!(BigUint::from(brute.subsets_visited), labeled.clone());
        prop_assert!(BigUint::from(dp.len()) <= labeled);
        prop_assert_eq!(count_distinct(&t, DEFAULT_CAP).unwrap(), BigUint::from(dp.len()));
    }

    #[test]
    fn class_counts_per_leaf_size(t in tree()) {
        // exactly one class with one leaf, and one with all leaves
        let dp = distinct_codes(&t, DEFAULT_CAP).unwrap();
        let h = dp.leaf_histogram();
        prop_assert_eq!(h.get(&1), Some(&1));
        prop_assert_eq!(h.get(&(t.leaf_count() as u64)), Some(&1));
        if t.leaf_count() >= 2 {
            prop_assert_eq!(h.get(&2), Some(&1));
        }
    }

    #[test]
    fn random_text_never_panics(s in "[()L,; ]{0,24}") {
        if let Ok(t) = parse(&s) {
            let code = CanonicalCode::of(&t);
            prop_assert!(is_isomorphic(&code.to_tree(), &t));
        }
    }
}

#[test]
fn sequence_bounds_and_growth() {
    let seq = n_sequence(30);
    assert_eq!(first_bound_violation(&seq), None);
    for n in 4..seq.len() {
        // A_{n-1} / A_n shrinks
        assert!(&seq[n - 1] * &seq[n - 1] < &seq[n - 2] * &seq[n]);
    }
}
