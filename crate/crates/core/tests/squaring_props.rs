//! Squaring and multilevel construction: distance lemmas, cardinality,
//! complexification.

use mbm::squaring::{
    base_pam, build_constellation, complexify, constellation_size_formula, min_sq_dist,
    multilevel_tree, sq_dist, square, squaring_distance, PartitionNode, Split,
};
use proptest::prelude::*;

fn complex_sq_dist(a: &[num_complex::Complex<i64>], b: &[num_complex::Complex<i64>]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

#[test]
fn squaring_lemma_on_pam_partitions() {
    // d(U) = min(d(T), 2 d(S)) where d(T) is the subset distance
    for m in [2usize, 4, 8] {
        let s = base_pam(m).unwrap();
        let Split::Pair(t0, t1) = s.partition2().unwrap() else {
            panic!("PAM splits");
        };
        let u = square(&t0, &t1).unwrap();
        let d_s = s.min_dist().unwrap();
        let d_t = [t0.min_dist(), t1.min_dist()].into_iter().flatten().min().unwrap_or(u64::MAX);
        let want = d_t.min(2 * d_s);
        assert_eq!(u.min_dist().unwrap(), want, "M={m}");
        assert_eq!(squaring_distance(&t0, &t1, &s), want);
    }
}

#[test]
fn partition_distance_lemma() {
    // branches whose labels first differ at stage j are at least d(S_j) apart,
    // S_j being their common ancestor at stage j - 1
    for (m, levels) in [(4usize, 2usize), (4, 3), (8, 2)] {
        let tree = multilevel_tree(m, levels).unwrap();
        let leaves = tree.stages.last().unwrap();
        let points: Vec<_> = leaves.iter().map(|b| b.node.points()).collect();
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                let (li, lj) = (&leaves[i].label, &leaves[j].label);
                let first = li.iter().zip(lj).position(|(a, b)| a != b).unwrap();
                // ancestor of leaf i at stage `first`
                let mut idx = i;
                for stage in (first + 1..=levels).rev() {
                    idx = tree.stages[stage][idx].parent.unwrap();
                }
                let ancestor = &tree.stages[first][idx].node;
                // split-then-square gives 2 d(A); every later stage
                // concatenates two such vectors and doubles it again
                let bound = (2 * ancestor.min_dist().unwrap()) << (levels - first - 1);
                let gap = points[i]
                    .iter()
                    .flat_map(|a| points[j].iter().map(move |b| sq_dist(a, b)))
                    .min()
                    .unwrap();
                assert!(
                    gap >= bound,
                    "M={m} L={levels} leaves {i},{j} diverge at {first}: {gap} < {bound}"
                );
            }
        }
    }
}

#[test]
fn cardinality_matches_formula() {
    for m in [2usize, 4, 8] {
        for levels in 1..=3 {
            let c = build_constellation(m, levels).unwrap();
            assert_eq!(c.len() as u128, constellation_size_formula(m, levels).unwrap(), "M={m} L={levels}");
            assert_eq!(c.dim(), 1 << (levels - 1));
            let real = c.real_vectors();
            assert_eq!(min_sq_dist(real), Some(c.min_dist()));
        }
    }
}

#[test]
fn complexification_preserves_distance() {
    for (m, levels) in [(4usize, 2usize), (4, 3), (8, 2), (2, 3)] {
        let c = build_constellation(m, levels).unwrap();
        let real = c.real_vectors();
        let cx = c.vectors();
        for i in 0..real.len() {
            assert_eq!(complexify(&real[i]), cx[i]);
            for j in i + 1..real.len() {
                assert_eq!(sq_dist(&real[i], &real[j]) as i64, complex_sq_dist(&cx[i], &cx[j]));
            }
        }
    }
}

#[test]
fn union_of_branches_is_disjoint_and_exhaustive() {
    let tree = multilevel_tree(4, 3).unwrap();
    let mut all: Vec<Vec<i64>> = tree
        .stages
        .last()
        .unwrap()
        .iter()
        .flat_map(|b| b.node.points())
        .collect();
    let n = all.len();
    all.sort();
    all.dedup();
    assert_eq!(all.len(), n);
    assert_eq!(n as u128, constellation_size_formula(4, 3).unwrap());
}

proptest! {
    #[test]
    fn squaring_lemma_random_sets(raw in proptest::collection::btree_set(-20i64..20, 2..9)) {
        let values: Vec<i64> = raw.into_iter().collect();
        let s = PartitionNode::scalar(&values).unwrap();
        let Split::Pair(t0, t1) = s.partition2().unwrap() else {
            unreachable!("two or more points split");
        };
        let u = square(&t0, &t1).unwrap();
        prop_assert_eq!(u.len(), t0.len() * t0.len() + t1.len() * t1.len());
        let d_s = s.min_dist().unwrap();
        let d_t = [t0.min_dist(), t1.min_dist()].into_iter().flatten().min().unwrap_or(u64::MAX);
        // the lemma guarantees at least min(d(T), 2 d(S))
        prop_assert!(u.min_dist().unwrap() >= d_t.min(2 * d_s));
        prop_assert_eq!(u.min_dist(), min_sq_dist(&u.points()));
    }
}
