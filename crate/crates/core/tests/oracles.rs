//! Cross-checks of the exact algorithms against brute-force or
//! independently derived values.

mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resgraph_core::conditions::{all_monomial_witnesses, find_monomial_cycle, DEFAULT_ENUMERATION_LIMIT};
use resgraph_core::corpus::{generate, CorpusConfig};
use resgraph_core::cycle::{Lattice, QCycle};
use resgraph_core::group::discriminant_group;
use resgraph_core::splice::{build_splice, in_semigroup};
use resgraph_core::graph::ResolutionGraph;

fn corpus(count: usize, max_vertices: usize) -> Vec<Lattice> {
    generate(&CorpusConfig { count, max_vertices, ..CorpusConfig::default() })
        .into_iter()
        .map(|g| Lattice::new(g).unwrap())
        .collect()
}

#[test]
fn dual_cycles_solve_the_defining_equations() {
    for l in corpus(120, 12) {
        for i in 0..l.len() {
            let e = l.dual_cycle(i);
            let t = products(l.graph(), &e.0);
            for (j, tj) in t.iter().enumerate() {
                assert_eq!(*tj, if i == j { q(-1) } else { q(0) });
            }
            assert!(e.0.iter().all(|c| c.is_positive()));
        }
    }
}

#[test]
fn determinant_matches_leaf_elimination() {
    for l in corpus(150, 12) {
        let g = l.graph();
        let all: Vec<usize> = (0..g.len()).collect();
        let det = tree_det(g, &all);
        assert!(det.is_integer());
        assert_eq!(det.to_integer(), l.det_abs());
        for v in 0..g.len() {
            for b in g.branches_at(v) {
                assert_eq!(tree_det(g, &b.vertices).to_integer(), g.subset_det(&b.vertices));
            }
        }
    }
}

#[test]
fn leaf_edge_weight_is_the_chain_continuant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        // node 0 (-2) with two single legs and one chain of random length
        let len = rng.gen_range(1..=6);
        let chain: Vec<i64> = (0..len).map(|_| -rng.gen_range(2..=6)).collect();
        let mut weights = vec![-3, -2, -2];
        weights.extend(&chain);
        let mut edges = vec![(0, 1), (0, 2), (0, 3)];
        for k in 3..2 + len {
            edges.push((k, k + 1));
        }
        let g = ResolutionGraph::from_indices(&weights, &edges).unwrap();
        if !g.intersection_matrix().is_negative_definite() {
            continue;
        }
        let d = build_splice(&g).unwrap();
        let end = format!("v{}", 2 + len);
        let w = d.weight("v0", &end).unwrap();
        // the continuant is symmetric, so direction does not matter
        let b: Vec<i64> = chain.iter().map(|x| -x).collect();
        assert_eq!(BigInt::from(w), continuant(&b));
    }
}

#[test]
fn min_antinef_lift_matches_box_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for l in corpus(80, 6) {
        let g = l.graph();
        let n = l.len();
        for _ in 0..4 {
            let d = QCycle(
                (0..n)
                    .map(|_| num_rational::BigRational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=4).into()))
                    .collect(),
            );
            let lift = l.min_antinef_lift(&d);
            let diff = &lift - &d;
            assert!(diff.is_integral() && diff.is_effective());
            assert!(l.is_antinef(&lift));
            if diff.0.iter().any(|c| c > &q(3)) {
                continue;
            }
            let mut best: Option<Vec<i64>> = None;
            for_each_in_box(n, 3, |x| {
                let f: Vec<Q> = d.0.iter().zip(x).map(|(a, b)| a + q(*b)).collect();
                if products(g, &f).iter().all(|t| !t.is_positive()) {
                    best = Some(match best.take() {
                        None => x.to_vec(),
                        Some(b) => b.iter().zip(x).map(|(a, c)| *a.min(c)).collect(),
                    });
                }
            });
            let best = best.expect("the lift itself is in the box");
            let expected: Vec<Q> = best.iter().map(|&b| q(b)).collect();
            assert_eq!(diff.0, expected);
            checked += 1;
        }
    }
    assert!(checked > 100, "only {checked} cases fit the box");
}

#[test]
fn min_antinef_in_class_is_below_every_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for l in corpus(60, 5) {
        let n = l.len();
        let i = rng.gen_range(0..n);
        let d = l.dual_cycle(i).fractional_part();
        let m = l.min_antinef_in_class(&d);
        assert!(l.is_antinef(&m) && (&m - &d).is_integral());
        for_each_in_box(n, 3, |x| {
            let f: Vec<Q> = d.0.iter().zip(x).map(|(a, b)| a + q(*b)).collect();
            if products(l.graph(), &f).iter().all(|t| !t.is_positive()) {
                assert!(QCycle(f).dominates(&m));
            }
        });
    }
}

#[test]
fn fundamental_cycles_match_box_search() {
    for l in corpus(80, 6) {
        let g = l.graph();
        let all: Vec<usize> = (0..g.len()).collect();
        let z = l.fundamental_cycle(&all).unwrap();
        assert_eq!(brute_fundamental_cycle(g, &all, 6).unwrap(), z.0);
        for v in 0..g.len() {
            for b in g.branches_at(v) {
                let zb = l.fundamental_cycle(&b.vertices).unwrap();
                assert_eq!(brute_fundamental_cycle(g, &b.vertices, 6).unwrap(), zb.0);
            }
        }
    }
}

#[test]
fn monomial_cycles_match_brute_force() {
    let mut compared = 0;
    let mut negatives = 0;
    for l in corpus(200, 8) {
        let g = l.graph();
        for &node in l.nodes() {
            for b in g.branches_at(node) {
                let brute = brute_monomial_exponents(g, node, &b, 12);
                let exact = all_monomial_witnesses(&l, node, &b, DEFAULT_ENUMERATION_LIMIT).unwrap();
                let in_bound: std::collections::BTreeSet<Vec<u64>> = exact
                    .iter()
                    .filter(|w| w.excess(&l).0.iter().all(|c| c <= &q(12)))
                    .map(|w| w.exponents.clone())
                    .collect();
                assert_eq!(brute, in_bound, "graph {} node {node}", g.to_json());
                let canonical = find_monomial_cycle(&l, node, &b).unwrap();
                assert_eq!(canonical.is_some(), !exact.is_empty());
                if exact.is_empty() {
                    negatives += 1;
                }
                compared += 1;
            }
        }
    }
    assert!(compared > 100 && negatives > 0, "{compared} branches, {negatives} without witness");
}

#[test]
fn group_order_and_generators() {
    for l in corpus(150, 12) {
        let grp = discriminant_group(&l).unwrap();
        assert_eq!(grp.order(), l.det_abs());
        for w in grp.invariant_factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        for (k, gen) in grp.generators.iter().enumerate() {
            let c = resgraph_core::group::monomial_class(&l, &grp, gen).unwrap();
            let mut unit = vec![BigInt::zero(); grp.invariant_factors.len()];
            unit[k] = BigInt::one();
            assert_eq!(c.0, unit);
        }
    }
}

#[test]
fn semigroup_membership_matches_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let k = rng.gen_range(1..=4);
        let gens: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=30)).collect();
        let limit = 400;
        let mut table = vec![false; limit + 1];
        table[0] = true;
        for d in 1..=limit {
            table[d] = gens.iter().any(|&x| x as usize <= d && table[d - x as usize]);
        }
        for (d, &member) in table.iter().enumerate() {
            assert_eq!(in_semigroup(d as u64, &gens), member, "{d} in {gens:?}");
        }
    }
}
