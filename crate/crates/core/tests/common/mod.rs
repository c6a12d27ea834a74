//! Independent oracles shared by the integration suites. Nothing here calls
//! into the algorithms under test beyond graph construction and the
//! intersection form.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resgraph_core::corpus::random_tree;
use resgraph_core::graph::{Branch, ResolutionGraph};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn fixture(name: &str) -> ResolutionGraph {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ResolutionGraph::parse(&text).unwrap()
}

/// Graph from a proptest seed: redraws until negative definite.
pub fn seeded_graph(seed: u64, max_vertices: usize) -> ResolutionGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = 1 + (rand::Rng::gen_range(&mut rng, 0..max_vertices));
        if let Some(g) = random_tree(&mut rng, n, 5) {
            return g;
        }
    }
}

/// Intersection products `x·A_j` straight from the weights and edges.
pub fn products(g: &ResolutionGraph, x: &[Q]) -> Vec<Q> {
    (0..g.len())
        .map(|j| {
            let mut s = &x[j] * q(g.selfint(j));
            for &k in g.neighbors(j) {
                s += &x[k];
            }
            s
        })
        .collect()
}

pub fn products_int(g: &ResolutionGraph, x: &[i64]) -> Vec<i64> {
    (0..g.len())
        .map(|j| x[j] * g.selfint(j) + g.neighbors(j).iter().map(|&k| x[k]).sum::<i64>())
        .collect()
}

/// `det(-M)` of a tree by leaf elimination: rooting anywhere,
/// `val(v) = -w_v - Σ 1/val(child)`, and `det(-M) = Π val(v)`.
pub fn tree_det(g: &ResolutionGraph, set: &[usize]) -> Q {
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut total = Q::one();
    for &root in set {
        if seen.contains(&root) {
            continue;
        }
        total *= elim(g, &inside, root, usize::MAX, &mut seen).1;
    }
    total
}

fn elim(g: &ResolutionGraph, inside: &BTreeSet<usize>, v: usize, parent: usize, seen: &mut BTreeSet<usize>) -> (Q, Q) {
    seen.insert(v);
    let mut val = q(-g.selfint(v));
    let mut prod = Q::one();
    for &c in g.neighbors(v) {
        if c == parent || !inside.contains(&c) {
            continue;
        }
        let (cv, cp) = elim(g, inside, c, v, seen);
        val -= Q::one() / &cv;
        prod *= cp;
    }
    (val.clone(), prod * val)
}

/// Continuant of `b_1, ..., b_k`: `K_k = b_k K_{k-1} - K_{k-2}`.
pub fn continuant(b: &[i64]) -> BigInt {
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    for &x in b {
        let next = BigInt::from(x) * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Every vector in `[0, bound]^n` (as integers), visited via callback.
pub fn for_each_in_box(n: usize, bound: i64, mut f: impl FnMut(&[i64])) {
    let mut x = vec![0i64; n];
    loop {
        f(&x);
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] <= bound {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

/// Coefficientwise minimum of the nonzero effective anti-nef cycles on
/// `support` with coefficients at most `bound`, plus whether the minimum
/// itself is in the set.
pub fn brute_fundamental_cycle(g: &ResolutionGraph, support: &[usize], bound: i64) -> Option<Vec<i64>> {
    let k = support.len();
    let mut best: Option<Vec<i64>> = None;
    for_each_in_box(k, bound, |local| {
        if local.iter().all(|&c| c == 0) {
            return;
        }
        let mut x = vec![0i64; g.len()];
        for (i, &v) in support.iter().enumerate() {
            x[v] = local[i];
        }
        let t = products_int(g, &x);
        if support.iter().all(|&v| t[v] <= 0) {
            best = Some(match best.take() {
                None => x,
                Some(b) => b.iter().zip(&x).map(|(a, c)| *a.min(c)).collect(),
            });
        }
    });
    best
}

/// Exponent vectors (in end order) of all monomial cycles for `branch` of
/// `node` whose excess `W = D - E*_node` has coefficients at most `bound`,
/// found by depth-first search over `W` with the integer conditions
/// `W·A_j = 0` (non-ends in the branch), `W·A_j <= 0` (ends in the
/// branch) and `m_attach(W) = 1`.
pub fn brute_monomial_exponents(g: &ResolutionGraph, node: usize, branch: &Branch, bound: i64) -> BTreeSet<Vec<u64>> {
    let ends: Vec<usize> = (0..g.len()).filter(|&v| g.degree(v) <= 1).collect();
    // visiting order: breadth first from the attaching vertex
    let mut order = vec![branch.attach];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &u in g.neighbors(v) {
            if u != node && !order.contains(&u) {
                order.push(u);
            }
        }
        i += 1;
    }
    let pos: Vec<Option<usize>> = (0..g.len()).map(|v| order.iter().position(|&x| x == v)).collect();
    // a vertex's constraint can be checked once it and all its neighbours
    // inside the branch are assigned
    let ready_at: Vec<usize> = order
        .iter()
        .map(|&v| {
            g.neighbors(v).iter().filter_map(|&u| pos[u]).chain([pos[v].unwrap()]).max().unwrap()
        })
        .collect();
    let mut w = vec![0i64; g.len()];
    let mut out = BTreeSet::new();
    dfs(g, node, &order, &ready_at, &ends, 0, bound, &mut w, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &ResolutionGraph,
    node: usize,
    order: &[usize],
    ready_at: &[usize],
    ends: &[usize],
    depth: usize,
    bound: i64,
    w: &mut Vec<i64>,
    out: &mut BTreeSet<Vec<u64>>,
) {
    if depth == order.len() {
        let t = products_int(g, w);
        let exps = ends
            .iter()
            .map(|&e| if order.contains(&e) { (-t[e]) as u64 } else { 0 })
            .collect();
        out.insert(exps);
        return;
    }
    let v = order[depth];
    let range: Vec<i64> = if depth == 0 { vec![1] } else { (0..=bound).collect() };
    for c in range {
        w[v] = c;
        let ok = order.iter().enumerate().filter(|(k, _)| ready_at[*k] == depth).all(|(_, &x)| {
            let s = w[x] * g.selfint(x) + g.neighbors(x).iter().filter(|&&u| u != node).map(|&u| w[u]).sum::<i64>();
            if g.degree(x) <= 1 {
                s <= 0
            } else {
                s == 0
            }
        });
        if ok {
            dfs(g, node, order, ready_at, ends, depth + 1, bound, w, out);
        }
    }
    w[v] = 0;
}

pub fn is_nonneg(x: &Q) -> bool {
    !x.is_negative()
}
