//! Seeded random negative definite plumbing trees, used by the identity
//! suites and corpus sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::ResolutionGraph;

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_vertices: usize,
    /// Self-intersections are drawn from `-max_weight..=-1`.
    pub max_weight: i64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { seed: 0x5eed, count: 200, max_vertices: 12, max_weight: 5 }
    }
}

/// Uniform random recursive tree on `n` vertices with weights biased
/// toward `-2`; `None` when the form is not negative definite.
pub fn random_tree(rng: &mut impl Rng, n: usize, max_weight: i64) -> Option<ResolutionGraph> {
    let weights: Vec<i64> = (0..n)
        .map(|_| if rng.gen_bool(0.45) { -2 } else { -rng.gen_range(1..=max_weight) })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    let g = ResolutionGraph::from_indices(&weights, &edges).ok()?;
    g.intersection_matrix().is_negative_definite().then_some(g)
}

/// `config.count` valid graphs with vertex counts cycling through
/// `1..=max_vertices`, so every size is represented.
pub fn generate(config: &CorpusConfig) -> Vec<ResolutionGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.count);
    let mut size = 0;
    while out.len() < config.count {
        size = size % config.max_vertices + 1;
        // a handful of redraws per slot; every size has negative definite
        // members (e.g. all weights -5), so this terminates
        for _ in 0..1000 {
            if let Some(g) = random_tree(&mut rng, size, config.max_weight) {
                out.push(g);
                break;
            }
        }
    }
    out
}
