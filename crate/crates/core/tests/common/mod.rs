#![allow(dead_code)]

use lirgomax::{DirectedGraph, LoadOptions};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi style digraph: each ordered pair is an edge with probability
/// `mean_degree / n`.
pub fn random_graph(rng: &mut impl Rng, n: usize, mean_degree: f64) -> DirectedGraph {
    let p = (mean_degree / n as f64).min(1.0);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen::<f64>() < p {
                edges.push((s as u32, t as u32));
            }
        }
    }
    DirectedGraph::from_edges(n, edges, LoadOptions::default()).unwrap()
}

/// Random graph with `n` drawn from `sizes` and mean degree in [2, 10].
pub fn random_instance(
    rng: &mut impl Rng,
    sizes: std::ops::RangeInclusive<usize>,
) -> DirectedGraph {
    let n = rng.gen_range(sizes);
    let degree = rng.gen_range(2.0..=10.0);
    random_graph(rng, n, degree)
}

/// Two distinct nodes.
pub fn distinct_pair(rng: &mut impl Rng, n: usize) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// `k` distinct nodes out of `n`.
pub fn random_subset(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

/// Skewed synthetic graph: sources and targets drawn from power laws in the
/// node index, so in- and out-degrees are heavy tailed.
pub fn power_law_graph(seed: u64, n: usize, n_edges: usize) -> DirectedGraph {
    let mut rng = rng(seed);
    let nf = n as f64;
    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let s = (nf * rng.gen::<f64>().powf(1.6)) as u32;
        let t = (nf * rng.gen::<f64>().powf(2.4)) as u32;
        edges.push((s.min(n as u32 - 1), t.min(n as u32 - 1)));
    }
    DirectedGraph::from_edges(n, edges, LoadOptions::default()).unwrap()
}
