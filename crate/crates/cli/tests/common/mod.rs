//! Seeded instance families shared by the integration tests.
#![allow(dead_code)]

use mcpart::generate::{random_edges, RandomSpec};
use mcpart::io::{derive_weights, WeightSpec};
use mcpart::{Hypergraph, NormalizationContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn r1() -> Hypergraph {
    Hypergraph::new(
        &[vec![0, 1], vec![1, 2, 3], vec![0, 2]],
        &[vec![9.0, 3.0], vec![3.0, 9.0], vec![5.0, 5.0], vec![3.0, 3.0]],
        &[1, 2, 1],
    )
    .unwrap()
}

pub const R1_TEXT: &str = "3 4 11 2\n1 1 2\n2 2 3 4\n1 1 3\n9 3\n3 9\n5 5\n3 3\n";

/// Planted-group hypergraph with `n` in `lo..=hi`, a few hub vertices that
/// join many edges, and weights derived from `weights`.
pub fn hub_instance(i: u64, lo: usize, hi: usize, weights: &str) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
    let n = rng.gen_range(lo..=hi);
    let m = rng.gen_range(n..=3 * n);
    let groups = rng.gen_range(2..=8);
    let mut spec = RandomSpec::planted(n, m, groups, 0.8);
    spec.max_edge_size = rng.gen_range(2..=8);
    let (mut edges, ew) = random_edges(&spec, &mut rng);
    for _ in 0..rng.gen_range(0..=3) {
        let hub = rng.gen_range(0..n);
        for e in edges.iter_mut() {
            if rng.gen_bool(0.15) && !e.contains(&hub) {
                e.push(hub);
            }
        }
    }
    let hg = Hypergraph::new(&edges, &vec![vec![1.0]; n], &ew).unwrap();
    let spec: WeightSpec = weights.parse().unwrap();
    derive_weights(&hg, &spec).unwrap()
}

/// Largest normalized vertex weight over all dimensions.
pub fn max_normalized_weight(hg: &Hypergraph, k: usize) -> f64 {
    let ctx = NormalizationContext::new(hg, k).unwrap();
    ctx.max_vertex_weight(hg).into_iter().fold(0.0, f64::max)
}

/// Small hypergraph with `d` integer weight dimensions drawn from `lo..=hi`.
pub fn weighted_instance<R: Rng>(rng: &mut R, n: usize, m: usize, d: usize, lo: i64, hi: i64) -> Hypergraph {
    let groups = rng.gen_range(1..=3);
    let mut spec = RandomSpec::planted(n, m, groups, 0.7);
    spec.max_edge_size = rng.gen_range(2..=4).min(n);
    spec.max_edge_weight = rng.gen_range(1..=3);
    mcpart::generate::random_weighted(&spec, d, lo, hi, rng)
}

/// Assignment that puts roughly half of the vertices into block 0 and
/// spreads the rest uniformly.
pub fn skewed_assignment<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..k) })
        .collect()
}
