//! Seeded random instances for tests and benchmarks.

use rand::seq::index;
use rand::Rng;

use crate::hypergraph::{Hypergraph, VertexId};

/// Shape of a random hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub vertices: usize,
    pub edges: usize,
    pub min_edge_size: usize,
    pub max_edge_size: usize,
    pub max_edge_weight: i64,
    /// Number of groups for planted structure; 1 gives uniform edges.
    pub groups: usize,
    /// Probability that an edge draws its pins from a single group.
    pub locality: f64,
}

impl RandomSpec {
    pub fn uniform(vertices: usize, edges: usize) -> Self {
        Self {
            vertices,
            edges,
            min_edge_size: 2,
            max_edge_size: 4,
            max_edge_weight: 1,
            groups: 1,
            locality: 0.0,
        }
    }

    pub fn planted(vertices: usize, edges: usize, groups: usize, locality: f64) -> Self {
        Self {
            groups,
            locality,
            ..Self::uniform(vertices, edges)
        }
    }
}

fn group_range(v: usize, groups: usize, g: usize) -> std::ops::Range<usize> {
    (g * v / groups)..((g + 1) * v / groups)
}

/// Pin lists and edge weights. Vertex `v` belongs to group
/// `g` with `v` in `[g n / groups, (g + 1) n / groups)`.
pub fn random_edges<R: Rng>(spec: &RandomSpec, rng: &mut R) -> (Vec<Vec<VertexId>>, Vec<i64>) {
    let n = spec.vertices;
    let mut edges = Vec::with_capacity(spec.edges);
    let mut weights = Vec::with_capacity(spec.edges);
    for _ in 0..spec.edges {
        let (lo, hi) = if spec.groups > 1 && rng.gen_bool(spec.locality) {
            let r = group_range(n, spec.groups, rng.gen_range(0..spec.groups));
            (r.start, r.end)
        } else {
            (0, n)
        };
        let span = hi - lo;
        let size = rng.gen_range(spec.min_edge_size..=spec.max_edge_size).min(span).max(1);
        let mut pins: Vec<VertexId> = index::sample(rng, span, size).into_iter().map(|p| lo + p).collect();
        pins.sort_unstable();
        edges.push(pins);
        weights.push(rng.gen_range(1..=spec.max_edge_weight));
    }
    (edges, weights)
}

/// Random hypergraph with unit weights in one dimension.
pub fn random_hypergraph<R: Rng>(spec: &RandomSpec, rng: &mut R) -> Hypergraph {
    let (edges, weights) = random_edges(spec, rng);
    Hypergraph::new(&edges, &vec![vec![1.0]; spec.vertices], &weights).expect("valid random hypergraph")
}

/// Random hypergraph with integer weights drawn from `lo..=hi` in every
/// dimension.
pub fn random_weighted<R: Rng>(spec: &RandomSpec, dims: usize, lo: i64, hi: i64, rng: &mut R) -> Hypergraph {
    let (edges, ew) = random_edges(spec, rng);
    let weights: Vec<f64> = (0..spec.vertices * dims).map(|_| rng.gen_range(lo..=hi) as f64).collect();
    Hypergraph::from_flat(spec.vertices, dims, weights, &edges, &ew).expect("valid random hypergraph")
}

/// Uniformly random assignment to `k` blocks.
pub fn random_assignment<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}
