//! Removal of vertices without edges and their balance-aware reinsertion.

use crate::error::Result;
use crate::hypergraph::{BlockId, Hypergraph, VertexId};
use crate::partition::NormalizationContext;

/// The input without single-pin edges and without vertices that have no
/// remaining edge.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub hypergraph: Hypergraph,
    /// Original id of every vertex of `hypergraph`.
    pub kept: Vec<VertexId>,
    /// Original ids of the removed vertices, ascending.
    pub removed: Vec<VertexId>,
}

pub fn remove_degree_zero(hg: &Hypergraph) -> Result<Reduction> {
    let n = hg.num_vertices();
    let d = hg.dims();
    let mut active = vec![false; n];
    let mut edges = Vec::new();
    let mut edge_weights = Vec::new();
    for e in 0..hg.num_edges() {
        if hg.edge_size(e) >= 2 {
            for &p in hg.pins(e) {
                active[p] = true;
            }
            edges.push(e);
        }
    }
    let mut local = vec![usize::MAX; n];
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let mut weights = Vec::new();
    for v in 0..n {
        if active[v] {
            local[v] = kept.len();
            kept.push(v);
            weights.extend_from_slice(hg.weight(v));
        } else {
            removed.push(v);
        }
    }
    let pins: Vec<Vec<VertexId>> = edges
        .iter()
        .map(|&e| {
            edge_weights.push(hg.edge_weight(e));
            hg.pins(e).iter().map(|&p| local[p]).collect()
        })
        .collect();
    let hypergraph = Hypergraph::from_flat(kept.len(), d, weights, &pins, &edge_weights)?;
    Ok(Reduction {
        hypergraph,
        kept,
        removed,
    })
}

/// Block maximizing `c(u)^T (1 - c(V_i))`; ties go to the lower block.
pub fn best_block(weight: &[f64], block_weights: &[Vec<f64>]) -> BlockId {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (b, row) in block_weights.iter().enumerate() {
        let score: f64 = weight.iter().zip(row).map(|(c, w)| c * (1.0 - w)).sum();
        if score > best_score {
            best = b;
            best_score = score;
        }
    }
    best
}

/// Expands a partition of the reduced hypergraph to the original one. Removed
/// vertices are placed heaviest first (by normalized L1 weight, ties by id)
/// into [`best_block`] given the block weights so far.
pub fn reinsert_degree_zero(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    reduction: &Reduction,
    reduced_assignment: &[BlockId],
) -> Vec<BlockId> {
    let d = hg.dims();
    let normalized = |v: VertexId| -> Vec<f64> { (0..d).map(|j| ctx.normalized(hg, v, j)).collect() };
    let mut assignment = vec![0; hg.num_vertices()];
    let mut block_weights = vec![vec![0.0; d]; ctx.k()];
    for (i, &v) in reduction.kept.iter().enumerate() {
        let b = reduced_assignment[i];
        assignment[v] = b;
        for (j, w) in normalized(v).into_iter().enumerate() {
            block_weights[b][j] += w;
        }
    }
    let mut order: Vec<(f64, VertexId)> =
        reduction.removed.iter().map(|&v| (normalized(v).iter().sum(), v)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, v) in order {
        let c = normalized(v);
        let b = best_block(&c, &block_weights);
        assignment[v] = b;
        for (j, w) in c.into_iter().enumerate() {
            block_weights[b][j] += w;
        }
    }
    assignment
}
