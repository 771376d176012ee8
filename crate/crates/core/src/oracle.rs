//! From-scratch reference computations.
//!
//! Nothing here touches the incremental bookkeeping of
//! [`PartitionState`](crate::partition::PartitionState); these functions are
//! the ground truth that the incremental paths are tested against, and the
//! `evaluate` command reports through them.

use crate::hypergraph::{BlockId, EdgeWeight, Hypergraph, VertexId};
use crate::objective::{ImbalanceBound, GAIN_EPSILON};
use crate::partition::{NormalizationContext, WEIGHT_TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub connectivity: EdgeWeight,
    /// `k` rows of normalized block weights.
    pub block_weights: Vec<Vec<f64>>,
    /// Total L1^u imbalance, when a bound was given.
    pub l1u: Option<f64>,
}

impl Evaluation {
    pub fn max_block_weights(&self) -> Vec<f64> {
        let d = self.block_weights.first().map_or(0, Vec::len);
        (0..d)
            .map(|j| self.block_weights.iter().map(|r| r[j]).fold(0.0, f64::max))
            .collect()
    }

    pub fn is_balanced(&self, epsilon: f64) -> bool {
        self.block_weights
            .iter()
            .flatten()
            .all(|&w| w <= 1.0 + epsilon + WEIGHT_TOLERANCE)
    }
}

/// Connectivity, block weights and optionally L1^u of an assignment,
/// computed from scratch.
pub fn recompute_all(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    assignment: &[BlockId],
    bound: Option<&ImbalanceBound>,
) -> Evaluation {
    let k = ctx.k();
    let d = hg.dims();
    let mut block_weights = vec![vec![0.0; d]; k];
    for (v, &b) in assignment.iter().enumerate() {
        for j in 0..d {
            block_weights[b][j] += hg.weight(v)[j] * ctx.scale()[j] * ctx.block_scale(b);
        }
    }
    let mut connectivity = 0;
    let mut seen = Vec::with_capacity(8);
    for e in 0..hg.num_edges() {
        seen.clear();
        for &v in hg.pins(e) {
            if !seen.contains(&assignment[v]) {
                seen.push(assignment[v]);
            }
        }
        connectivity += (seen.len() as EdgeWeight - 1) * hg.edge_weight(e);
    }
    let l1u = bound.map(|b| {
        block_weights
            .iter()
            .map(|row| {
                row.iter()
                    .zip(b.upper())
                    .map(|(&w, &u)| (w - u).max(0.0))
                    .sum::<f64>()
            })
            .sum()
    });
    Evaluation {
        connectivity,
        block_weights,
        l1u,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovingMove {
    pub vertex: VertexId,
    pub target: BlockId,
    pub balance_gain: f64,
}

/// Every single move that lowers L1^u, found by recomputing the imbalance of
/// each resulting assignment.
pub fn enumerate_improving_moves(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    assignment: &[BlockId],
    bound: &ImbalanceBound,
) -> Vec<ImprovingMove> {
    let before = recompute_all(hg, ctx, assignment, Some(bound)).l1u.unwrap();
    let mut work = assignment.to_vec();
    let mut out = Vec::new();
    for v in 0..hg.num_vertices() {
        let from = assignment[v];
        for target in 0..ctx.k() {
            if target == from {
                continue;
            }
            work[v] = target;
            let after = recompute_all(hg, ctx, &work, Some(bound)).l1u.unwrap();
            if before - after > GAIN_EPSILON {
                out.push(ImprovingMove {
                    vertex: v,
                    target,
                    balance_gain: before - after,
                });
            }
        }
        work[v] = from;
    }
    out
}

/// The first improving move in vertex-then-block order, if any. Same test
/// as [`enumerate_improving_moves`] but stops early.
pub fn first_improving_move(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    assignment: &[BlockId],
    bound: &ImbalanceBound,
) -> Option<ImprovingMove> {
    let before = recompute_all(hg, ctx, assignment, Some(bound)).l1u.unwrap();
    let mut work = assignment.to_vec();
    for v in 0..hg.num_vertices() {
        let from = assignment[v];
        for target in (0..ctx.k()).filter(|&t| t != from) {
            work[v] = target;
            let after = recompute_all(hg, ctx, &work, Some(bound)).l1u.unwrap();
            if before - after > GAIN_EPSILON {
                return Some(ImprovingMove {
                    vertex: v,
                    target,
                    balance_gain: before - after,
                });
            }
        }
        work[v] = from;
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub connectivity: EdgeWeight,
    pub assignment: Vec<BlockId>,
}

/// Minimum connectivity over all `epsilon`-balanced assignments, or `None`
/// if none exists. Vertex 0 is pinned to block 0 (blocks are
/// interchangeable), so `k^(n-1)` assignments are visited.
pub fn brute_force_optimal(hg: &Hypergraph, k: usize, epsilon: f64) -> Option<Optimum> {
    let n = hg.num_vertices();
    let ctx = NormalizationContext::from_totals(&hg.total_weight(), k).ok()?;
    if n == 0 {
        return Some(Optimum {
            connectivity: 0,
            assignment: Vec::new(),
        });
    }
    let mut assignment = vec![0; n];
    let mut best: Option<Optimum> = None;
    loop {
        let eval = recompute_all(hg, &ctx, &assignment, None);
        if eval.is_balanced(epsilon)
            && best.as_ref().map_or(true, |b| eval.connectivity < b.connectivity)
        {
            best = Some(Optimum {
                connectivity: eval.connectivity,
                assignment: assignment.clone(),
            });
        }
        // odometer over vertices 1..n
        let mut i = 1;
        loop {
            if i == n {
                return best;
            }
            assignment[i] += 1;
            if assignment[i] < k {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}
