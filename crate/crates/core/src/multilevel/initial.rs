//! Recursive-bisection initial partitioning.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypergraph::{BlockId, EdgeWeight, Hypergraph, VertexId};
use crate::partition::{NormalizationContext, PartitionState, WEIGHT_TOLERANCE};

use super::refine::fm_constrained;
use super::Rebalancer;

/// Smallest imbalance handed to a bisection.
const MIN_BISECTION_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    /// Portfolio repetitions per bisection; each tries every algorithm.
    pub runs: usize,
    /// Repetitions for bisection inputs with at most `small_input` vertices.
    pub small_runs: usize,
    pub small_input: usize,
    pub fm_max_negative_streak: usize,
    pub fm_max_passes: usize,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            runs: 4,
            small_runs: 20,
            small_input: 100,
            fm_max_negative_streak: 100,
            fm_max_passes: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Algorithm {
    Random,
    GreedyGrowing,
}

/// Subhypergraph on `keep`, with every edge restricted to its kept pins and
/// dropped if fewer than two remain.
pub fn induced(hg: &Hypergraph, keep: &[VertexId]) -> Hypergraph {
    let mut local = vec![usize::MAX; hg.num_vertices()];
    for (i, &v) in keep.iter().enumerate() {
        local[v] = i;
    }
    let d = hg.dims();
    let mut weights = Vec::with_capacity(keep.len() * d);
    for &v in keep {
        weights.extend_from_slice(hg.weight(v));
    }
    let mut edges = Vec::new();
    let mut edge_weights = Vec::new();
    for e in 0..hg.num_edges() {
        let pins: Vec<VertexId> = hg.pins(e).iter().filter(|&&p| local[p] != usize::MAX).map(|&p| local[p]).collect();
        if pins.len() >= 2 {
            edges.push(pins);
            edge_weights.push(hg.edge_weight(e));
        }
    }
    Hypergraph::from_flat(keep.len(), d, weights, &edges, &edge_weights)
        .expect("restriction of a valid hypergraph is valid")
}

/// Imbalance for one bisection of a subproblem that still has to be split
/// into `k` blocks: the slack left for the final blocks is spread evenly
/// over the remaining `ceil(log2 k)` levels.
pub fn adaptive_epsilon(hg: &Hypergraph, scale: &[f64], k: usize, epsilon: f64) -> f64 {
    let levels = (k as f64).log2().ceil().max(1.0);
    let mut eps = f64::INFINITY;
    for (j, t) in hg.total_weight().into_iter().enumerate() {
        let normalized = t * scale[j];
        if normalized > 0.0 {
            let ratio = (1.0 + epsilon) * k as f64 / normalized;
            eps = eps.min(ratio.powf(1.0 / levels) - 1.0);
        }
    }
    if eps.is_finite() {
        eps.max(MIN_BISECTION_EPSILON)
    } else {
        epsilon
    }
}

/// Shuffles the vertices and gives each one to the side whose heaviest
/// dimension stays lower.
fn random_bisection<R: Rng>(hg: &Hypergraph, ctx: &NormalizationContext, rng: &mut R) -> Vec<BlockId> {
    let d = hg.dims();
    let mut order: Vec<VertexId> = (0..hg.num_vertices()).collect();
    order.shuffle(rng);
    let mut load = vec![0.0; 2 * d];
    let mut side = vec![0; hg.num_vertices()];
    for v in order {
        let peak = |b: usize, load: &[f64]| {
            (0..d)
                .map(|j| load[b * d + j] + hg.weight(v)[j] * ctx.scale()[j] * ctx.block_scale(b))
                .fold(0.0, f64::max)
        };
        let b = if peak(1, &load) < peak(0, &load) { 1 } else { 0 };
        for j in 0..d {
            load[b * d + j] += hg.weight(v)[j] * ctx.scale()[j] * ctx.block_scale(b);
        }
        side[v] = b;
    }
    side
}

/// Grows side 0 from a random seed vertex, always adding the vertex with the
/// highest connectivity gain that still fits, until side 0 reaches its share
/// in some dimension. Restarts from a fresh random vertex when the frontier
/// runs dry (disconnected inputs).
fn greedy_growing<R: Rng>(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    epsilon: f64,
    rng: &mut R,
) -> Vec<BlockId> {
    let n = hg.num_vertices();
    let d = hg.dims();
    let mut state = PartitionState::new(hg, ctx.clone(), vec![1; n]).expect("two blocks");
    let limits = vec![1.0 + epsilon; d];
    let mut rejected = vec![false; n];
    let mut versions = vec![0u32; n];
    let mut heap: BinaryHeap<(EdgeWeight, Reverse<VertexId>, u32)> = BinaryHeap::new();
    let full = |state: &PartitionState<'_>| state.block_weight(0).iter().any(|&w| w >= 1.0 - WEIGHT_TOLERANCE);

    while !full(&state) {
        let next = loop {
            match heap.pop() {
                None => break None,
                Some((gain, Reverse(v), version)) => {
                    if state.block_of(v) == 0 || rejected[v] || version != versions[v] {
                        continue;
                    }
                    let g = state.connectivity_gain(v, 0);
                    if g != gain {
                        versions[v] += 1;
                        heap.push((g, Reverse(v), versions[v]));
                        continue;
                    }
                    break Some(v);
                }
            }
        };
        let v = match next {
            Some(v) => v,
            None => {
                let free: Vec<VertexId> = (0..n).filter(|&v| state.block_of(v) == 1 && !rejected[v]).collect();
                match free.choose(rng) {
                    Some(&v) => v,
                    None => break,
                }
            }
        };
        if !state.fits(v, 0, &limits) {
            rejected[v] = true;
            continue;
        }
        state.move_vertex(v, 0);
        for &e in hg.incident_edges(v) {
            for &p in hg.pins(e) {
                if state.block_of(p) == 1 && !rejected[p] {
                    versions[p] += 1;
                    heap.push((state.connectivity_gain(p, 0), Reverse(p), versions[p]));
                }
            }
        }
    }
    state.into_assignment()
}

/// Best bisection of `hg` into sides with capacities `ctx` found by the
/// portfolio: feasible before infeasible, then lower connectivity, then the
/// earlier run.
fn bisect<R: Rng>(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    epsilon: f64,
    config: &InitialConfig,
    rebalancer: &mut Rebalancer,
    rng: &mut R,
) -> Vec<BlockId> {
    let mut best: Option<(bool, EdgeWeight, Vec<BlockId>)> = None;
    let runs = if hg.num_vertices() <= config.small_input {
        config.runs.max(config.small_runs)
    } else {
        config.runs
    };
    for _ in 0..runs.max(1) {
        for algorithm in [Algorithm::Random, Algorithm::GreedyGrowing] {
            let assignment = match algorithm {
                Algorithm::Random => random_bisection(hg, ctx, rng),
                Algorithm::GreedyGrowing => greedy_growing(hg, ctx, epsilon, rng),
            };
            let mut state = PartitionState::new(hg, ctx.clone(), assignment).expect("two blocks");
            if !state.is_balanced(epsilon) {
                rebalancer.run(&mut state, epsilon);
            }
            fm_constrained(&mut state, epsilon, config.fm_max_negative_streak, config.fm_max_passes);
            let feasible = state.is_balanced(epsilon);
            let conn = state.connectivity();
            let better = match &best {
                None => true,
                Some((bf, bc, _)) => (feasible && !bf) || (feasible == *bf && conn < *bc),
            };
            if better {
                best = Some((feasible, conn, state.into_assignment()));
            }
        }
    }
    best.expect("at least one run").2
}

#[allow(clippy::too_many_arguments)]
fn recurse<R: Rng>(
    hg: &Hypergraph,
    ids: &[VertexId],
    scale: &[f64],
    k: usize,
    offset: BlockId,
    epsilon: f64,
    config: &InitialConfig,
    rebalancer: &mut Rebalancer,
    rng: &mut R,
    out: &mut [BlockId],
) {
    if k == 1 || ids.is_empty() {
        for &v in ids {
            out[v] = offset;
        }
        return;
    }
    let left = k.div_ceil(2);
    let right = k / 2;
    let ctx = NormalizationContext::with_shares(scale, &[left as f64, right as f64]);
    let eps = adaptive_epsilon(hg, scale, k, epsilon);
    let sides = bisect(hg, &ctx, eps, config, rebalancer, rng);
    for (side, blocks, start) in [(0, left, offset), (1, right, offset + left)] {
        let local: Vec<VertexId> = (0..hg.num_vertices()).filter(|&v| sides[v] == side).collect();
        let sub = induced(hg, &local);
        let sub_ids: Vec<VertexId> = local.iter().map(|&v| ids[v]).collect();
        recurse(&sub, &sub_ids, scale, blocks, start, epsilon, config, rebalancer, rng, out);
    }
}

/// k-way partition of `hg` by recursive bisection. Balance is measured
/// against `ctx` (the average block weight of the final `k`-way partition).
/// The result may be infeasible; later rebalancing is expected to fix it.
pub fn initial_partition<R: Rng>(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    epsilon: f64,
    config: &InitialConfig,
    rebalancer: &mut Rebalancer,
    rng: &mut R,
) -> Vec<BlockId> {
    let n = hg.num_vertices();
    let mut out = vec![0; n];
    let ids: Vec<VertexId> = (0..n).collect();
    recurse(hg, &ids, ctx.scale(), ctx.k(), 0, epsilon, config, rebalancer, rng, &mut out);
    out
}
