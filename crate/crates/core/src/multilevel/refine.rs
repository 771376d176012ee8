//! Label propagation and FM refinement.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypergraph::{BlockId, EdgeWeight, VertexId};
use crate::partition::PartitionState;

use super::Rebalancer;

/// Neighbors reached through larger edges are not re-rated after an FM move.
const FM_NEIGHBOR_EDGE_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMode {
    /// Only moves that keep the target within `1 + eps`.
    Constrained,
    /// Positive-gain moves may overload blocks; each round ends with a
    /// rebalance and the best balanced state is kept.
    Unconstrained,
}

impl fmt::Display for LpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpMode::Constrained => "constrained",
            LpMode::Unconstrained => "unconstrained",
        })
    }
}

impl FromStr for LpMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constrained" => Ok(LpMode::Constrained),
            "unconstrained" => Ok(LpMode::Unconstrained),
            _ => Err(format!("unknown LP mode `{s}` (expected constrained or unconstrained)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementConfig {
    pub lp_rounds: usize,
    pub lp_mode: LpMode,
    pub fm_enabled: bool,
    pub fm_max_negative_streak: usize,
    pub fm_max_passes: usize,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            lp_rounds: 5,
            lp_mode: LpMode::Unconstrained,
            fm_enabled: true,
            fm_max_negative_streak: 100,
            fm_max_passes: 10,
        }
    }
}

/// Moves each vertex of `order` to the block with the largest positive
/// connectivity gain among those that stay within `limits`. Returns the
/// number of moves.
fn lp_pass(state: &mut PartitionState<'_>, order: &[VertexId], limits: &[f64], gains: &mut Vec<EdgeWeight>) -> usize {
    let mut moves = 0;
    for &v in order {
        state.connectivity_gains(v, gains);
        let from = state.block_of(v);
        let mut best: Option<(BlockId, EdgeWeight)> = None;
        for (b, &g) in gains.iter().enumerate() {
            if b == from || g <= 0 || best.is_some_and(|(_, bg)| g <= bg) {
                continue;
            }
            if state.fits(v, b, limits) {
                best = Some((b, g));
            }
        }
        if let Some((b, _)) = best {
            state.move_vertex(v, b);
            moves += 1;
        }
    }
    moves
}

/// Label propagation that never overloads a block beyond `1 + eps`.
/// Connectivity does not increase. Returns the number of moves.
pub fn lp_constrained<R: Rng>(state: &mut PartitionState<'_>, epsilon: f64, rounds: usize, rng: &mut R) -> usize {
    let limits = vec![1.0 + epsilon; state.dims()];
    let mut order: Vec<VertexId> = (0..state.hypergraph().num_vertices()).collect();
    let mut gains = Vec::new();
    let mut total = 0;
    for _ in 0..rounds {
        order.shuffle(rng);
        let moved = lp_pass(state, &order, &limits, &mut gains);
        total += moved;
        if moved == 0 {
            break;
        }
    }
    total
}

/// Alternates label-propagation rounds that may overload blocks with
/// rebalancing. A block may grow up to `u + max vertex weight` per
/// dimension during a round. The best balanced state seen (including the
/// input) is restored at the end; if none was balanced the last state stays.
pub fn lp_unconstrained<R: Rng>(
    state: &mut PartitionState<'_>,
    epsilon: f64,
    rounds: usize,
    rebalancer: &mut Rebalancer,
    rng: &mut R,
) -> usize {
    let bound = rebalancer.bound(state, epsilon);
    let limits: Vec<f64> = bound
        .upper()
        .iter()
        .zip(bound.max_vertex_weight())
        .map(|(u, m)| u + m)
        .collect();
    let mut best: Option<(EdgeWeight, Vec<BlockId>)> =
        state.is_balanced(epsilon).then(|| (state.connectivity(), state.assignment().to_vec()));
    let mut order: Vec<VertexId> = (0..state.hypergraph().num_vertices()).collect();
    let mut gains = Vec::new();
    let mut total = 0;
    for _ in 0..rounds {
        order.shuffle(rng);
        let moved = lp_pass(state, &order, &limits, &mut gains);
        total += moved;
        if !state.is_balanced(epsilon) {
            rebalancer.run(state, epsilon);
        }
        if state.is_balanced(epsilon) && best.as_ref().map_or(true, |(c, _)| state.connectivity() < *c) {
            best = Some((state.connectivity(), state.assignment().to_vec()));
        }
        if moved == 0 {
            break;
        }
    }
    if let Some((_, assignment)) = best {
        state.set_assignment(&assignment);
    }
    total
}

#[derive(Debug, PartialEq, Eq)]
struct FmEntry {
    gain: EdgeWeight,
    vertex: VertexId,
    target: BlockId,
    version: u32,
}

impl Ord for FmEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .cmp(&other.gain)
            .then_with(|| Reverse(self.vertex).cmp(&Reverse(other.vertex)))
            .then_with(|| Reverse(self.target).cmp(&Reverse(other.target)))
    }
}

impl PartialOrd for FmEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn best_fm_move(
    state: &PartitionState<'_>,
    v: VertexId,
    limits: &[f64],
    adjacent: &mut Vec<BlockId>,
) -> Option<(EdgeWeight, BlockId)> {
    state.adjacent_blocks(v, adjacent);
    let mut best: Option<(EdgeWeight, BlockId)> = None;
    for &b in adjacent.iter() {
        if !state.fits(v, b, limits) {
            continue;
        }
        let g = state.connectivity_gain(v, b);
        if best.map_or(true, |(bg, _)| g > bg) {
            best = Some((g, b));
        }
    }
    best
}

struct FmPass<'s, 'a> {
    state: &'s mut PartitionState<'a>,
    limits: &'s [f64],
    moved: Vec<bool>,
    versions: Vec<u32>,
    /// Vertices whose adjacent blocks were all full, keyed by those blocks.
    blocked: Vec<Vec<VertexId>>,
    adjacent: Vec<BlockId>,
    heap: BinaryHeap<FmEntry>,
}

impl FmPass<'_, '_> {
    fn rate(&mut self, v: VertexId) {
        self.versions[v] += 1;
        match best_fm_move(self.state, v, self.limits, &mut self.adjacent) {
            Some((gain, target)) => self.heap.push(FmEntry {
                gain,
                vertex: v,
                target,
                version: self.versions[v],
            }),
            None => {
                for &b in &self.adjacent {
                    self.blocked[b].push(v);
                }
            }
        }
    }

    fn retry_blocked(&mut self, block: BlockId) {
        let mut waiting = std::mem::take(&mut self.blocked[block]);
        waiting.sort_unstable();
        waiting.dedup();
        for v in waiting {
            if !self.moved[v] {
                self.rate(v);
            }
        }
    }
}

/// One k-way FM pass. Returns the connectivity improvement (never negative).
fn fm_pass(state: &mut PartitionState<'_>, limits: &[f64], max_streak: usize) -> EdgeWeight {
    let hg = state.hypergraph();
    let n = hg.num_vertices();
    let k = state.k();
    let start = state.connectivity();
    let mut pass = FmPass {
        state,
        limits,
        moved: vec![false; n],
        versions: vec![0; n],
        blocked: vec![Vec::new(); k],
        adjacent: Vec::new(),
        heap: BinaryHeap::new(),
    };
    for v in 0..n {
        if hg.incident_edges(v).iter().any(|&e| pass.state.lambda(e) > 1) {
            pass.rate(v);
        }
    }

    let mut seen = vec![usize::MAX; n];
    let mut best = start;
    let mut best_len = 0;
    let mut log: Vec<(VertexId, BlockId)> = Vec::new();
    let mut streak = 0;
    while let Some(entry) = pass.heap.pop() {
        let v = entry.vertex;
        if pass.moved[v] || entry.version != pass.versions[v] {
            continue;
        }
        match best_fm_move(pass.state, v, limits, &mut pass.adjacent) {
            Some((gain, target)) if (gain, target) == (entry.gain, entry.target) => {}
            _ => {
                pass.rate(v);
                continue;
            }
        }
        let from = pass.state.block_of(v);
        log.push((v, from));
        pass.state.move_vertex(v, entry.target);
        pass.moved[v] = true;
        if pass.state.connectivity() < best {
            best = pass.state.connectivity();
            best_len = log.len();
            streak = 0;
        } else {
            streak += 1;
            if streak >= max_streak {
                break;
            }
        }
        for &e in hg.incident_edges(v) {
            if hg.edge_size(e) > FM_NEIGHBOR_EDGE_LIMIT {
                continue;
            }
            for &p in hg.pins(e) {
                if pass.moved[p] || seen[p] == log.len() {
                    continue;
                }
                seen[p] = log.len();
                pass.rate(p);
            }
        }
        pass.retry_blocked(from);
    }
    let state = pass.state;
    for &(v, from) in log[best_len..].iter().rev() {
        state.move_vertex(v, from);
    }
    debug_assert_eq!(state.connectivity(), best);
    start - best
}

/// k-way FM with moves restricted to targets that stay within `1 + eps`.
/// Each pass moves every vertex at most once, stops after `max_streak`
/// moves without a new best, and rolls back to the best prefix. Passes
/// repeat while they improve. Infeasible inputs are left untouched.
/// Returns the total improvement.
pub fn fm_constrained(
    state: &mut PartitionState<'_>,
    epsilon: f64,
    max_streak: usize,
    max_passes: usize,
) -> EdgeWeight {
    if !state.is_balanced(epsilon) {
        return 0;
    }
    let limits = vec![1.0 + epsilon; state.dims()];
    let mut total = 0;
    for _ in 0..max_passes {
        let improvement = fm_pass(state, &limits, max_streak.max(1));
        total += improvement;
        if improvement == 0 {
            break;
        }
    }
    total
}
