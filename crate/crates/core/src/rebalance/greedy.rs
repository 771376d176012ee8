//! One round of greedy L1^u rebalancing with prefix rollback.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::hypergraph::{BlockId, EdgeWeight, VertexId};
use crate::objective::{self, GainPair, ImbalanceBound, GAIN_EPSILON};
use crate::partition::PartitionState;

/// Hyperedges larger than this do not trigger neighbor re-rating.
const NEIGHBOR_EDGE_LIMIT: usize = 1000;

/// Restricts which target blocks a move may use.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetFilter {
    /// Any block; overloading the target is allowed if L1^u decreases.
    Any,
    /// Only blocks that stay within these per-dimension limits.
    WithinLimits(Vec<f64>),
}

impl TargetFilter {
    fn admits(&self, state: &PartitionState<'_>, v: VertexId, target: BlockId) -> bool {
        match self {
            TargetFilter::Any => true,
            TargetFilter::WithinLimits(limits) => state.fits(v, target, limits),
        }
    }
}

/// Best admissible imbalance-reducing move of a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatedMove {
    pub target: BlockId,
    pub gains: GainPair,
    pub rating: f64,
}

/// Orders two candidate moves: higher rating, then larger balance gain, then
/// lower vertex id, then lower target block.
fn compare_moves(a: (&RatedMove, VertexId), b: (&RatedMove, VertexId)) -> Ordering {
    a.0.rating
        .total_cmp(&b.0.rating)
        .then(a.0.gains.balance.total_cmp(&b.0.gains.balance))
        .then(b.1.cmp(&a.1))
        .then(b.0.target.cmp(&a.0.target))
}

/// Evaluates every other block and returns the rating-best target among those
/// with positive balance gain.
pub fn best_move(
    state: &PartitionState<'_>,
    v: VertexId,
    bound: &ImbalanceBound,
    filter: &TargetFilter,
    conn_gains: &mut Vec<EdgeWeight>,
) -> Option<RatedMove> {
    let from = state.block_of(v);
    state.connectivity_gains(v, conn_gains);
    let mut best: Option<RatedMove> = None;
    for target in 0..state.k() {
        if target == from {
            continue;
        }
        let balance = objective::balance_gain(state, v, target, bound);
        if balance <= GAIN_EPSILON || !filter.admits(state, v, target) {
            continue;
        }
        let gains = GainPair {
            connectivity: conn_gains[target],
            balance,
        };
        let candidate = RatedMove {
            target,
            gains,
            rating: objective::rating(gains),
        };
        if best.map_or(true, |b| compare_moves((&candidate, v), (&b, v)) == Ordering::Greater) {
            best = Some(candidate);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub vertex: VertexId,
    /// `None` when no target currently reduces the imbalance.
    pub best: Option<RatedMove>,
}

/// Move candidates: every vertex of a block with positive L1^u imbalance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MoveCandidateSet {
    pub members: Vec<Candidate>,
}

impl MoveCandidateSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn get(&self, v: VertexId) -> Option<&Candidate> {
        self.members.iter().find(|c| c.vertex == v)
    }

    /// Members with a target, best first.
    pub fn ranked(&self) -> Vec<(VertexId, RatedMove)> {
        let mut out: Vec<_> = self
            .members
            .iter()
            .filter_map(|c| c.best.map(|b| (c.vertex, b)))
            .collect();
        out.sort_by(|a, b| compare_moves((&b.1, b.0), (&a.1, a.0)));
        out
    }
}

pub fn collect_candidates(
    state: &PartitionState<'_>,
    bound: &ImbalanceBound,
    filter: &TargetFilter,
) -> MoveCandidateSet {
    let overloaded: Vec<bool> = (0..state.k())
        .map(|b| objective::l1u_block(state.block_weight(b), bound.upper()) > 0.0)
        .collect();
    if !overloaded.iter().any(|&o| o) {
        return MoveCandidateSet::default();
    }
    let mut buf = Vec::new();
    let members = (0..state.hypergraph().num_vertices())
        .filter(|&v| overloaded[state.block_of(v)])
        .map(|v| Candidate {
            vertex: v,
            best: best_move(state, v, bound, filter, &mut buf),
        })
        .collect();
    MoveCandidateSet { members }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedMove {
    pub vertex: VertexId,
    pub from: BlockId,
    pub to: BlockId,
    /// Balance gain at application time.
    pub balance_gain: f64,
    pub connectivity_gain: EdgeWeight,
}

/// Ordered applied moves plus the imbalance and connectivity after every
/// prefix (index 0 is the starting state).
#[derive(Debug, Clone, PartialEq)]
pub struct MoveLog {
    moves: Vec<LoggedMove>,
    imbalance: Vec<f64>,
    connectivity: Vec<EdgeWeight>,
    undone: Vec<LoggedMove>,
}

impl MoveLog {
    pub fn new(start_imbalance: f64, start_connectivity: EdgeWeight) -> Self {
        Self {
            moves: Vec::new(),
            imbalance: vec![start_imbalance],
            connectivity: vec![start_connectivity],
            undone: Vec::new(),
        }
    }

    /// Applies `v -> target` and records it with exact gains.
    pub fn apply(
        &mut self,
        state: &mut PartitionState<'_>,
        v: VertexId,
        target: BlockId,
        bound: &ImbalanceBound,
    ) -> &LoggedMove {
        let balance_gain = objective::balance_gain(state, v, target, bound);
        let from = state.block_of(v);
        let delta = state.move_vertex(v, target);
        let imbalance = self.imbalance.last().unwrap() - balance_gain;
        self.record(
            LoggedMove {
                vertex: v,
                from,
                to: target,
                balance_gain,
                connectivity_gain: -delta,
            },
            imbalance,
            state.connectivity(),
        );
        self.moves.last().unwrap()
    }

    pub fn record(&mut self, mv: LoggedMove, imbalance_after: f64, connectivity_after: EdgeWeight) {
        self.moves.push(mv);
        self.imbalance.push(imbalance_after);
        self.connectivity.push(connectivity_after);
    }

    pub fn moves(&self) -> &[LoggedMove] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Moves removed by [`MoveLog::rollback`], in application order.
    pub fn undone(&self) -> &[LoggedMove] {
        &self.undone
    }

    pub fn prefix_imbalance(&self) -> &[f64] {
        &self.imbalance
    }

    pub fn prefix_connectivity(&self) -> &[EdgeWeight] {
        &self.connectivity
    }

    /// Prefix length with minimum imbalance; ties go to the lower
    /// connectivity (larger cumulative gain), then to the longer prefix.
    pub fn best_prefix(&self) -> usize {
        let mut best = 0;
        for i in 1..self.imbalance.len() {
            let (ib, ii) = (self.imbalance[best], self.imbalance[i]);
            let better = if (ii - ib).abs() <= GAIN_EPSILON {
                self.connectivity[i] <= self.connectivity[best]
            } else {
                ii < ib
            };
            if better {
                best = i;
            }
        }
        best
    }

    /// Undoes every move past the best prefix; returns how many were undone.
    pub fn rollback(&mut self, state: &mut PartitionState<'_>) -> usize {
        let keep = self.best_prefix();
        let undone = self.moves.len() - keep;
        for mv in self.moves[keep..].iter().rev() {
            debug_assert_eq!(state.block_of(mv.vertex), mv.to);
            state.move_vertex(mv.vertex, mv.from);
        }
        self.undone.extend(self.moves.drain(keep..));
        self.imbalance.truncate(keep + 1);
        self.connectivity.truncate(keep + 1);
        undone
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundResult {
    pub imbalance_before: f64,
    pub imbalance_after: f64,
    pub moves_applied: usize,
    pub moves_kept: usize,
    /// No move survived the round.
    pub stalled: bool,
    pub log: MoveLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Outside,
    Queued(u32),
    Targetless,
    Unparked,
    Moved,
}

#[derive(Debug)]
struct QueueEntry {
    vertex: VertexId,
    version: u32,
    mv: RatedMove,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_moves((&self.mv, self.vertex), (&other.mv, other.vertex))
    }
}

struct Round<'s, 'a> {
    state: &'s mut PartitionState<'a>,
    bound: &'s ImbalanceBound,
    filter: &'s TargetFilter,
    slots: Vec<Slot>,
    versions: Vec<u32>,
    targetless: Vec<Vec<VertexId>>,
    heap: BinaryHeap<QueueEntry>,
    buf: Vec<EdgeWeight>,
}

impl Round<'_, '_> {
    fn enqueue(&mut self, v: VertexId, mv: RatedMove) {
        self.versions[v] += 1;
        let version = self.versions[v];
        self.slots[v] = Slot::Queued(version);
        self.heap.push(QueueEntry { vertex: v, version, mv });
    }

    fn park(&mut self, v: VertexId) {
        if self.slots[v] != Slot::Targetless {
            self.slots[v] = Slot::Targetless;
            self.targetless[self.state.block_of(v)].push(v);
        }
    }

    /// Re-evaluates a member and queues it, or parks it as targetless.
    fn rate(&mut self, v: VertexId) {
        if matches!(self.slots[v], Slot::Outside | Slot::Moved) {
            return;
        }
        match best_move(self.state, v, self.bound, self.filter, &mut self.buf) {
            Some(mv) => self.enqueue(v, mv),
            None => self.park(v),
        }
    }

    /// Re-examines the targetless members of `block` after its weight changed.
    fn retry_targetless(&mut self, block: BlockId) {
        let mut parked = std::mem::take(&mut self.targetless[block]);
        parked.sort_unstable();
        parked.dedup();
        for v in parked {
            if self.slots[v] == Slot::Targetless && self.state.block_of(v) == block {
                self.slots[v] = Slot::Unparked;
                self.rate(v);
            }
        }
    }
}

/// Runs one greedy round on `state`. The candidate set is fixed at the start
/// of the round; the round ends when the queue is exhausted or the partition
/// is `bound.epsilon()`-balanced, then rolls back to the best prefix.
pub fn greedy_round(
    state: &mut PartitionState<'_>,
    bound: &ImbalanceBound,
    filter: &TargetFilter,
) -> RoundResult {
    let imbalance_before = objective::l1u_total(state, bound);
    let mut log = MoveLog::new(imbalance_before, state.connectivity());
    let candidates = collect_candidates(state, bound, filter);

    let n = state.hypergraph().num_vertices();
    let k = state.k();
    let mut round = Round {
        state,
        bound,
        filter,
        slots: vec![Slot::Outside; n],
        versions: vec![0; n],
        targetless: vec![Vec::new(); k],
        heap: BinaryHeap::with_capacity(candidates.len()),
        buf: Vec::new(),
    };
    for c in &candidates.members {
        round.slots[c.vertex] = Slot::Unparked;
        match c.best {
            Some(mv) => round.enqueue(c.vertex, mv),
            None => round.park(c.vertex),
        }
    }

    let epsilon = bound.epsilon();
    let mut touched = vec![usize::MAX; n];
    let mut moves_applied = 0;
    while let Some(entry) = round.heap.pop() {
        if round.slots[entry.vertex] != Slot::Queued(entry.version) {
            continue;
        }
        if round.state.is_balanced(epsilon) {
            break;
        }
        let v = entry.vertex;
        let current = best_move(round.state, v, bound, filter, &mut round.buf);
        match current {
            Some(mv) if mv == entry.mv => {}
            Some(mv) => {
                round.enqueue(v, mv);
                continue;
            }
            None => {
                round.park(v);
                continue;
            }
        }

        let from = round.state.block_of(v);
        let target = entry.mv.target;
        log.apply(round.state, v, target, bound);
        moves_applied += 1;
        round.slots[v] = Slot::Moved;

        round.retry_targetless(from);
        round.retry_targetless(target);
        let hg = round.state.hypergraph();
        for &e in hg.incident_edges(v) {
            if hg.edge_size(e) > NEIGHBOR_EDGE_LIMIT {
                continue;
            }
            for &u in hg.pins(e) {
                if touched[u] != moves_applied {
                    touched[u] = moves_applied;
                    round.rate(u);
                }
            }
        }
    }

    log.rollback(state);
    let imbalance_after = objective::l1u_total(state, bound);
    let moves_kept = log.len();
    RoundResult {
        imbalance_before,
        imbalance_after,
        moves_applied,
        moves_kept,
        stalled: moves_kept == 0,
        log,
    }
}
