//! Normalized weights and the incrementally maintained k-way partition.

use crate::error::{Error, Result};
use crate::hypergraph::{BlockId, EdgeId, EdgeWeight, Hypergraph, VertexId};

/// Absolute slack used when comparing normalized block weights against limits.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Pin counts are stored densely up to this many blocks.
const DENSE_PIN_COUNT_LIMIT: usize = 64;

/// Per-dimension scaling that makes the average block weight equal to 1.
///
/// Blocks can additionally carry a capacity share (default 1). A block with
/// share `s` sees every vertex weight divided by `s`, which lets recursive
/// bisection use uneven side capacities while every balance routine keeps
/// comparing against `1 + eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationContext {
    k: usize,
    scale: Vec<f64>,
    block_scale: Vec<f64>,
}

impl NormalizationContext {
    pub fn new(hg: &Hypergraph, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewBlocks(k));
        }
        Self::from_totals(&hg.total_weight(), k)
    }

    /// Scaling for the given per-dimension totals; `k` may be 1 here.
    pub fn from_totals(totals: &[f64], k: usize) -> Result<Self> {
        let mut scale = Vec::with_capacity(totals.len());
        for (j, &t) in totals.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::ZeroTotalWeight(j));
            }
            scale.push(k as f64 / t);
        }
        Ok(Self {
            k,
            scale,
            block_scale: vec![1.0; k],
        })
    }

    /// Reuses an existing scale for `shares.len()` blocks whose capacities are
    /// `shares[b]` average-block units.
    pub fn with_shares(scale: &[f64], shares: &[f64]) -> Self {
        Self {
            k: shares.len(),
            scale: scale.to_vec(),
            block_scale: shares.iter().map(|s| 1.0 / s).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn dims(&self) -> usize {
        self.scale.len()
    }

    pub fn block_scale(&self, b: BlockId) -> f64 {
        self.block_scale[b]
    }

    /// Normalized weight of vertex `v` in dimension `j`, ignoring block shares.
    #[inline]
    pub fn normalized(&self, hg: &Hypergraph, v: VertexId, j: usize) -> f64 {
        hg.weight(v)[j] * self.scale[j]
    }

    /// Largest normalized weight per dimension, measured against the smallest
    /// block share.
    pub fn max_vertex_weight(&self, hg: &Hypergraph) -> Vec<f64> {
        let share_factor = self.block_scale.iter().copied().fold(0.0, f64::max);
        let mut max = vec![0.0f64; self.dims()];
        for v in 0..hg.num_vertices() {
            for (j, m) in max.iter_mut().enumerate() {
                *m = m.max(self.normalized(hg, v, j) * share_factor);
            }
        }
        max
    }
}

#[derive(Debug, Clone)]
enum PinCounts {
    Dense { k: usize, counts: Vec<u32> },
    Sparse(Vec<Vec<(BlockId, u32)>>),
}

impl PinCounts {
    fn new(num_edges: usize, k: usize) -> Self {
        if k <= DENSE_PIN_COUNT_LIMIT {
            PinCounts::Dense {
                k,
                counts: vec![0; num_edges * k],
            }
        } else {
            PinCounts::Sparse(vec![Vec::new(); num_edges])
        }
    }

    #[inline]
    fn get(&self, e: EdgeId, b: BlockId) -> u32 {
        match self {
            PinCounts::Dense { k, counts } => counts[e * k + b],
            PinCounts::Sparse(lists) => lists[e]
                .iter()
                .find(|(blk, _)| *blk == b)
                .map_or(0, |&(_, c)| c),
        }
    }

    /// Increments and returns the new count.
    #[inline]
    fn increment(&mut self, e: EdgeId, b: BlockId) -> u32 {
        match self {
            PinCounts::Dense { k, counts } => {
                let c = &mut counts[e * *k + b];
                *c += 1;
                *c
            }
            PinCounts::Sparse(lists) => {
                let list = &mut lists[e];
                if let Some(entry) = list.iter_mut().find(|(blk, _)| *blk == b) {
                    entry.1 += 1;
                    entry.1
                } else {
                    list.push((b, 1));
                    1
                }
            }
        }
    }

    /// Decrements and returns the new count.
    #[inline]
    fn decrement(&mut self, e: EdgeId, b: BlockId) -> u32 {
        match self {
            PinCounts::Dense { k, counts } => {
                let c = &mut counts[e * *k + b];
                *c -= 1;
                *c
            }
            PinCounts::Sparse(lists) => {
                let list = &mut lists[e];
                let pos = list
                    .iter()
                    .position(|(blk, _)| *blk == b)
                    .expect("pin count underflow");
                list[pos].1 -= 1;
                let c = list[pos].1;
                if c == 0 {
                    list.swap_remove(pos);
                }
                c
            }
        }
    }

    /// Calls `f(block)` for every block holding at least one pin of `e`.
    #[inline]
    fn for_each_block(&self, e: EdgeId, mut f: impl FnMut(BlockId)) {
        match self {
            PinCounts::Dense { k, counts } => {
                for (b, &c) in counts[e * k..(e + 1) * k].iter().enumerate() {
                    if c > 0 {
                        f(b);
                    }
                }
            }
            PinCounts::Sparse(lists) => {
                for &(b, _) in &lists[e] {
                    f(b);
                }
            }
        }
    }
}

/// Result of a checked move.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveDelta {
    pub vertex: VertexId,
    pub from: BlockId,
    pub to: BlockId,
    /// Connectivity after minus connectivity before.
    pub connectivity_delta: EdgeWeight,
    /// Weight removed from `from` (and, up to block shares, added to `to`).
    pub weight_delta: Vec<f64>,
}

/// A k-way partition with cached block weights, pin counts and connectivity.
#[derive(Debug, Clone)]
pub struct PartitionState<'a> {
    hg: &'a Hypergraph,
    ctx: NormalizationContext,
    assignment: Vec<BlockId>,
    block_weights: Vec<f64>,
    block_sizes: Vec<usize>,
    pin_counts: PinCounts,
    connectivity: EdgeWeight,
}

impl<'a> PartitionState<'a> {
    pub fn new(
        hg: &'a Hypergraph,
        ctx: NormalizationContext,
        assignment: Vec<BlockId>,
    ) -> Result<Self> {
        if assignment.len() != hg.num_vertices() {
            return Err(Error::AssignmentLength {
                expected: hg.num_vertices(),
                found: assignment.len(),
            });
        }
        let k = ctx.k();
        if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= k) {
            return Err(Error::BlockOutOfRange { vertex: v, block: b, k });
        }
        let d = hg.dims();
        let mut state = Self {
            hg,
            ctx,
            assignment,
            block_weights: vec![0.0; k * d],
            block_sizes: vec![0; k],
            pin_counts: PinCounts::new(hg.num_edges(), k),
            connectivity: 0,
        };
        for v in 0..hg.num_vertices() {
            let b = state.assignment[v];
            state.block_sizes[b] += 1;
            for j in 0..d {
                state.block_weights[b * d + j] += state.rel_weight(v, b, j);
            }
        }
        for e in 0..hg.num_edges() {
            let mut lambda = 0;
            for &v in hg.pins(e) {
                if state.pin_counts.increment(e, state.assignment[v]) == 1 {
                    lambda += 1;
                }
            }
            state.connectivity += (lambda - 1) * hg.edge_weight(e);
        }
        Ok(state)
    }

    pub fn hypergraph(&self) -> &'a Hypergraph {
        self.hg
    }

    pub fn context(&self) -> &NormalizationContext {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.ctx.k()
    }

    pub fn dims(&self) -> usize {
        self.hg.dims()
    }

    pub fn block_of(&self, v: VertexId) -> BlockId {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[BlockId] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<BlockId> {
        self.assignment
    }

    pub fn connectivity(&self) -> EdgeWeight {
        self.connectivity
    }

    pub fn block_weight(&self, b: BlockId) -> &[f64] {
        let d = self.dims();
        &self.block_weights[b * d..(b + 1) * d]
    }

    pub fn block_size(&self, b: BlockId) -> usize {
        self.block_sizes[b]
    }

    pub fn pin_count(&self, e: EdgeId, b: BlockId) -> u32 {
        self.pin_counts.get(e, b)
    }

    /// Number of blocks touched by hyperedge `e`.
    pub fn lambda(&self, e: EdgeId) -> usize {
        let mut lambda = 0;
        self.pin_counts.for_each_block(e, |_| lambda += 1);
        lambda
    }

    /// Weight of `v` in dimension `j` relative to the capacity of block `b`.
    #[inline]
    pub fn rel_weight(&self, v: VertexId, b: BlockId, j: usize) -> f64 {
        self.ctx.normalized(self.hg, v, j) * self.ctx.block_scale(b)
    }

    /// Normalized weight row of `v` relative to block `b`.
    pub fn vertex_weight_in(&self, v: VertexId, b: BlockId) -> Vec<f64> {
        (0..self.dims()).map(|j| self.rel_weight(v, b, j)).collect()
    }

    /// L1 norm of the normalized weight of `v` relative to block `b`.
    pub fn vertex_l1_in(&self, v: VertexId, b: BlockId) -> f64 {
        (0..self.dims()).map(|j| self.rel_weight(v, b, j)).sum()
    }

    pub fn is_balanced(&self, epsilon: f64) -> bool {
        let limit = 1.0 + epsilon + WEIGHT_TOLERANCE;
        self.block_weights.iter().all(|&w| w <= limit)
    }

    pub fn is_block_overloaded(&self, b: BlockId, epsilon: f64) -> bool {
        let limit = 1.0 + epsilon + WEIGHT_TOLERANCE;
        self.block_weight(b).iter().any(|&w| w > limit)
    }

    /// Maximum relative block weight per dimension.
    pub fn max_block_weights(&self) -> Vec<f64> {
        let d = self.dims();
        let mut max = vec![0.0f64; d];
        for row in self.block_weights.chunks_exact(d) {
            for (m, &w) in max.iter_mut().zip(row) {
                *m = m.max(w);
            }
        }
        max
    }

    /// Whether moving `v` into `target` keeps that block within `limits`.
    #[inline]
    pub fn fits(&self, v: VertexId, target: BlockId, limits: &[f64]) -> bool {
        let row = self.block_weight(target);
        (0..self.dims()).all(|j| row[j] + self.rel_weight(v, target, j) <= limits[j] + WEIGHT_TOLERANCE)
    }

    /// Connectivity gain of moving `v` to `target`: positive means the
    /// connectivity decreases.
    pub fn connectivity_gain(&self, v: VertexId, target: BlockId) -> EdgeWeight {
        let from = self.assignment[v];
        if from == target {
            return 0;
        }
        let mut gain = 0;
        for &e in self.hg.incident_edges(v) {
            let w = self.hg.edge_weight(e);
            if self.pin_counts.get(e, from) == 1 {
                gain += w;
            }
            if self.pin_counts.get(e, target) == 0 {
                gain -= w;
            }
        }
        gain
    }

    /// Fills `gains[b]` with the connectivity gain of moving `v` to `b` for
    /// every block (`gains[block_of(v)]` is 0).
    pub fn connectivity_gains(&self, v: VertexId, gains: &mut Vec<EdgeWeight>) {
        let from = self.assignment[v];
        gains.clear();
        gains.resize(self.k(), 0);
        let mut benefit = 0;
        let mut total = 0;
        for &e in self.hg.incident_edges(v) {
            let w = self.hg.edge_weight(e);
            total += w;
            if self.pin_counts.get(e, from) == 1 {
                benefit += w;
            }
            self.pin_counts.for_each_block(e, |b| gains[b] += w);
        }
        for (b, g) in gains.iter_mut().enumerate() {
            *g = if b == from { 0 } else { benefit - (total - *g) };
        }
    }

    /// Blocks other than `block_of(v)` sharing at least one hyperedge with `v`.
    pub fn adjacent_blocks(&self, v: VertexId, out: &mut Vec<BlockId>) {
        let from = self.assignment[v];
        out.clear();
        for &e in self.hg.incident_edges(v) {
            self.pin_counts.for_each_block(e, |b| {
                if b != from && !out.contains(&b) {
                    out.push(b);
                }
            });
        }
        out.sort_unstable();
    }

    /// Checked move: validates the target and reports the full delta.
    pub fn apply_move(&mut self, v: VertexId, target: BlockId) -> Result<MoveDelta> {
        if target >= self.k() {
            return Err(Error::BlockOutOfRange {
                vertex: v,
                block: target,
                k: self.k(),
            });
        }
        let from = self.assignment[v];
        if from == target {
            return Err(Error::SameBlockMove(v));
        }
        let weight_delta = self.vertex_weight_in(v, from);
        let connectivity_delta = self.move_vertex(v, target);
        Ok(MoveDelta {
            vertex: v,
            from,
            to: target,
            connectivity_delta,
            weight_delta,
        })
    }

    /// Moves `v` to `target` and returns the connectivity delta (after - before).
    pub(crate) fn move_vertex(&mut self, v: VertexId, target: BlockId) -> EdgeWeight {
        let from = self.assignment[v];
        debug_assert!(from != target && target < self.k());
        let d = self.dims();
        for j in 0..d {
            self.block_weights[from * d + j] -= self.rel_weight(v, from, j);
            self.block_weights[target * d + j] += self.rel_weight(v, target, j);
        }
        self.block_sizes[from] -= 1;
        self.block_sizes[target] += 1;
        self.assignment[v] = target;
        let mut delta = 0;
        for &e in self.hg.incident_edges(v) {
            let w = self.hg.edge_weight(e);
            if self.pin_counts.decrement(e, from) == 0 {
                delta -= w;
            }
            if self.pin_counts.increment(e, target) == 1 {
                delta += w;
            }
        }
        self.connectivity += delta;
        delta
    }

    /// Moves every vertex whose block differs from `assignment`.
    pub fn set_assignment(&mut self, assignment: &[BlockId]) {
        debug_assert_eq!(assignment.len(), self.assignment.len());
        for (v, &b) in assignment.iter().enumerate() {
            if self.assignment[v] != b {
                self.move_vertex(v, b);
            }
        }
    }

    /// Vertices of block `b`, in increasing id order.
    pub fn block_members(&self, b: BlockId) -> Vec<VertexId> {
        (0..self.assignment.len())
            .filter(|&v| self.assignment[v] == b)
            .collect()
    }
}
