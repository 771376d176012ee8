//! L1^u imbalance, per-dimension bounds, move gains and the greedy rating.

use crate::error::{Error, Result};
use crate::hypergraph::{BlockId, EdgeWeight, Hypergraph, VertexId};
use crate::partition::{NormalizationContext, PartitionState};

/// Default heavy-weight threshold `t`, as a fraction of the average block weight.
pub const DEFAULT_WEIGHT_THRESHOLD: f64 = 0.0025;

/// Balance gains at or below this value are treated as non-improving.
pub const GAIN_EPSILON: f64 = 1e-12;

/// Per-dimension upper bound `u` used by the L1^u metric.
///
/// In the default mode `u_j = 1 + eps - min(t, max_v c(v)_j)`, so that heavy
/// outliers above the threshold `t` do not shrink the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceBound {
    upper: Vec<f64>,
    epsilon: f64,
    threshold: Option<f64>,
    max_vertex_weight: Vec<f64>,
    capped_weight: Vec<f64>,
}

impl ImbalanceBound {
    pub fn new(
        hg: &Hypergraph,
        ctx: &NormalizationContext,
        epsilon: f64,
        threshold: f64,
    ) -> Result<Self> {
        Self::from_max_weights(ctx.max_vertex_weight(hg), epsilon, threshold)
    }

    /// Builds the default-mode bound from observed per-dimension maxima.
    pub fn from_max_weights(max_vertex_weight: Vec<f64>, epsilon: f64, threshold: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        if !(threshold > 0.0) {
            return Err(Error::NonPositiveThreshold(threshold));
        }
        let capped_weight: Vec<f64> = max_vertex_weight.iter().map(|&m| m.min(threshold)).collect();
        let upper: Vec<f64> = capped_weight.iter().map(|&c| 1.0 + epsilon - c).collect();
        if let Some((dim, &value)) = upper.iter().enumerate().find(|(_, &u)| u <= 0.0) {
            return Err(Error::NonPositiveBound { dim, value });
        }
        Ok(Self {
            upper,
            epsilon,
            threshold: Some(threshold),
            max_vertex_weight,
            capped_weight,
        })
    }

    /// Stores `upper` verbatim.
    pub fn with_override(upper: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        if let Some((dim, &value)) = upper.iter().enumerate().find(|(_, &u)| !(u > 0.0)) {
            return Err(Error::NonPositiveBound { dim, value });
        }
        let d = upper.len();
        Ok(Self {
            upper,
            epsilon,
            threshold: None,
            max_vertex_weight: vec![0.0; d],
            capped_weight: vec![0.0; d],
        })
    }

    /// `u = 1 + eps` in every dimension.
    pub fn plain(dims: usize, epsilon: f64) -> Result<Self> {
        Self::with_override(vec![1.0 + epsilon; dims], epsilon)
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `None` in override mode.
    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn max_vertex_weight(&self) -> &[f64] {
        &self.max_vertex_weight
    }

    pub fn capped_weight(&self) -> &[f64] {
        &self.capped_weight
    }

    pub fn dims(&self) -> usize {
        self.upper.len()
    }
}

/// Connectivity and balance gain of one move; positive values are improvements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair {
    pub connectivity: EdgeWeight,
    pub balance: f64,
}

/// `sum_j max(w_j - u_j, 0)`.
pub fn l1u_block(row: &[f64], upper: &[f64]) -> f64 {
    row.iter()
        .zip(upper)
        .map(|(&w, &u)| (w - u).max(0.0))
        .sum()
}

pub fn l1u_total(state: &PartitionState<'_>, bound: &ImbalanceBound) -> f64 {
    (0..state.k())
        .map(|b| l1u_block(state.block_weight(b), bound.upper()))
        .sum()
}

/// Change in L1^u when moving `v` to `target`, computed from the two affected
/// block rows only. Positive means the imbalance decreases.
pub fn balance_gain(
    state: &PartitionState<'_>,
    v: VertexId,
    target: BlockId,
    bound: &ImbalanceBound,
) -> f64 {
    let from = state.block_of(v);
    if from == target {
        return 0.0;
    }
    let src = state.block_weight(from);
    let dst = state.block_weight(target);
    let mut gain = 0.0;
    for (j, &u) in bound.upper().iter().enumerate() {
        let src_after = src[j] - state.rel_weight(v, from, j);
        let dst_after = dst[j] + state.rel_weight(v, target, j);
        gain += (src[j] - u).max(0.0) + (dst[j] - u).max(0.0)
            - (src_after - u).max(0.0)
            - (dst_after - u).max(0.0);
    }
    gain
}

pub fn connectivity_gain(state: &PartitionState<'_>, v: VertexId, target: BlockId) -> EdgeWeight {
    state.connectivity_gain(v, target)
}

/// Rating of an imbalance-reducing move (higher is better): the ratio of
/// connectivity gain to balance gain when the connectivity worsens, and their
/// product otherwise.
pub fn rating(gains: GainPair) -> f64 {
    debug_assert!(gains.balance > 0.0, "only imbalance-reducing moves are rated");
    let conn = gains.connectivity as f64;
    if gains.connectivity < 0 {
        conn / gains.balance
    } else {
        conn * gains.balance
    }
}
