//! Single-instance commands.

use std::path::Path;

use anyhow::{bail, Context};
use mcpart::io::{self, WeightSpec};
use mcpart::multilevel::{PartitionConfig, PartitionReport};
use mcpart::objective::{self, ImbalanceBound};
use mcpart::oracle;
use mcpart::rebalance::{self, FallbackRating, RebalanceOutcome, RebalanceStatus, RebalancerConfig, Strategy};
use mcpart::{BlockId, EdgeWeight, Hypergraph, NormalizationContext, PartitionState};

/// Process exit code of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Feasible = 0,
    InputError = 1,
    Infeasible = 2,
}

impl ExitStatus {
    pub fn from_balanced(balanced: bool) -> Self {
        if balanced {
            ExitStatus::Feasible
        } else {
            ExitStatus::Infeasible
        }
    }
}

/// Reads a hypergraph (`.graph` files as Metis graphs, everything else in
/// the hypergraph format) and replaces its weights according to `weights`.
pub fn load_instance(path: &Path, weights: &WeightSpec) -> anyhow::Result<Hypergraph> {
    let hg = if path.extension().is_some_and(|e| e == "graph") {
        io::read_graph(path)
    } else {
        io::read_hypergraph(path)
    }
    .with_context(|| format!("reading {}", path.display()))?;
    if *weights == WeightSpec::input() {
        return Ok(hg);
    }
    io::derive_weights(&hg, weights).with_context(|| format!("deriving weights `{weights}`"))
}

pub fn partition(hg: &Hypergraph, config: &PartitionConfig) -> anyhow::Result<(Vec<BlockId>, PartitionReport)> {
    Ok(mcpart::multilevel::partition(hg, config)?)
}

/// Balance and objective recomputed from scratch.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateReport {
    pub connectivity: EdgeWeight,
    pub max_block_weights: Vec<f64>,
    pub block_weights: Vec<Vec<f64>>,
    pub balanced: bool,
    /// L1^u imbalance for the default bound with threshold `t`, when that
    /// bound exists.
    pub l1u: Option<f64>,
}

pub fn evaluate(hg: &Hypergraph, k: usize, assignment: &[BlockId], epsilon: f64, t: f64) -> anyhow::Result<EvaluateReport> {
    if assignment.len() != hg.num_vertices() {
        bail!("partition has {} entries, hypergraph has {} vertices", assignment.len(), hg.num_vertices());
    }
    if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= k) {
        bail!("vertex {v} is in block {b}, but k = {k}");
    }
    let ctx = NormalizationContext::new(hg, k)?;
    let bound = ImbalanceBound::new(hg, &ctx, epsilon, t).ok();
    let eval = oracle::recompute_all(hg, &ctx, assignment, bound.as_ref());
    Ok(EvaluateReport {
        connectivity: eval.connectivity,
        max_block_weights: eval.max_block_weights(),
        balanced: eval.is_balanced(epsilon),
        block_weights: eval.block_weights,
        l1u: eval.l1u,
    })
}

/// Options of a standalone rebalancer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RebalanceRequest {
    pub epsilon: f64,
    pub t: f64,
    /// Replaces the default per-dimension bound `u`.
    pub u_override: Option<Vec<f64>>,
    pub fallback: bool,
    pub fallback_rating: FallbackRating,
    pub unbounded_rounds: bool,
    pub max_rounds: usize,
    pub strategy: Strategy,
}

impl RebalanceRequest {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            t: objective::DEFAULT_WEIGHT_THRESHOLD,
            u_override: None,
            fallback: true,
            fallback_rating: FallbackRating::default(),
            unbounded_rounds: false,
            max_rounds: rebalance::DEFAULT_MAX_ROUNDS,
            strategy: Strategy::L1u,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RebalanceReport {
    pub status: RebalanceStatus,
    /// Moves that remain applied.
    pub moves: usize,
    /// Vertices whose block differs from the input.
    pub changed: usize,
    pub l1u_before: f64,
    pub l1u_after: f64,
    pub connectivity_before: EdgeWeight,
    pub connectivity_after: EdgeWeight,
    pub max_block_weights: Vec<f64>,
    pub upper: Vec<f64>,
    pub assignment: Vec<BlockId>,
    pub outcome: RebalanceOutcome,
}

pub fn rebalance(
    hg: &Hypergraph,
    k: usize,
    assignment: &[BlockId],
    request: &RebalanceRequest,
) -> anyhow::Result<RebalanceReport> {
    let ctx = NormalizationContext::new(hg, k)?;
    let bound = match &request.u_override {
        Some(u) => {
            if u.len() != hg.dims() {
                bail!("--u-override has {} values, the hypergraph has {} dimensions", u.len(), hg.dims());
            }
            ImbalanceBound::with_override(u.clone(), request.epsilon)?
        }
        None => ImbalanceBound::new(hg, &ctx, request.epsilon, request.t)?,
    };
    let mut state = PartitionState::new(hg, ctx, assignment.to_vec())?;
    let l1u_before = objective::l1u_total(&state, &bound);
    let connectivity_before = state.connectivity();
    let config = RebalancerConfig {
        max_rounds: request.max_rounds,
        bound: bound.clone(),
        fallback_enabled: request.fallback,
        fallback_rating: request.fallback_rating,
        unbounded_rounds: request.unbounded_rounds,
        strategy: request.strategy,
    };
    let outcome = rebalance::rebalance(&mut state, &config);
    let changed = assignment.iter().zip(state.assignment()).filter(|(a, b)| a != b).count();
    Ok(RebalanceReport {
        status: outcome.status,
        moves: outcome.moves,
        changed,
        l1u_before,
        l1u_after: objective::l1u_total(&state, &bound),
        connectivity_before,
        connectivity_after: state.connectivity(),
        max_block_weights: state.max_block_weights(),
        upper: bound.upper().to_vec(),
        assignment: state.into_assignment(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r1() -> Hypergraph {
        Hypergraph::new(
            &[vec![0, 1], vec![1, 2, 3], vec![0, 2]],
            &[vec![9.0, 3.0], vec![3.0, 9.0], vec![5.0, 5.0], vec![3.0, 3.0]],
            &[1, 2, 1],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_r1_p0() {
        let r = evaluate(&r1(), 2, &[0, 1, 0, 0], 0.2, 0.0025).unwrap();
        assert_eq!(r.connectivity, 3);
        assert!(!r.balanced);
        assert!((r.max_block_weights[0] - 1.7).abs() < 1e-12);
    }

    #[test]
    fn evaluate_single_block_is_free() {
        let r = evaluate(&r1(), 2, &[1, 1, 1, 1], 0.2, 0.0025).unwrap();
        assert_eq!(r.connectivity, 0);
    }

    #[test]
    fn evaluate_rejects_bad_partition() {
        assert!(evaluate(&r1(), 2, &[0, 1, 0], 0.2, 0.0025).is_err());
        assert!(evaluate(&r1(), 2, &[0, 1, 0, 2], 0.2, 0.0025).is_err());
    }

    #[test]
    fn rebalance_r1_with_override() {
        let mut req = RebalanceRequest::new(0.2);
        req.u_override = Some(vec![1.1, 1.1]);
        let r = rebalance(&r1(), 2, &[0, 1, 0, 0], &req).unwrap();
        assert_eq!(r.status, RebalanceStatus::Balanced);
        assert_eq!(r.assignment, vec![1, 1, 0, 0]);
        assert_eq!(r.moves, 1);
        assert_eq!(r.connectivity_after, 3);
    }

    #[test]
    fn balanced_input_needs_no_moves() {
        let r = rebalance(&r1(), 2, &[1, 1, 0, 0], &RebalanceRequest::new(0.2)).unwrap();
        assert_eq!((r.status, r.moves, r.changed), (RebalanceStatus::Balanced, 0, 0));
    }

    #[test]
    fn override_dimension_mismatch() {
        let mut req = RebalanceRequest::new(0.2);
        req.u_override = Some(vec![1.1]);
        assert!(rebalance(&r1(), 2, &[0, 1, 0, 0], &req).is_err());
    }
}
