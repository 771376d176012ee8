//! Multi-constraint rebalancing.
//!
//! Repeated greedy rounds move vertices out of blocks with positive L1^u
//! imbalance, allowing moves into overloaded blocks as long as the total
//! L1^u imbalance drops. A round that cannot improve triggers the fallback
//! heuristic once; a second consecutive stall ends the attempt.

pub mod fallback;
pub mod greedy;

pub use fallback::{fallback, plan_block, score_block, Alpha, Beta, BlockPlan, FallbackPlan, FallbackRating, FallbackSelection, Rho};
pub use greedy::{
    collect_candidates, greedy_round, Candidate, LoggedMove, MoveCandidateSet, MoveLog, RatedMove,
    RoundResult, TargetFilter,
};

use crate::objective::ImbalanceBound;
use crate::partition::PartitionState;

pub const DEFAULT_MAX_ROUNDS: usize = 10;

/// Which move rule the rebalancer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// L1^u greedy rounds with rollback and optional fallback.
    L1u,
    /// Only moves whose target stays within `1 + eps`; no fallback.
    Baseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RebalancerConfig {
    pub max_rounds: usize,
    pub bound: ImbalanceBound,
    pub fallback_enabled: bool,
    pub fallback_rating: FallbackRating,
    pub unbounded_rounds: bool,
    pub strategy: Strategy,
}

impl RebalancerConfig {
    pub fn new(bound: ImbalanceBound) -> Self {
        Self {
            max_rounds: DEFAULT_MAX_ROUNDS,
            bound,
            fallback_enabled: true,
            fallback_rating: FallbackRating::default(),
            unbounded_rounds: false,
            strategy: Strategy::L1u,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RebalanceStatus {
    Balanced,
    Stalled,
    RoundLimit,
}

/// One step of a rebalance run, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub enum RebalanceEvent {
    Round(RoundResult),
    Fallback(FallbackPlan),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RebalanceOutcome {
    pub status: RebalanceStatus,
    /// Greedy rounds executed, including stalled ones.
    pub rounds: usize,
    pub fallback_calls: usize,
    /// Moves that remain applied (kept greedy moves plus fallback moves).
    pub moves: usize,
    pub events: Vec<RebalanceEvent>,
}

impl RebalanceOutcome {
    pub fn rounds(&self) -> impl Iterator<Item = &RoundResult> {
        self.events.iter().filter_map(|e| match e {
            RebalanceEvent::Round(r) => Some(r),
            RebalanceEvent::Fallback(_) => None,
        })
    }
}

pub fn rebalance(state: &mut PartitionState<'_>, config: &RebalancerConfig) -> RebalanceOutcome {
    let epsilon = config.bound.epsilon();
    let (bound, filter, fallback_enabled) = match config.strategy {
        Strategy::L1u => (
            config.bound.clone(),
            TargetFilter::Any,
            config.fallback_enabled && state.dims() > 1,
        ),
        Strategy::Baseline => {
            let limits = vec![1.0 + epsilon; state.dims()];
            (
                ImbalanceBound::with_override(limits.clone(), epsilon)
                    .expect("positive epsilon"),
                TargetFilter::WithinLimits(limits),
                false,
            )
        }
    };

    let mut outcome = RebalanceOutcome {
        status: RebalanceStatus::Balanced,
        rounds: 0,
        fallback_calls: 0,
        moves: 0,
        events: Vec::new(),
    };
    let mut after_fallback = false;
    loop {
        if state.is_balanced(epsilon) {
            outcome.status = RebalanceStatus::Balanced;
            break;
        }
        if !config.unbounded_rounds && outcome.rounds >= config.max_rounds {
            outcome.status = RebalanceStatus::RoundLimit;
            break;
        }
        let round = greedy_round(state, &bound, &filter);
        outcome.rounds += 1;
        outcome.moves += round.moves_kept;
        let stalled = round.stalled;
        outcome.events.push(RebalanceEvent::Round(round));
        if !stalled {
            after_fallback = false;
            continue;
        }
        if fallback_enabled && !after_fallback {
            let plan = fallback::fallback(state, &bound, config.fallback_rating);
            outcome.fallback_calls += 1;
            outcome.moves += plan.moves();
            outcome.events.push(RebalanceEvent::Fallback(plan));
            after_fallback = true;
            continue;
        }
        outcome.status = RebalanceStatus::Stalled;
        break;
    }
    outcome
}
