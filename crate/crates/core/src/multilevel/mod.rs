//! The multilevel partitioner: coarsening, recursive-bisection initial
//! partitioning and uncoarsening with rebalancing and refinement.

pub mod coarsen;
pub mod degree_zero;
pub mod initial;
pub mod refine;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use coarsen::{CoarseningConfig, Hierarchy};
pub use initial::InitialConfig;
pub use refine::{LpMode, RefinementConfig};

use crate::error::{Error, Result};
use crate::hypergraph::{BlockId, EdgeWeight, Hypergraph};
use crate::objective::{ImbalanceBound, DEFAULT_WEIGHT_THRESHOLD};
use crate::partition::{NormalizationContext, PartitionState};
use crate::rebalance::{
    self, FallbackRating, RebalanceOutcome, RebalancerConfig, Strategy, DEFAULT_MAX_ROUNDS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RebalanceSettings {
    pub threshold: f64,
    pub strategy: Strategy,
    pub fallback_enabled: bool,
    pub fallback_rating: FallbackRating,
    pub max_rounds: usize,
}

impl Default for RebalanceSettings {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_WEIGHT_THRESHOLD,
            strategy: Strategy::L1u,
            fallback_enabled: true,
            fallback_rating: FallbackRating::default(),
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }
}

/// Counters accumulated over every rebalancer invocation of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RebalanceStats {
    pub calls: usize,
    pub greedy_rounds: usize,
    pub fallback_calls: usize,
    pub time: Duration,
}

/// Runs the rebalancer with fixed settings and keeps statistics.
#[derive(Debug, Clone)]
pub struct Rebalancer {
    pub settings: RebalanceSettings,
    pub stats: RebalanceStats,
}

impl Rebalancer {
    pub fn new(settings: RebalanceSettings) -> Self {
        Self {
            settings,
            stats: RebalanceStats::default(),
        }
    }

    /// Default-mode bound for the state's hypergraph and block shares.
    pub fn bound(&self, state: &PartitionState<'_>, epsilon: f64) -> ImbalanceBound {
        ImbalanceBound::new(state.hypergraph(), state.context(), epsilon, self.settings.threshold)
            .or_else(|_| ImbalanceBound::plain(state.dims(), epsilon))
            .expect("epsilon is positive")
    }

    pub fn run(&mut self, state: &mut PartitionState<'_>, epsilon: f64) -> RebalanceOutcome {
        let start = Instant::now();
        let config = RebalancerConfig {
            max_rounds: self.settings.max_rounds,
            bound: self.bound(state, epsilon),
            fallback_enabled: self.settings.fallback_enabled,
            fallback_rating: self.settings.fallback_rating,
            unbounded_rounds: false,
            strategy: self.settings.strategy,
        };
        let outcome = rebalance::rebalance(state, &config);
        self.stats.calls += 1;
        self.stats.greedy_rounds += outcome.rounds;
        self.stats.fallback_calls += outcome.fallback_calls;
        self.stats.time += start.elapsed();
        outcome
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub coarsening: CoarseningConfig,
    pub initial: InitialConfig,
    pub refinement: RefinementConfig,
    pub rebalance: RebalanceSettings,
}

impl PartitionConfig {
    pub fn new(k: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            k,
            epsilon,
            seed,
            coarsening: CoarseningConfig::default(),
            initial: InitialConfig::default(),
            refinement: RefinementConfig::default(),
            rebalance: RebalanceSettings::default(),
        }
    }
}

/// Wall-clock time per phase. `rebalance` is contained in the other phases.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub total: Duration,
    pub coarsen: Duration,
    pub initial: Duration,
    pub refine: Duration,
    pub rebalance: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub connectivity: EdgeWeight,
    pub max_block_weights: Vec<f64>,
    pub balanced: bool,
    pub levels: usize,
    pub coarsest_vertices: usize,
    pub rebalance: RebalanceStats,
    pub timings: Timings,
    /// Set when some vertex alone exceeds `1 + eps` in a dimension, which
    /// makes a balanced partition impossible.
    pub warning: Option<String>,
}

fn refine_level(
    state: &mut PartitionState<'_>,
    epsilon: f64,
    config: &RefinementConfig,
    rebalancer: &mut Rebalancer,
    rng: &mut ChaCha8Rng,
) {
    if !state.is_balanced(epsilon) {
        rebalancer.run(state, epsilon);
    }
    match config.lp_mode {
        LpMode::Constrained => {
            refine::lp_constrained(state, epsilon, config.lp_rounds, rng);
        }
        LpMode::Unconstrained => {
            refine::lp_unconstrained(state, epsilon, config.lp_rounds, rebalancer, rng);
        }
    }
    if config.fm_enabled {
        refine::fm_constrained(
            state,
            epsilon,
            config.fm_max_negative_streak,
            config.fm_max_passes,
        );
    }
}

/// Partitions `hg` into `config.k` blocks. The result may be unbalanced when
/// no balanced partition was found; `PartitionReport::balanced` says which.
pub fn partition(hg: &Hypergraph, config: &PartitionConfig) -> Result<(Vec<BlockId>, PartitionReport)> {
    let start = Instant::now();
    if !(config.epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(config.epsilon));
    }
    let k = config.k;
    let eps = config.epsilon;
    let ctx = NormalizationContext::new(hg, k)?;
    ImbalanceBound::new(hg, &ctx, eps, config.rebalance.threshold)?;

    let heaviest = ctx.max_vertex_weight(hg);
    let warning = heaviest
        .iter()
        .enumerate()
        .find(|(_, &w)| w > 1.0 + eps)
        .map(|(j, &w)| {
            format!("a vertex has normalized weight {w:.6} > 1 + eps in dimension {j}; no balanced partition exists")
        });
    if let Some(w) = &warning {
        log::warn!("{w}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rebalancer = Rebalancer::new(config.rebalance.clone());
    let mut timings = Timings::default();

    let reduction = degree_zero::remove_degree_zero(hg)?;
    let reduced = &reduction.hypergraph;

    let t = Instant::now();
    let hierarchy = coarsen::coarsen(reduced, &ctx, &config.coarsening, &mut rng)?;
    timings.coarsen = t.elapsed();
    let coarsest = hierarchy.coarsest(reduced);

    let t = Instant::now();
    let mut assignment =
        initial::initial_partition(coarsest, &ctx, eps, &config.initial, &mut rebalancer, &mut rng);
    timings.initial = t.elapsed();

    let t = Instant::now();
    {
        let mut state = PartitionState::new(coarsest, ctx.clone(), assignment)?;
        refine_level(&mut state, eps, &config.refinement, &mut rebalancer, &mut rng);
        assignment = state.into_assignment();
    }
    for i in (0..hierarchy.depth()).rev() {
        let finer = hierarchy.finer(reduced, i);
        let projection = &hierarchy.levels[i].projection;
        let projected: Vec<BlockId> = projection.iter().map(|&c| assignment[c]).collect();
        let mut state = PartitionState::new(finer, ctx.clone(), projected)?;
        refine_level(&mut state, eps, &config.refinement, &mut rebalancer, &mut rng);
        assignment = state.into_assignment();
    }
    timings.refine = t.elapsed();

    let full = degree_zero::reinsert_degree_zero(hg, &ctx, &reduction, &assignment);
    let mut state = PartitionState::new(hg, ctx, full)?;
    if !state.is_balanced(eps) {
        rebalancer.run(&mut state, eps);
    }

    timings.rebalance = rebalancer.stats.time;
    timings.total = start.elapsed();
    let report = PartitionReport {
        connectivity: state.connectivity(),
        max_block_weights: state.max_block_weights(),
        balanced: state.is_balanced(eps),
        levels: hierarchy.depth(),
        coarsest_vertices: coarsest.num_vertices(),
        rebalance: rebalancer.stats,
        timings,
        warning,
    };
    Ok((state.into_assignment(), report))
}
