//! Benchmark sweeps: instances x k x seeds, with heavy-vertex exclusion and
//! per-pair aggregation over seeds.

use std::path::Path;

use mcpart::io::{self, RunRecord};
use mcpart::multilevel::PartitionConfig;
use mcpart::{Hypergraph, NormalizationContext};

/// Default exclusion threshold: a vertex heavier than 70% of the average
/// block weight in any dimension.
pub const DEFAULT_EXCLUSION: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ks: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Template for every run; `k` and `seed` are overwritten.
    pub partition: PartitionConfig,
    pub exclusion_threshold: f64,
    pub algorithm: String,
}

impl BenchConfig {
    pub fn new(ks: Vec<usize>, seeds: usize, epsilon: f64) -> Self {
        Self {
            ks,
            seeds,
            base_seed: 0,
            partition: PartitionConfig::new(2, epsilon, 0),
            exclusion_threshold: DEFAULT_EXCLUSION,
            algorithm: "default".into(),
        }
    }
}

/// Aggregate of one (instance, k) pair over its seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSummary {
    pub instance: String,
    pub k: usize,
    pub excluded: bool,
    pub runs: usize,
    pub balanced_runs: usize,
    pub mean_connectivity: f64,
    pub mean_time: f64,
}

impl PairSummary {
    /// A pair is balanced if any of its seeds produced a balanced partition.
    pub fn balanced(&self) -> bool {
        self.balanced_runs > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub pairs: Vec<PairSummary>,
    pub records: Vec<RunRecord>,
}

impl BenchSummary {
    fn included(&self) -> impl Iterator<Item = &PairSummary> {
        self.pairs.iter().filter(|p| !p.excluded)
    }

    /// Geometric mean of the per-pair mean connectivities, over pairs with
    /// positive mean.
    pub fn geometric_mean_connectivity(&self) -> Option<f64> {
        let values: Vec<f64> = self.included().map(|p| p.mean_connectivity).filter(|&c| c > 0.0).collect();
        geometric_mean(&values)
    }

    pub fn geometric_mean_time(&self) -> Option<f64> {
        let values: Vec<f64> = self.included().map(|p| p.mean_time).filter(|&t| t > 0.0).collect();
        geometric_mean(&values)
    }

    /// Fraction of included pairs with at least one balanced seed.
    pub fn balanced_pair_fraction(&self) -> f64 {
        fraction(self.included().filter(|p| p.balanced()).count(), self.included().count())
    }

    /// Fraction of individual runs that ended balanced.
    pub fn balanced_run_fraction(&self) -> f64 {
        let runs: usize = self.included().map(|p| p.runs).sum();
        let balanced: usize = self.included().map(|p| p.balanced_runs).sum();
        fraction(balanced, runs)
    }
}

fn fraction(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `None` for an empty slice or any non-positive value.
pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    Some((values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp())
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Whether some vertex is heavier than `threshold` times the average block
/// weight in some dimension.
pub fn is_excluded(hg: &Hypergraph, k: usize, threshold: f64) -> mcpart::Result<bool> {
    let ctx = NormalizationContext::new(hg, k)?;
    Ok(ctx.max_vertex_weight(hg).iter().any(|&w| w > threshold))
}

fn excluded_record(instance: &str, k: usize, hg: &Hypergraph, config: &BenchConfig) -> RunRecord {
    RunRecord {
        instance: instance.to_string(),
        algorithm: config.algorithm.clone(),
        k,
        seed: config.base_seed,
        epsilon: config.partition.epsilon,
        d: hg.dims(),
        connectivity: 0,
        max_block_weights: Vec::new(),
        balanced: false,
        time_total: 0.0,
        time_coarsen: 0.0,
        time_initial: 0.0,
        time_refine: 0.0,
        time_rebalance: 0.0,
        rebalance_calls: 0,
        greedy_rounds: 0,
        fallback_calls: 0,
        excluded: true,
    }
}

/// Runs every seed of every (instance, k) pair. Records are appended to
/// `csv` pair by pair when given.
pub fn bench(
    instances: &[(String, Hypergraph)],
    config: &BenchConfig,
    csv: Option<&Path>,
) -> anyhow::Result<BenchSummary> {
    let mut summary = BenchSummary {
        pairs: Vec::new(),
        records: Vec::new(),
    };
    for (name, hg) in instances {
        for &k in &config.ks {
            let mut records = Vec::new();
            let excluded = is_excluded(hg, k, config.exclusion_threshold)?;
            if excluded {
                log::info!("{name} k={k}: excluded by the heavy-vertex filter");
                records.push(excluded_record(name, k, hg, config));
            } else {
                for s in 0..config.seeds {
                    let seed = config.base_seed + s as u64;
                    let mut pc = config.partition.clone();
                    pc.k = k;
                    pc.seed = seed;
                    let (_, report) = mcpart::multilevel::partition(hg, &pc)?;
                    let t = report.timings;
                    records.push(RunRecord {
                        instance: name.clone(),
                        algorithm: config.algorithm.clone(),
                        k,
                        seed,
                        epsilon: pc.epsilon,
                        d: hg.dims(),
                        connectivity: report.connectivity,
                        max_block_weights: report.max_block_weights,
                        balanced: report.balanced,
                        time_total: t.total.as_secs_f64(),
                        time_coarsen: t.coarsen.as_secs_f64(),
                        time_initial: t.initial.as_secs_f64(),
                        time_refine: t.refine.as_secs_f64(),
                        time_rebalance: t.rebalance.as_secs_f64(),
                        rebalance_calls: report.rebalance.calls,
                        greedy_rounds: report.rebalance.greedy_rounds,
                        fallback_calls: report.rebalance.fallback_calls,
                        excluded: false,
                    });
                }
            }
            if let Some(path) = csv {
                io::records::append_run_records(path, &records)?;
            }
            summary.pairs.push(summarize(name, k, excluded, &records));
            summary.records.extend(records);
        }
    }
    Ok(summary)
}

fn summarize(instance: &str, k: usize, excluded: bool, records: &[RunRecord]) -> PairSummary {
    if excluded {
        return PairSummary {
            instance: instance.to_string(),
            k,
            excluded,
            runs: 0,
            balanced_runs: 0,
            mean_connectivity: 0.0,
            mean_time: 0.0,
        };
    }
    let conn: Vec<f64> = records.iter().map(|r| r.connectivity as f64).collect();
    let time: Vec<f64> = records.iter().map(|r| r.time_total).collect();
    PairSummary {
        instance: instance.to_string(),
        k,
        excluded,
        runs: records.len(),
        balanced_runs: records.iter().filter(|r| r.balanced).count(),
        mean_connectivity: mean(&conn),
        mean_time: mean(&time),
    }
}
