//! Performance-profile tables from run records.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use mcpart::io::{format_g6, RunRecord};

pub const DEFAULT_TAUS: [f64; 12] = [1.0, 1.01, 1.02, 1.05, 1.1, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0];

/// Relative slack when comparing against `tau * best`.
const TAU_TOLERANCE: f64 = 1e-12;

/// The runs of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRuns {
    pub name: String,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub algorithm: String,
    pub tau: f64,
    /// Fraction of instances with a feasible result within `tau` of the best.
    pub fraction: f64,
    /// Fraction of instances without a feasible result.
    pub infeasible_fraction: f64,
}

/// Seed-mean quality of one (instance, k) pair; `None` when no seed was
/// balanced.
fn aggregate(records: &[RunRecord]) -> BTreeMap<(String, usize), Option<f64>> {
    let mut groups: BTreeMap<(String, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.excluded) {
        groups.entry((r.instance.clone(), r.k)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, runs)| {
            let feasible = runs.iter().any(|r| r.balanced);
            let mean = runs.iter().map(|r| r.connectivity as f64).sum::<f64>() / runs.len() as f64;
            (key, feasible.then_some(mean))
        })
        .collect()
}

/// Profile value of every algorithm at every `tau`. The instance set is the
/// union over algorithms; an algorithm missing an instance counts as
/// infeasible there.
pub fn profile_data(algorithms: &[AlgorithmRuns], taus: &[f64]) -> Vec<ProfilePoint> {
    let quality: Vec<_> = algorithms.iter().map(|a| aggregate(&a.records)).collect();
    let instances: BTreeSet<&(String, usize)> = quality.iter().flat_map(|q| q.keys()).collect();
    let n = instances.len();
    let best: Vec<Option<f64>> = instances
        .iter()
        .map(|key| {
            quality
                .iter()
                .filter_map(|q| q.get(*key).copied().flatten())
                .min_by(f64::total_cmp)
        })
        .collect();

    let mut out = Vec::with_capacity(algorithms.len() * taus.len());
    for (a, q) in algorithms.iter().zip(&quality) {
        let values: Vec<Option<f64>> = instances.iter().map(|key| q.get(*key).copied().flatten()).collect();
        let infeasible = values.iter().filter(|v| v.is_none()).count();
        for &tau in taus {
            let within = values
                .iter()
                .zip(&best)
                .filter(|(v, b)| match (v, b) {
                    (Some(v), Some(b)) => *v <= tau * b * (1.0 + TAU_TOLERANCE),
                    _ => false,
                })
                .count();
            out.push(ProfilePoint {
                algorithm: a.name.clone(),
                tau,
                fraction: if n == 0 { 0.0 } else { within as f64 / n as f64 },
                infeasible_fraction: if n == 0 { 0.0 } else { infeasible as f64 / n as f64 },
            });
        }
    }
    out
}

pub fn write_profile(points: &[ProfilePoint], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "tau", "fraction", "infeasible_fraction"])?;
    for p in points {
        w.write_record([
            p.algorithm.clone(),
            format_g6(p.tau),
            format_g6(p.fraction),
            format_g6(p.infeasible_fraction),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(instance: &str, connectivity: i64, balanced: bool) -> RunRecord {
        RunRecord {
            instance: instance.into(),
            algorithm: String::new(),
            k: 2,
            seed: 0,
            epsilon: 0.03,
            d: 2,
            connectivity,
            max_block_weights: vec![1.0, 1.0],
            balanced,
            time_total: 1.0,
            time_coarsen: 0.0,
            time_initial: 0.0,
            time_refine: 0.0,
            time_rebalance: 0.0,
            rebalance_calls: 0,
            greedy_rounds: 0,
            fallback_calls: 0,
            excluded: false,
        }
    }

    fn value(points: &[ProfilePoint], algorithm: &str, tau: f64) -> (f64, f64) {
        let p = points.iter().find(|p| p.algorithm == algorithm && p.tau == tau).unwrap();
        (p.fraction, p.infeasible_fraction)
    }

    #[test]
    fn a_b_example() {
        let a = AlgorithmRuns {
            name: "A".into(),
            records: vec![run("i1", 10, true), run("i2", 20, true)],
        };
        let b = AlgorithmRuns {
            name: "B".into(),
            records: vec![run("i1", 11, true), run("i2", 5, false)],
        };
        let p = profile_data(&[a, b], &[1.0, 1.1]);
        assert_eq!(value(&p, "A", 1.0), (1.0, 0.0));
        assert_eq!(value(&p, "B", 1.0), (0.0, 0.5));
        assert_eq!(value(&p, "A", 1.1), (1.0, 0.0));
        assert_eq!(value(&p, "B", 1.1), (0.5, 0.5));
    }

    #[test]
    fn single_algorithm_is_always_best() {
        let a = AlgorithmRuns {
            name: "A".into(),
            records: vec![run("i1", 10, true), run("i2", 20, true), run("i3", 1, false)],
        };
        let p = profile_data(&[a], &DEFAULT_TAUS);
        for point in &p {
            assert!((point.fraction - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seed_mean_and_any_balanced() {
        let a = AlgorithmRuns {
            name: "A".into(),
            records: vec![run("i1", 10, false), run("i1", 14, true)],
        };
        let q = aggregate(&a.records);
        assert_eq!(q[&("i1".to_string(), 2)], Some(12.0));
    }
}
