//! Harness behind the `mcpart` binary: single-instance commands, benchmark
//! sweeps over seeds and performance-profile tables.

pub mod bench;
pub mod commands;
pub mod profile;

pub use bench::{bench, geometric_mean, is_excluded, BenchConfig, BenchSummary, PairSummary};
pub use commands::{
    evaluate, load_instance, partition, rebalance, EvaluateReport, ExitStatus, RebalanceReport, RebalanceRequest,
};
pub use profile::{profile_data, AlgorithmRuns, ProfilePoint, DEFAULT_TAUS};
