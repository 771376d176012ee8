//! Multi-constraint hypergraph partitioning.
//!
//! Vertices carry `d`-dimensional weights and every block must stay within
//! `1 + eps` of the average block weight in every dimension, while the
//! (lambda - 1) connectivity of the hyperedges is minimized. The central piece is
//! the [`rebalance`] module, which restores balance with greedy L1^u moves
//! and a fallback for internally imbalanced blocks; [`multilevel`] embeds it
//! in a coarsen / initial-partition / refine pipeline.

pub mod error;
pub mod generate;
pub mod hypergraph;
pub mod io;
pub mod multilevel;
pub mod objective;
pub mod oracle;
pub mod partition;
pub mod rebalance;

pub use error::{Error, Result};
pub use hypergraph::{BlockId, EdgeId, EdgeWeight, Hypergraph, VertexId};
pub use objective::{GainPair, ImbalanceBound};
pub use partition::{NormalizationContext, PartitionState};
