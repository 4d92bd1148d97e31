//! Two-way graph partitioning heuristics for max-cut and min-quotient-cut.
//!
//! The centerpiece is path optimization ([`po`]): a hill climber that flips
//! alternating vertex paths instead of single vertices. Around it sit the
//! baselines it is measured against ([`fm`], [`anneal`]), the initial
//! partitioning generators ([`init`]), the random graph classes used for
//! experiments ([`gen`]), the near-greedy analysis of good partitionings
//! ([`neargreedy`]), and the timed benchmark protocol ([`bench`]).

pub mod algo;
pub mod anneal;
pub mod bench;
pub mod buckets;
pub mod budget;
pub mod error;
pub mod fm;
pub mod format;
pub mod gen;
pub mod graph;
pub mod init;
pub mod neargreedy;
pub mod partition;
pub mod po;
pub mod rng;

pub use algo::{AlgoKind, AlgoSpec};
pub use anneal::{sa_run, SaConfig};
pub use budget::Budget;
pub use error::{Error, Result};
pub use fm::fm_optimize;
pub use gen::{GenSpec, GraphClass};
pub use graph::{Graph, Vertex};
pub use init::InitMethod;
pub use neargreedy::{NgFunction, NgProfile};
pub use partition::{Objective, Partitioning, Quality, Side};
pub use po::{po_optimize, PoConfig};
