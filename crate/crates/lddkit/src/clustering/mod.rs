//! Terminal clustering with delays: red/blue splitting, the bit-phase loop,
//! padded partitions, sparse covers and edge cutting.

pub mod edgecut;
pub mod padded;
pub mod rbsplit;
pub mod steroids;

use thiserror::Error;

pub use edgecut::{edge_cutting, EdgeCut};
pub use padded::{padded_partition, sparse_cover, Cover, PaddedPartition};
pub use rbsplit::{rb_split, RbInput, RbOutput};
pub use steroids::{steroids, Cluster, SteroidsInput, TerminalClustering};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("no terminal reaches the alive nodes")]
    NoTerminals,
    #[error("ruling precondition fails at node {node}")]
    Ruling { node: usize },
    #[error("randomized splitting needs an explicit recursion depth")]
    MissingDepth,
    #[error("phase {phase}: {msg}")]
    Invariant { phase: u32, msg: String },
    #[error("node weights overflow after {rounds} rounds")]
    WeightOverflow { rounds: u32 },
    #[error("{0}")]
    Precondition(String),
}
