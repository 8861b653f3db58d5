//! Graph types shared by every algorithm in the crate.
//!
//! [`CausalDag`] is the ground truth over observed, latent and selection
//! nodes. [`MixedGraph`] holds MAGs and PAGs: a symmetric adjacency with one
//! [`EdgeMark`] at each end of every edge.

mod dag;
mod format;
mod mixed;

pub use dag::{CausalDag, NodeRole};
pub use format::{parse_dag, parse_pag, write_dag, write_pag};
pub use mixed::{graph_equal, EdgeMark, MixedGraph};

/// Positional node index within a graph's node table.
pub type NodeId = usize;
