//! Exact treewidth for graphs of bounded treewidth.
//!
//! The crate combines a typical-sequence dynamic program over nice tree
//! decompositions with a matching/contraction self-reduction, plus small
//! exponential oracles used for cross-checking.

pub mod bkdp;
pub mod cli;
pub mod error;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod reduction;
pub mod treedec;
pub mod typseq;

pub use error::{Error, Result};
pub use graph::{Graph, Vertex};
pub use treedec::{NiceTreeDecomposition, TreeDecomposition};
