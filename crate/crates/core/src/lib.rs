//! Query-driven outlier motif detection in heterogeneous information networks.
//!
//! A query names a small typed pattern, one or more start motifs and two
//! sets of meta paths. Search paths grow a candidate set of pattern
//! instances around the start motifs; symmetric score paths measure how
//! similar each candidate is to a reference set. Candidates with the lowest
//! summed similarity are reported as outliers.

pub mod bench;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod motif;
pub mod oracle;
pub mod pathcount;
pub mod pipeline;
pub mod query;
pub mod scoring;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{EdgeType, HeteroGraph, NodeIdx, NodeType};
