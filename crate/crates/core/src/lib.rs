//! Interpolation of graph signals from sparse samples.
//!
//! The pipeline detects overlapping communities seeded by the interpolation
//! nodes ([`community`]), fits a local graph basis function interpolant on
//! every community ([`kernel`], [`pum`]) and blends the local fits with a
//! partition of unity.

pub mod cli;
pub mod community;
pub mod dense;
pub mod error;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod metrics;
pub mod numerics;
pub mod pum;
pub mod sampling;

pub use community::{detect_communities, Community, Cover, DetectionParams};
pub use dense::DenseSymMatrix;
pub use error::{Error, Result};
pub use graph::{load_graph, Graph, VertexId, VertexSet};
pub use kernel::{gbf_kernel, KernelParams};
pub use metrics::{katz_centrality, modularity, CommunityAssignment, KatzMode, KatzParams};
pub use numerics::{spd_solve, sym_eigen, EigenDecomposition};
pub use pum::{global_gbf_baseline, run_pipeline, PumResult, Signal};
