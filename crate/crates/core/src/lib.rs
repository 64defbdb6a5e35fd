//! Two-page book embedding (subhamiltonicity) decision by dynamic
//! programming over SPQR-trees and sphere-cut decompositions, with
//! brute-force oracles and feedback-edge kernels.

pub mod dp;
pub mod error;
pub mod gen;
pub mod graph;
pub mod kernel;
pub mod oracle;
pub mod planarity;
pub mod spherecut;
pub mod spqr;
pub mod types;

pub use error::{Error, GraphError, Result};
pub use graph::{EdgeId, MultiGraph, VertexId};
