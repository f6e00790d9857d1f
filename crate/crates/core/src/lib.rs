//! Online hypergraph containers: a single-pass prune/build machine with
//! strong and weak degree thresholds, iterated container chains, and two
//! applications (solution-free sets of linear systems, Sidon sets) backed by
//! brute-force oracles at desk scale.

pub mod engine;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod iterate;
pub mod lineq;
pub mod prng;
pub mod report;
pub mod scalar;
pub mod set;
pub mod sidon;
pub mod verify;

pub use error::{Error, Result};
pub use hypergraph::{CodegreeBreakdown, Hypergraph, SparsityInfo};
pub use scalar::{Real, Scalar};
pub use set::{Vertex, VertexSet};
