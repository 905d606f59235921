//! Sparse Erdős–Rényi optimization laboratory.
//!
//! Exact solvers for maximum weight matching, λ-diluted minimum matching and
//! (λ-diluted) optimal edge cover; depth-k cavity brackets on Poisson
//! Galton–Watson trees; the edge-cover distribution operator and its
//! matching analogue; and the Monte Carlo harness used to check normal
//! fluctuations of the optimal values.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod cavity;
pub mod clt;
mod error;
pub mod exact;
pub mod gwtree;
pub mod report;
pub mod seed;
pub mod stats;
pub mod vlambda;
pub mod wgraph;

pub use error::{Error, Result};
pub use exact::{Problem, Solution};
pub use gwtree::{RootedTree, TiltedTree};
pub use wgraph::{EdgeEnv, Neighborhood, WeightDist, WeightedGraph};
