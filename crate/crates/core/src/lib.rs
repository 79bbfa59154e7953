//! Manifold clustering by Schatten p-norm maximization.
//!
//! The clustering objective is
//!
//! ```text
//! min_G  tr(Gᵀ D G) − α ‖G‖ₛₚᵖ     s.t. G one-hot (G ≥ 0, G1 = 1)
//! ```
//!
//! where `D` is a pairwise distance matrix built by one of the kernels in
//! [`distance`] and `G` is the label indicator matrix. The solver linearizes
//! the Schatten term at the current labels (its gradient comes from a thin
//! SVD, see [`schatten`]) and sweeps rows, moving each sample to the cluster
//! minimizing the linearized objective.
//!
//! The crate is `no_std` + `alloc`. The `std` feature links the standard
//! library and `parallel` adds row-parallel distance construction via rayon.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baseline;
pub mod data;
pub mod datasets;
pub mod distance;
mod error;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod schatten;
pub mod solver;

pub use data::{DataMatrix, LabelVector};
pub use distance::{DistanceKernel, DistanceMatrix};
pub use error::{Error, Result};
pub use metrics::MetricReport;
pub use solver::{Assignment, InitStrategy, SolveTrace, SolverConfig};
