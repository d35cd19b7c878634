//! Forward and partial inverse spectral problems for Sturm-Liouville
//! operators on a star-shaped graph with `m` edges of length `pi`.
//!
//! The forward side computes the numbered spectrum of the graph. The inverse
//! side recovers the potential on edge 1 from the potentials on the other
//! edges and two eigenvalue subsequences, through a Riesz-basis moment
//! problem for the Cauchy data of the transformation operator.

pub mod error;
pub mod graph;
pub mod grid;
pub mod io;
pub mod moments;
pub mod reconstruct;
pub mod roots;
pub mod sl;
pub mod stability;
pub mod weyl;

pub use error::{Error, Result};
pub use grid::{GridFunction, DEFAULT_POINTS};
pub use sl::{solve_edge, solve_edge_batch, BoundarySample, EdgePropagator, EndCondition};
pub use graph::{compute_spectrum, estimate_omega_hat, SpectrumTable, StarGraphProblem};
