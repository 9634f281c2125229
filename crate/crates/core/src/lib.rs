//! Clustering posed as QUBO and Ising minimization.
//!
//! The crate builds one-hot and binary clustering formulations from a
//! dissimilarity matrix, minimizes them with exhaustive search, simulated
//! annealing, tabu search or a decomposition scheme, and compares the
//! results with Lloyd's k-means. It is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod baselines;
pub mod datagen;
mod error;
pub mod formulation;
pub mod model;
pub mod pipelines;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{
    canonical_labels, distance_matrix, ising_energy, qubo_energy, ClusterAssignment, Coupling, Dataset, DistanceMatrix,
    IsingProblem, Metric, QuboProblem, SolveReport, State, VarLabel,
};
pub use solvers::{solve, SolverConfig};
