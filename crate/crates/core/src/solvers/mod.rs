//! Minimizers for [`QuboProblem`] and [`IsingProblem`] instances.
//!
//! Every stochastic solver draws randomness from [`stream_rng`]: a ChaCha8
//! generator seeded with `seed` and switched to stream `index`, where the
//! index names an independent unit of work (a sample, a restart, a
//! decomposition round). Results therefore do not depend on the order in
//! which those units run.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::formulation::{bits_to_spins, ising_to_qubo};
use crate::model::{IsingProblem, QuboProblem, SolveReport, State};

mod anneal;
mod decompose;
mod exhaustive;
mod sparse;
mod tabu;

pub use anneal::{simulated_annealing, Annealer, Cooling, SaSchedule};
pub use decompose::{clamp_subproblem, decompose_solve, Backend, ClampedSubproblem, DecompositionConfig};
pub use exhaustive::{
    brute_force_clustering, brute_force_minimize, count_assignments, ExhaustiveClustering, MAX_BRUTE_FORCE_VARS,
    MAX_PARTITIONS,
};
pub use tabu::{tabu_search, TabuConfig};

/// RNG for work unit `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A problem the solvers can minimize. Solvers work internally on the
/// binary form and report states and energies in the native form.
pub trait Objective: Sync {
    fn n_vars(&self) -> usize;
    /// Exact binary-variable form of the problem.
    fn to_qubo(&self) -> Cow<'_, QuboProblem>;
    /// Native energy of the state whose binary form is `bits`.
    fn energy_of_bits(&self, bits: &[u8]) -> f64;
    fn wrap_state(&self, bits: Vec<u8>) -> State;
}

impl Objective for QuboProblem {
    fn n_vars(&self) -> usize {
        QuboProblem::n_vars(self)
    }

    fn to_qubo(&self) -> Cow<'_, QuboProblem> {
        Cow::Borrowed(self)
    }

    fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        self.energy_unchecked(bits)
    }

    fn wrap_state(&self, bits: Vec<u8>) -> State {
        State::Binary(bits)
    }
}

/// Spin `+1` is bit `1`.
impl Objective for IsingProblem {
    fn n_vars(&self) -> usize {
        IsingProblem::n_vars(self)
    }

    fn to_qubo(&self) -> Cow<'_, QuboProblem> {
        Cow::Owned(ising_to_qubo(self))
    }

    fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        self.energy_unchecked(&bits_to_spins(bits))
    }

    fn wrap_state(&self, bits: Vec<u8>) -> State {
        State::Spin(bits_to_spins(&bits))
    }
}

/// Solver selection with its parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "solver", rename_all = "snake_case"))]
pub enum SolverConfig {
    BruteForce,
    SimulatedAnnealing(SaSchedule),
    Tabu(TabuConfig),
    Decompose(DecompositionConfig),
}

impl SolverConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SolverConfig::BruteForce => "brute_force",
            SolverConfig::SimulatedAnnealing(_) => "simulated_annealing",
            SolverConfig::Tabu(_) => "tabu",
            SolverConfig::Decompose(_) => "decompose",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SolverConfig::BruteForce => 0,
            SolverConfig::SimulatedAnnealing(s) => s.seed,
            SolverConfig::Tabu(t) => t.seed,
            SolverConfig::Decompose(c) => c.seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            SolverConfig::BruteForce => {}
            SolverConfig::SimulatedAnnealing(s) => s.seed = seed,
            SolverConfig::Tabu(t) => t.seed = seed,
            SolverConfig::Decompose(c) => c.seed = seed,
        }
        self
    }
}

/// Dispatches to the configured solver.
pub fn solve<P: Objective + ?Sized>(problem: &P, config: &SolverConfig) -> Result<SolveReport> {
    match config {
        SolverConfig::BruteForce => brute_force_minimize(problem),
        SolverConfig::SimulatedAnnealing(s) => simulated_annealing(problem, s),
        SolverConfig::Tabu(t) => tabu_search(problem, t),
        SolverConfig::Decompose(c) => decompose_solve(problem, c),
    }
}

/// Mixes a base seed with a small index into a new seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
