//! Timed and multi-threaded solving.
//!
//! Annealing chains are spread over a rayon pool. Each chain owns its RNG
//! stream, so the report does not depend on the thread count.

use std::time::Instant;

use rayon::prelude::*;

use qclust_core::solvers::{solve, Annealer, Objective};
use qclust_core::{SolveReport, SolverConfig};

/// Solves with `config`, running annealing chains in parallel, and records
/// the wall time in `elapsed`.
pub fn solve_timed<P: Objective + ?Sized>(problem: &P, config: &SolverConfig) -> qclust_core::Result<SolveReport> {
    let start = Instant::now();
    let mut report = match config {
        SolverConfig::SimulatedAnnealing(schedule) => {
            let annealer = Annealer::new(problem, schedule)?;
            let chains = (0..schedule.samples).into_par_iter().map(|s| annealer.run_chain(s)).collect();
            annealer.finish(chains)
        }
        other => solve(problem, other)?,
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Runs `f` on a pool of `threads` workers (`0` lets rayon decide).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qclust_core::solvers::{simulated_annealing, SaSchedule};
    use qclust_core::QuboProblem;

    #[test]
    fn parallel_annealing_matches_sequential() {
        let p = QuboProblem::new(
            6,
            vec![-1.0, 2.0, -0.5, 0.3, -2.0, 1.0],
            [(0, 1, 1.5), (2, 3, -2.0), (1, 5, 0.7), (4, 5, -1.1)],
            0.25,
        )
        .unwrap();
        let schedule = SaSchedule { sweeps: 40, samples: 16, seed: 4, ..Default::default() };
        let seq = simulated_annealing(&p, &schedule).unwrap();
        for threads in [1, 3] {
            let par =
                with_threads(threads, || solve_timed(&p, &SolverConfig::SimulatedAnnealing(schedule.clone())).unwrap());
            assert!(par.same_outcome(&seq));
        }
    }
}
