//! Single-flip tabu search with aspiration.

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use super::sparse::{random_bits, Csr};
use super::{stream_rng, Objective, SolverConfig};
use crate::error::{config, Result};
use crate::model::SolveReport;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TabuConfig {
    /// Steps a flipped variable stays tabu. `None` picks `n/4` clamped to
    /// `[1, 20]`. Never more than `n − 1`, so some move is always allowed.
    pub tenure: Option<usize>,
    pub max_iterations: usize,
    /// Consecutive steps without a new best before stopping.
    pub stall_limit: usize,
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self { tenure: None, max_iterations: 10_000, stall_limit: 1_000, seed: 0 }
    }
}

impl TabuConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.tenure == Some(0) {
            return Err(config("tabu tenure must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(config("tabu search needs max_iterations >= 1"));
        }
        Ok(())
    }

    pub(crate) fn effective_tenure(&self, n: usize) -> usize {
        let t = self.tenure.unwrap_or((n / 4).clamp(1, 20));
        t.min(n.saturating_sub(1))
    }
}

/// Runs tabu search from `x` in place; returns the best state and its
/// energy as tracked incrementally.
pub(crate) fn tabu_from(csr: &Csr, mut x: Vec<u8>, cfg: &TabuConfig) -> (Vec<u8>, f64) {
    let n = csr.n();
    let tenure = cfg.effective_tenure(n);
    let mut f = csr.fields(&x);
    let mut e = csr.energy(&x);
    let mut best = x.clone();
    let mut best_e = e;
    if n == 0 {
        return (best, best_e);
    }
    let mut tabu_until = vec![0usize; n];
    let mut stall = 0usize;
    for iter in 1..=cfg.max_iterations {
        let mut choice: Option<(usize, f64)> = None;
        for i in 0..n {
            let d = Csr::delta(&x, &f, i);
            let allowed = tabu_until[i] < iter || e + d < best_e - 1e-12;
            if allowed && choice.is_none_or(|(_, cd)| d < cd) {
                choice = Some((i, d));
            }
        }
        let Some((i, d)) = choice else { break };
        e += d;
        csr.flip(&mut x, &mut f, i);
        tabu_until[i] = iter + tenure;
        if e < best_e - 1e-12 {
            best_e = e;
            best.copy_from_slice(&x);
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.stall_limit {
                break;
            }
        }
    }
    (best, best_e)
}

/// Steepest-descent single-flip search from a random start. A variable
/// flipped at step `t` may not flip again before step `t + tenure` unless
/// doing so beats the best energy seen.
pub fn tabu_search<P: Objective + ?Sized>(problem: &P, cfg: &TabuConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let csr = Csr::from_qubo(&problem.to_qubo());
    let mut rng = stream_rng(cfg.seed, 0);
    let start = random_bits(&mut rng, csr.n());
    let (best, _) = tabu_from(&csr, start, cfg);
    let energy = problem.energy_of_bits(&best);
    let resolved = TabuConfig { tenure: Some(cfg.effective_tenure(csr.n()).max(1)), ..cfg.clone() };
    Ok(SolveReport {
        best_state: problem.wrap_state(best),
        best_energy: energy,
        sample_energies: vec![energy],
        elapsed: Duration::ZERO,
        config: SolverConfig::Tabu(resolved),
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IsingProblem, QuboProblem, State};

    #[test]
    fn one_variable_problems() {
        for lin in [-1.0, 2.0] {
            let p = QuboProblem::new(1, vec![lin], [], 0.0).unwrap();
            let r = tabu_search(&p, &TabuConfig::default()).unwrap();
            assert_eq!(r.best_energy, lin.min(0.0));
        }
    }

    #[test]
    fn all_zero_problem_stops_on_stall() {
        let p = QuboProblem::new(6, vec![0.0; 6], [], -2.0).unwrap();
        let r = tabu_search(&p, &TabuConfig { stall_limit: 5, ..Default::default() }).unwrap();
        assert_eq!(r.best_energy, -2.0);
    }

    #[test]
    fn ising_ground_state() {
        let p = IsingProblem::new(3, vec![0.0; 3], [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)], 0.0).unwrap();
        let r = tabu_search(&p, &TabuConfig::default()).unwrap();
        assert_eq!(r.best_energy, -1.0);
        assert!(matches!(r.best_state, State::Spin(_)));
    }

    #[test]
    fn tenure_is_capped() {
        let cfg = TabuConfig { tenure: Some(50), ..Default::default() };
        assert_eq!(cfg.effective_tenure(12), 11);
        assert_eq!(TabuConfig::default().effective_tenure(12), 3);
        assert_eq!(TabuConfig::default().effective_tenure(1), 0);
        assert!(tabu_search(
            &QuboProblem::new(1, vec![0.0], [], 0.0).unwrap(),
            &TabuConfig { tenure: Some(0), ..Default::default() }
        )
        .is_err());
    }
}
