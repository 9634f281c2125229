//! Single-flip Metropolis simulated annealing.

use alloc::vec::Vec;
use core::time::Duration;

use rand::Rng;

use super::sparse::{random_bits, Csr};
use super::{stream_rng, Objective, SolverConfig};
use crate::error::{config, Result};
use crate::model::SolveReport;

/// Probability of accepting a typical uphill move at the first sweep when
/// the initial temperature is chosen automatically.
const INITIAL_UPHILL_ACCEPTANCE: f64 = 0.8;
/// Random states drawn to estimate the typical uphill move.
const TEMPERATURE_PROBES: usize = 16;
/// Stream reserved for the temperature estimate; samples use `0..samples`.
const PROBE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Cooling {
    /// Constant ratio between successive sweeps, fixed by the end points.
    #[default]
    Geometric,
    Linear,
}

/// Annealing schedule. Temperatures left as `None` are estimated from the
/// problem; the report echoes the values actually used.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaSchedule {
    pub t_initial: Option<f64>,
    /// Defaults to `1e-3 · t_initial`.
    pub t_final: Option<f64>,
    pub sweeps: usize,
    pub cooling: Cooling,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self { t_initial: None, t_final: None, sweeps: 1000, cooling: Cooling::Geometric, samples: 1000, seed: 0 }
    }
}

impl SaSchedule {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.sweeps = sweeps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.samples == 0 {
            return Err(config("annealing needs at least one sweep and one sample"));
        }
        for t in [self.t_initial, self.t_final].into_iter().flatten() {
            if !(t.is_finite() && t > 0.0) {
                return Err(config(alloc::format!("temperatures must be positive, got {t}")));
            }
        }
        if let (Some(hi), Some(lo)) = (self.t_initial, self.t_final) {
            if hi < lo {
                return Err(config("t_initial must be >= t_final"));
            }
        }
        Ok(())
    }

    /// Temperature at each sweep.
    pub fn temperatures(&self, t_initial: f64, t_final: f64) -> Vec<f64> {
        let n = self.sweeps;
        if n == 1 {
            return alloc::vec![t_initial];
        }
        let last = (n - 1) as f64;
        match self.cooling {
            Cooling::Geometric => {
                let ratio = libm::pow(t_final / t_initial, 1.0 / last);
                let mut t = t_initial;
                (0..n)
                    .map(|_| {
                        let cur = t;
                        t *= ratio;
                        cur
                    })
                    .collect()
            }
            Cooling::Linear => (0..n).map(|s| t_initial + (t_final - t_initial) * s as f64 / last).collect(),
        }
    }
}

/// Temperature at which a mean uphill single flip of random states is
/// accepted with probability [`INITIAL_UPHILL_ACCEPTANCE`].
fn estimate_initial_temperature(csr: &Csr, seed: u64) -> f64 {
    let n = csr.n();
    let mut rng = stream_rng(seed, PROBE_STREAM);
    let (mut sum, mut count) = (0.0, 0usize);
    for _ in 0..TEMPERATURE_PROBES {
        let x = random_bits(&mut rng, n);
        let f = csr.fields(&x);
        for i in 0..n {
            let d = Csr::delta(&x, &f, i);
            if d > 0.0 {
                sum += d;
                count += 1;
            }
        }
    }
    if count == 0 {
        return 1.0;
    }
    let mean = sum / count as f64;
    mean / -libm::log(INITIAL_UPHILL_ACCEPTANCE)
}

/// A prepared annealing run. Chains are independent, so callers may run
/// [`Annealer::run_chain`] in any order or in parallel and then hand the
/// results to [`Annealer::finish`].
pub struct Annealer<'a, P: ?Sized> {
    problem: &'a P,
    csr: Csr,
    temps: Vec<f64>,
    schedule: SaSchedule,
}

impl<'a, P: Objective + ?Sized> Annealer<'a, P> {
    pub fn new(problem: &'a P, schedule: &SaSchedule) -> Result<Self> {
        schedule.validate()?;
        let csr = Csr::from_qubo(&problem.to_qubo());
        let t_initial = match schedule.t_initial {
            Some(t) => t,
            None => {
                let est = estimate_initial_temperature(&csr, schedule.seed);
                schedule.t_final.map_or(est, |lo| est.max(lo))
            }
        };
        let t_final = schedule.t_final.unwrap_or(t_initial * 1e-3);
        let resolved = SaSchedule { t_initial: Some(t_initial), t_final: Some(t_final), ..schedule.clone() };
        let temps = resolved.temperatures(t_initial, t_final);
        Ok(Self { problem, csr, temps, schedule: resolved })
    }

    /// The schedule with automatic temperatures filled in.
    pub fn schedule(&self) -> &SaSchedule {
        &self.schedule
    }

    /// Runs chain `sample` and returns its lowest-energy state with that
    /// state's exact native energy.
    pub fn run_chain(&self, sample: usize) -> (Vec<u8>, f64) {
        let n = self.csr.n();
        let mut rng = stream_rng(self.schedule.seed, sample as u64);
        let mut x = random_bits(&mut rng, n);
        let mut f = self.csr.fields(&x);
        let mut e = self.csr.energy(&x);
        let mut best = x.clone();
        let mut best_e = e;
        for &t in &self.temps {
            let beta = 1.0 / t;
            for i in 0..n {
                let delta = Csr::delta(&x, &f, i);
                if delta <= 0.0 || rng.random::<f64>() < libm::exp(-delta * beta) {
                    e += delta;
                    self.csr.flip(&mut x, &mut f, i);
                }
            }
            if e < best_e {
                best_e = e;
                best.copy_from_slice(&x);
            }
        }
        let exact = self.problem.energy_of_bits(&best);
        (best, exact)
    }

    /// Picks the lowest chain (earliest on ties) and builds the report.
    pub fn finish(&self, chains: Vec<(Vec<u8>, f64)>) -> SolveReport {
        let sample_energies: Vec<f64> = chains.iter().map(|c| c.1).collect();
        let mut best_idx = 0;
        for (i, &e) in sample_energies.iter().enumerate() {
            if e < sample_energies[best_idx] {
                best_idx = i;
            }
        }
        let (best_state, best_energy) = chains.into_iter().nth(best_idx).expect("at least one sample");
        SolveReport {
            best_state: self.problem.wrap_state(best_state),
            best_energy,
            sample_energies,
            elapsed: Duration::ZERO,
            config: SolverConfig::SimulatedAnnealing(self.schedule.clone()),
            seed: self.schedule.seed,
        }
    }
}

/// Best of `schedule.samples` independent annealing chains.
///
/// Each chain starts from a uniformly random state and performs
/// `schedule.sweeps` sequential sweeps; a flip with energy change `ΔE`
/// is accepted with probability `min(1, exp(−ΔE/T))`.
pub fn simulated_annealing<P: Objective + ?Sized>(problem: &P, schedule: &SaSchedule) -> Result<SolveReport> {
    let annealer = Annealer::new(problem, schedule)?;
    let chains = (0..schedule.samples).map(|s| annealer.run_chain(s)).collect();
    Ok(annealer.finish(chains))
}
