//! Split-and-stitch solver for QUBOs too large for a single backend call.
//!
//! The solver keeps a full incumbent state. Each round it ranks variable
//! groups by how cheaply they could be flipped, takes the next window of
//! that ranking as a sub-problem with every other variable clamped to the
//! incumbent, solves the sub-problem with the backend, and writes the
//! result back when the full energy does not increase.

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use rand::Rng;

use super::exhaustive::{brute_force_minimize, MAX_BRUTE_FORCE_VARS};
use super::sparse::{random_bits, Csr};
use super::tabu::tabu_from;
use super::{stream_rng, Objective, SaSchedule, SolverConfig, TabuConfig};
use crate::error::{check_len, config, Result};
use crate::model::{Coupling, QuboProblem, SolveReport};

/// Sub-problem solver.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Backend {
    /// Starts from the incumbent's sub-state.
    Tabu(TabuConfig),
    SimulatedAnnealing(SaSchedule),
    BruteForce,
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Tabu(TabuConfig { max_iterations: 2_000, stall_limit: 200, ..TabuConfig::default() })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecompositionConfig {
    pub subqubo_size: usize,
    /// Rounds; each round solves one sub-problem.
    pub nrepeat: usize,
    pub backend: Backend,
    /// Variables are selected in contiguous blocks of this size. For a
    /// point-major one-hot QUBO, set it to `K` so each point moves as a unit.
    pub group_size: usize,
    pub seed: u64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self { subqubo_size: 48, nrepeat: 50, backend: Backend::default(), group_size: 1, seed: 0 }
    }
}

impl DecompositionConfig {
    fn validate(&self) -> Result<()> {
        if self.subqubo_size < 2 {
            return Err(config("subqubo_size must be at least 2"));
        }
        if self.nrepeat == 0 {
            return Err(config("nrepeat must be at least 1"));
        }
        if self.group_size == 0 || self.group_size > self.subqubo_size {
            return Err(config("group_size must lie in [1, subqubo_size]"));
        }
        if self.backend == Backend::BruteForce && self.subqubo_size > MAX_BRUTE_FORCE_VARS {
            return Err(config(alloc::format!(
                "brute-force backend limited to {MAX_BRUTE_FORCE_VARS} variables, subqubo_size is {}",
                self.subqubo_size
            )));
        }
        Ok(())
    }
}

/// A sub-QUBO over `vars` with the remaining variables clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampedSubproblem {
    /// Full-problem indices, ascending; sub-variable `a` is `vars[a]`.
    pub vars: Vec<usize>,
    /// Its energy equals the full energy of the incumbent with the
    /// sub-variables replaced.
    pub problem: QuboProblem,
}

fn clamp_with(csr: &Csr, state: &[u8], full_energy: f64, vars: &[usize]) -> ClampedSubproblem {
    let n = csr.n();
    let mut local = vec![usize::MAX; n];
    for (a, &v) in vars.iter().enumerate() {
        local[v] = a;
    }
    let m = vars.len();
    let mut linear = Vec::with_capacity(m);
    let mut quadratic = Vec::new();
    for (a, &v) in vars.iter().enumerate() {
        let mut lin = csr.linear[v];
        for (j, w) in csr.neighbors(v) {
            let b = local[j];
            if b == usize::MAX {
                if state[j] == 1 {
                    lin += w;
                }
            } else if b > a {
                quadratic.push(Coupling { i: a, j: b, value: w });
            }
        }
        linear.push(lin);
    }
    quadratic.sort_by_key(|c| (c.i, c.j));
    // offset = full energy minus the part that depends on the sub-variables
    let mut inside = 0.0;
    for (a, &v) in vars.iter().enumerate() {
        if state[v] == 1 {
            inside += linear[a];
        }
    }
    for c in &quadratic {
        if state[vars[c.i]] == 1 && state[vars[c.j]] == 1 {
            inside += c.value;
        }
    }
    let problem = QuboProblem::from_sorted(m, linear, quadratic, full_energy - inside);
    ClampedSubproblem { vars: vars.to_vec(), problem }
}

/// Clamps every variable outside `vars` to its value in `state`.
pub fn clamp_subproblem(problem: &QuboProblem, state: &[u8], vars: &[usize]) -> Result<ClampedSubproblem> {
    check_len(problem.n_vars(), state.len())?;
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.last().is_some_and(|&v| v >= problem.n_vars()) {
        return Err(config("sub-problem variable out of range"));
    }
    let full = problem.energy(state)?;
    Ok(clamp_with(&Csr::from_qubo(problem), state, full, &sorted))
}

/// Variables of the round-`round` window over the impact ranking.
fn select_window(csr: &Csr, x: &[u8], f: &[f64], cfg: &DecompositionConfig, round: usize) -> Vec<usize> {
    let n = csr.n();
    let g = cfg.group_size;
    let n_groups = n.div_ceil(g);
    let mut impact: Vec<(f64, usize)> = (0..n_groups)
        .map(|grp| {
            let lo = grp * g;
            let hi = (lo + g).min(n);
            let best = (lo..hi).map(|i| Csr::delta(x, f, i)).fold(f64::INFINITY, f64::min);
            (best, grp)
        })
        .collect();
    impact.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let per_window = (cfg.subqubo_size / g).max(1).min(n_groups);
    let start = (round * per_window) % n_groups;
    let mut vars: Vec<usize> = (0..per_window)
        .flat_map(|k| {
            let grp = impact[(start + k) % n_groups].1;
            (grp * g)..((grp + 1) * g).min(n)
        })
        .collect();
    vars.sort_unstable();
    vars
}

fn solve_sub(sub: &ClampedSubproblem, incumbent: &[u8], backend: &Backend, seed: u64) -> Result<Vec<u8>> {
    let start: Vec<u8> = sub.vars.iter().map(|&v| incumbent[v]).collect();
    Ok(match backend {
        Backend::Tabu(t) => {
            let csr = Csr::from_qubo(&sub.problem);
            tabu_from(&csr, start, &t.clone().with_seed(seed)).0
        }
        Backend::SimulatedAnnealing(s) => {
            let r = super::simulated_annealing(&sub.problem, &s.clone().with_seed(seed))?;
            r.best_state.as_binary().expect("QUBO state").to_vec()
        }
        Backend::BruteForce => brute_force_minimize(&sub.problem)?.best_state.as_binary().expect("QUBO state").to_vec(),
    })
}

/// Decomposition solve. `sample_energies[r]` is the incumbent energy after
/// round `r`, so the sequence never increases.
///
/// The incumbent starts from a tabu search of the whole problem (stream 0);
/// round `r` draws from stream `r + 1`, which makes a run with more rounds
/// an extension of a run with fewer.
pub fn decompose_solve<P: Objective + ?Sized>(problem: &P, cfg: &DecompositionConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let qubo = problem.to_qubo();
    let csr = Csr::from_qubo(&qubo);
    let n = csr.n();

    let mut rng = stream_rng(cfg.seed, 0);
    let start = random_bits(&mut rng, n);
    let warm =
        TabuConfig { tenure: None, max_iterations: (10 * n).max(10_000), stall_limit: n.max(1_000), seed: cfg.seed };
    let (mut x, _) = tabu_from(&csr, start, &warm);
    let mut energy = problem.energy_of_bits(&x);
    let mut sample_energies = Vec::with_capacity(cfg.nrepeat);

    for round in 0..cfg.nrepeat {
        let mut round_rng = stream_rng(cfg.seed, round as u64 + 1);
        let f = csr.fields(&x);
        let vars = select_window(&csr, &x, &f, cfg, round);
        let sub = clamp_with(&csr, &x, csr.energy(&x), &vars);
        let sub_state = solve_sub(&sub, &x, &cfg.backend, round_rng.random())?;
        let mut candidate = x.clone();
        for (&v, &b) in sub.vars.iter().zip(&sub_state) {
            candidate[v] = b;
        }
        let cand_energy = problem.energy_of_bits(&candidate);
        if cand_energy <= energy {
            x = candidate;
            energy = cand_energy;
        }
        sample_energies.push(energy);
    }

    Ok(SolveReport {
        best_state: problem.wrap_state(x),
        best_energy: energy,
        sample_energies,
        elapsed: Duration::ZERO,
        config: SolverConfig::Decompose(cfg.clone()),
        seed: cfg.seed,
    })
}
