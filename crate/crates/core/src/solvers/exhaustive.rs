//! Exhaustive ground truth: full state enumeration and full partition enumeration.

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::sparse::Csr;
use super::{Objective, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{ClusterAssignment, DistanceMatrix, SolveReport};

/// Largest variable count [`brute_force_minimize`] accepts.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

/// Largest partition count [`brute_force_clustering`] accepts.
pub const MAX_PARTITIONS: u64 = 10_000_000;

/// Exact minimum over all `2^n` states.
///
/// States are visited in Gray-code order with incremental energy updates.
/// Any state within round-off of the incumbent is re-evaluated exactly;
/// exact ties go to the lexicographically smallest state.
pub fn brute_force_minimize<P: Objective + ?Sized>(problem: &P) -> Result<SolveReport> {
    let n = problem.n_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::SizeLimit(alloc::format!("brute force over {n} variables (limit {MAX_BRUTE_FORCE_VARS})")));
    }
    let qubo = problem.to_qubo();
    let csr = Csr::from_qubo(&qubo);
    let mut x = vec![0u8; n];
    let mut f = csr.fields(&x);
    let mut e = csr.offset;
    let mut best = x.clone();
    let mut best_exact = problem.energy_of_bits(&x);
    let mut best_approx = e;
    for t in 1u64..(1u64 << n) {
        let i = t.trailing_zeros() as usize;
        e += Csr::delta(&x, &f, i);
        csr.flip(&mut x, &mut f, i);
        let tol = 1e-9 * best_approx.abs().max(1.0);
        if e <= best_approx + tol {
            let exact = problem.energy_of_bits(&x);
            let tie = 1e-12 * best_exact.abs().max(1.0);
            if exact < best_exact - tie || (exact <= best_exact + tie && x < best) {
                best.copy_from_slice(&x);
                best_exact = exact;
                best_approx = e.min(best_approx);
            }
        }
    }
    Ok(SolveReport {
        best_state: problem.wrap_state(best),
        best_energy: best_exact,
        sample_energies: vec![best_exact],
        elapsed: Duration::ZERO,
        config: SolverConfig::BruteForce,
        seed: 0,
    })
}

/// Number of ways to partition `n` labelled points into exactly `k`
/// non-empty clusters, `(1/k!) Σ_{i=1}^{k} (−1)^{k−i} C(k,i) i^n`,
/// in exact integer arithmetic.
pub fn count_assignments(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::Domain(alloc::format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one(); // C(k, i), updated incrementally
    for i in 1..=k {
        binom = binom * BigInt::from(k - i + 1) / BigInt::from(i);
        let term = &binom * BigInt::from(i).pow(n as u32);
        if (k - i) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let factorial: BigInt = (1..=k).map(BigInt::from).product();
    let quotient = sum / factorial;
    Ok(quotient.to_biguint().expect("partition count is non-negative"))
}

/// Result of enumerating every partition into exactly `k` clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveClustering {
    pub assignment: ClusterAssignment,
    pub w: f64,
    /// Partitions examined; always equals [`count_assignments`].
    pub examined: u64,
}

/// Globally optimal `k`-clustering under the pairwise objective.
///
/// Partitions are enumerated as restricted growth strings (point 0 in
/// cluster 0, each later point in an existing cluster or the next new one).
/// Ties keep the first partition in that order.
pub fn brute_force_clustering(d: &DistanceMatrix, k: usize) -> Result<ExhaustiveClustering> {
    let n = d.len();
    let count = count_assignments(n, k)?;
    if count > BigUint::from(MAX_PARTITIONS) {
        return Err(Error::SizeLimit(alloc::format!("S({n},{k}) = {count} partitions exceeds {MAX_PARTITIONS}")));
    }
    let mut search =
        PartitionSearch { d, k, labels: vec![0; n], best_labels: vec![0; n], best_w: f64::INFINITY, examined: 0 };
    search.descend(1, 1, 0.0);
    debug_assert_eq!(Some(search.examined), count.to_u64());
    Ok(ExhaustiveClustering {
        assignment: ClusterAssignment::new(search.best_labels, k, "brute_force")?,
        w: search.best_w,
        examined: search.examined,
    })
}

struct PartitionSearch<'a> {
    d: &'a DistanceMatrix,
    k: usize,
    labels: Vec<usize>,
    best_labels: Vec<usize>,
    best_w: f64,
    examined: u64,
}

impl PartitionSearch<'_> {
    fn descend(&mut self, i: usize, used: usize, w: f64) {
        let n = self.labels.len();
        if i == n {
            if used == self.k {
                self.examined += 1;
                if w < self.best_w {
                    self.best_w = w;
                    self.best_labels.copy_from_slice(&self.labels);
                }
            }
            return;
        }
        // every remaining cluster still needs a point
        let must_open = self.k - used == n - i;
        let row = self.d.row(i);
        if !must_open {
            for b in 0..used {
                let added: f64 = (0..i).filter(|&j| self.labels[j] == b).map(|j| row[j]).sum();
                self.labels[i] = b;
                self.descend(i + 1, used, w + added);
            }
        }
        if used < self.k {
            self.labels[i] = used;
            self.descend(i + 1, used + 1, w);
        }
    }
}
