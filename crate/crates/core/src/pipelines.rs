//! End-to-end clustering flows built from the formulation and solver layers.
//!
//! All pipelines measure dissimilarity with [`Metric::SquaredEuclidean`] and
//! hand the solvers distances scaled into `[0, 1]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, Error, Result};
use crate::formulation::{build_binary_ising, build_onehot_qubo, decode_binary, decode_onehot, ConstraintViolation};
use crate::formulation::{DecodePolicy, LambdaMode, OneHotConfig};
use crate::model::{distance_matrix, ClusterAssignment, Dataset, DistanceMatrix, Metric, SolveReport};
use crate::solvers::{derive_seed, solve, Objective, SolverConfig};

/// Solver entry point used by the `*_with` pipeline variants, so callers
/// can substitute a timed or multi-threaded runner.
pub type SolveFn<'a> = &'a (dyn Fn(&dyn Objective, &SolverConfig) -> Result<SolveReport> + Sync);

fn default_solve(p: &dyn Objective, c: &SolverConfig) -> Result<SolveReport> {
    solve(p, c)
}

/// Result of [`cluster_onehot`].
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotOutcome {
    /// `None` when the best state breaks the one-hot constraint.
    pub assignment: Option<ClusterAssignment>,
    pub report: SolveReport,
    pub violations: Vec<ConstraintViolation>,
    pub lambda: f64,
}

/// One-hot QUBO clustering into `k` clusters with strict decoding.
///
/// A decomposition solver left at `group_size = 1` is switched to
/// `group_size = k`, so each sub-problem moves whole points.
pub fn cluster_onehot(
    data: &Dataset,
    k: usize,
    solver: &SolverConfig,
    lambda_mode: LambdaMode,
) -> Result<OneHotOutcome> {
    let d = distance_matrix(data, Metric::SquaredEuclidean, true);
    cluster_onehot_with(&d, k, solver, lambda_mode, &default_solve)
}

/// [`cluster_onehot`] on a precomputed dissimilarity matrix.
pub fn cluster_onehot_with(
    d: &DistanceMatrix,
    k: usize,
    solver: &SolverConfig,
    lambda_mode: LambdaMode,
    run: SolveFn<'_>,
) -> Result<OneHotOutcome> {
    let cfg = OneHotConfig::resolve(d, k, lambda_mode)?;
    let qubo = build_onehot_qubo(d, &cfg)?;
    let solver = match solver {
        SolverConfig::Decompose(c) if c.group_size == 1 => {
            SolverConfig::Decompose(crate::solvers::DecompositionConfig { group_size: k, ..c.clone() })
        }
        other => other.clone(),
    };
    let report = run(&qubo, &solver)?;
    let bits = report.best_state.as_binary().expect("QUBO solvers return binary states");
    let decoded = decode_onehot(bits, d.len(), k, DecodePolicy::Strict)?;
    Ok(OneHotOutcome {
        assignment: decoded.assignment,
        report,
        violations: decoded.violations,
        lambda: cfg.lambda_value,
    })
}

/// Two-cluster Ising clustering. Spin `+1` is cluster 0.
pub fn cluster_binary(data: &Dataset, solver: &SolverConfig) -> Result<(ClusterAssignment, SolveReport)> {
    let d = distance_matrix(data, Metric::SquaredEuclidean, true);
    cluster_binary_with(&d, solver, &default_solve)
}

/// [`cluster_binary`] on a precomputed dissimilarity matrix.
pub fn cluster_binary_with(
    d: &DistanceMatrix,
    solver: &SolverConfig,
    run: SolveFn<'_>,
) -> Result<(ClusterAssignment, SolveReport)> {
    let ising = build_binary_ising(d)?;
    let report = run(&ising, solver)?;
    let spins = report.best_state.as_spin().expect("Ising solvers return spin states");
    let assignment = decode_binary(spins)?;
    Ok((assignment, report))
}

/// Which cluster the divisive scheme splits next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SplitSelection {
    /// Most members.
    LargestCluster,
    /// Largest within-cluster pair sum.
    #[default]
    LargestWContribution,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HierarchyConfig {
    pub target_k: usize,
    pub split_selection: SplitSelection,
    /// Binary solver for each split; its seed is replaced per attempt by
    /// `derive_seed(seed, attempt)`.
    pub solver: SolverConfig,
    pub seed: u64,
}

/// One executed split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    /// Cluster that was split; it keeps the `+1` side.
    pub cluster: usize,
    /// Label given to the `−1` side.
    pub new_cluster: usize,
    /// Points in the cluster before the split.
    pub members: usize,
    /// Largest entry of the sub-matrix before it was rescaled to `[0, 1]`.
    pub scale: f64,
    /// Candidates tried before this one produced a non-empty split.
    pub skipped: Vec<usize>,
    pub report: SolveReport,
    /// Labels of every point right after this split.
    pub labels_after: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyOutcome {
    pub assignment: ClusterAssignment,
    pub history: Vec<SplitRecord>,
}

/// Divisive clustering by repeated binary splits, starting from a single
/// cluster and stopping at `target_k` clusters.
pub fn cluster_hierarchical(data: &Dataset, cfg: &HierarchyConfig) -> Result<HierarchyOutcome> {
    let d = distance_matrix(data, Metric::SquaredEuclidean, true);
    cluster_hierarchical_with(&d, cfg, &default_solve)
}

/// [`cluster_hierarchical`] on a precomputed dissimilarity matrix.
pub fn cluster_hierarchical_with(
    d: &DistanceMatrix,
    cfg: &HierarchyConfig,
    run: SolveFn<'_>,
) -> Result<HierarchyOutcome> {
    let n = d.len();
    if cfg.target_k < 2 || cfg.target_k > n {
        return Err(config(format!(
            "hierarchical clustering needs 2 <= target_k <= N, got {} with N = {n}",
            cfg.target_k
        )));
    }
    let mut labels = vec![0usize; n];
    let mut n_clusters = 1;
    let mut history = Vec::with_capacity(cfg.target_k - 1);
    let mut attempt = 0u64;
    while n_clusters < cfg.target_k {
        let mut skipped = Vec::new();
        let mut done = false;
        for c in split_order(d, &labels, n_clusters, cfg.split_selection) {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            let sub = d.submatrix(&members);
            let scale = sub.max_entry();
            let solver = cfg.solver.clone().with_seed(derive_seed(cfg.seed, attempt));
            attempt += 1;
            let (split, report) = cluster_binary_with(&sub.normalize(), &solver, run)?;
            let moved = split.labels().iter().filter(|&&l| l == 1).count();
            if moved == 0 || moved == members.len() {
                skipped.push(c);
                continue;
            }
            for (&i, &side) in members.iter().zip(split.labels()) {
                if side == 1 {
                    labels[i] = n_clusters;
                }
            }
            history.push(SplitRecord {
                cluster: c,
                new_cluster: n_clusters,
                members: members.len(),
                scale,
                skipped,
                report,
                labels_after: labels.clone(),
            });
            n_clusters += 1;
            done = true;
            break;
        }
        if !done {
            return Err(Error::Degenerate {
                reason: format!("no cluster could be split after reaching {n_clusters} of {} clusters", cfg.target_k),
                partial_labels: labels,
            });
        }
    }
    let assignment = ClusterAssignment::new(labels, cfg.target_k, "hierarchical")?;
    Ok(HierarchyOutcome { assignment, history })
}

/// Clusters with at least two members, best candidate first, ties broken
/// by lower index.
fn split_order(d: &DistanceMatrix, labels: &[usize], n_clusters: usize, rule: SplitSelection) -> Vec<usize> {
    let mut size = vec![0usize; n_clusters];
    let mut w = vec![0.0f64; n_clusters];
    for i in 0..labels.len() {
        size[labels[i]] += 1;
        if rule == SplitSelection::LargestWContribution {
            for j in i + 1..labels.len() {
                if labels[i] == labels[j] {
                    w[labels[i]] += d.get(i, j);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n_clusters).filter(|&c| size[c] >= 2).collect();
    match rule {
        SplitSelection::LargestCluster => order.sort_by(|&a, &b| size[b].cmp(&size[a]).then(a.cmp(&b))),
        SplitSelection::LargestWContribution => order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b))),
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::objective_w;
    use crate::datagen::{gaussian_blobs, pedagogical_instance, BlobSpec};
    use crate::formulation::ViolationKind;
    use crate::solvers::{brute_force_clustering, SaSchedule};

    fn toy() -> Dataset {
        Dataset::new(
            vec![vec![0.0, 0.0], vec![0.3, 0.1], vec![0.1, 0.4], vec![5.0, 5.0], vec![5.2, 4.9], vec![4.8, 5.3]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn onehot_brute_force_matches_partition_oracle() {
        let data = toy();
        let out = cluster_onehot(&data, 2, &SolverConfig::BruteForce, LambdaMode::PaperPractice).unwrap();
        assert!(out.violations.is_empty());
        let d = distance_matrix(&data, Metric::SquaredEuclidean, true);
        let oracle = brute_force_clustering(&d, 2).unwrap();
        let got = out.assignment.unwrap();
        assert!(got.same_partition(&oracle.assignment));
        assert!((out.report.best_energy - oracle.w).abs() < 1e-9);
    }

    #[test]
    fn onehot_zero_lambda_empties_every_row() {
        let data = toy();
        let out = cluster_onehot(&data, 2, &SolverConfig::BruteForce, LambdaMode::Unchecked(0.0)).unwrap();
        assert!(out.assignment.is_none());
        assert_eq!(out.report.best_state.as_binary().unwrap(), &[0u8; 12]);
        assert_eq!(out.violations.len(), 6);
        assert!(out.violations.iter().all(|v| v.kind == ViolationKind::NoCluster));
    }

    #[test]
    fn onehot_sa_with_light_penalty_recovers_pedagogical_groups() {
        let (data, _) = pedagogical_instance();
        let sa = SolverConfig::SimulatedAnnealing(SaSchedule::default().with_samples(20).with_seed(1));
        let out = cluster_onehot(&data, 4, &sa, LambdaMode::Explicit(1.0)).unwrap();
        let truth = ClusterAssignment::new(data.true_labels().unwrap().to_vec(), 4, "truth").unwrap();
        assert!(out.assignment.unwrap().same_partition(&truth));
    }

    #[test]
    fn binary_groups_separated_pairs() {
        let data = Dataset::new(vec![vec![0.0], vec![0.1], vec![9.0], vec![9.2]], None).unwrap();
        let (a, r) = cluster_binary(&data, &SolverConfig::BruteForce).unwrap();
        assert_eq!(a.canonical_labels(), vec![0, 0, 1, 1]);
        let d = distance_matrix(&data, Metric::SquaredEuclidean, true);
        // H = Σ_{i<j} d_ij s_i s_j = 2W − Σ_{i<j} d_ij
        let total: f64 = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| d.get(i, j)).sum();
        let w = objective_w(&d, &a).unwrap();
        assert!((r.best_energy - (2.0 * w - total)).abs() < 1e-12);
    }

    #[test]
    fn binary_all_duplicates_has_zero_energy() {
        let data = Dataset::new(vec![vec![1.0, 1.0]; 5], None).unwrap();
        let (_, r) = cluster_binary(&data, &SolverConfig::BruteForce).unwrap();
        assert_eq!(r.best_energy, 0.0);
    }

    fn hier(k: usize, solver: SolverConfig) -> HierarchyConfig {
        HierarchyConfig { target_k: k, split_selection: SplitSelection::default(), solver, seed: 9 }
    }

    #[test]
    fn hierarchical_two_is_one_binary_split() {
        let data = toy();
        let h = cluster_hierarchical(&data, &hier(2, SolverConfig::BruteForce)).unwrap();
        let (b, _) = cluster_binary(&data, &SolverConfig::BruteForce).unwrap();
        assert!(h.assignment.same_partition(&b));
        assert_eq!(h.history.len(), 1);
    }

    #[test]
    fn hierarchical_to_singletons() {
        let data = toy();
        let h = cluster_hierarchical(&data, &hier(6, SolverConfig::BruteForce)).unwrap();
        let d = distance_matrix(&data, Metric::SquaredEuclidean, false);
        assert_eq!(objective_w(&d, &h.assignment).unwrap(), 0.0);
        assert_eq!(h.assignment.cluster_sizes(), vec![1; 6]);
    }

    #[test]
    fn hierarchical_recovers_blobs() {
        let spec = BlobSpec { std: 0.3, allow_overlap: false, ..BlobSpec::new(24, 4, 2) };
        let data = gaussian_blobs(&spec).unwrap();
        let sa = SolverConfig::SimulatedAnnealing(SaSchedule::default().with_samples(20));
        for rule in [SplitSelection::LargestCluster, SplitSelection::LargestWContribution] {
            let cfg = HierarchyConfig { split_selection: rule, ..hier(4, sa.clone()) };
            let h = cluster_hierarchical(&data, &cfg).unwrap();
            let truth = ClusterAssignment::new(data.true_labels().unwrap().to_vec(), 4, "truth").unwrap();
            assert!(h.assignment.same_partition(&truth));
        }
    }

    #[test]
    fn hierarchical_degenerate_on_duplicates() {
        let data = Dataset::new(vec![vec![0.0], vec![0.0], vec![0.0]], None).unwrap();
        let err = cluster_hierarchical(&data, &hier(3, SolverConfig::BruteForce)).unwrap_err();
        match err {
            Error::Degenerate { partial_labels, .. } => assert_eq!(partial_labels.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hierarchical_rejects_bad_target() {
        let data = toy();
        assert!(cluster_hierarchical(&data, &hier(1, SolverConfig::BruteForce)).is_err());
        assert!(cluster_hierarchical(&data, &hier(7, SolverConfig::BruteForce)).is_err());
    }
}
