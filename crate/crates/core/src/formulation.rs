//! Clustering as QUBO / Ising problems.
//!
//! Two encodings are provided. The one-hot encoding uses `N·K` binary
//! variables, variable `(i, a)` at flat index `i·K + a` meaning "point `i`
//! is in cluster `a`", with a quadratic penalty `λ (Σ_a q_ia − 1)²` per
//! point. The binary encoding uses one spin per point and is restricted to
//! two clusters, with no constraint at all.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, config, domain, Result};
use crate::model::{ClusterAssignment, Coupling, DistanceMatrix, IsingProblem, QuboProblem, VarLabel};

/// How the one-hot penalty weight is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LambdaMode {
    /// `(N − K)·d̃`, the smallest weight that provably forbids empty rows.
    PaperBound,
    /// `λ = N`; only meaningful on distances scaled into `[0, 1]`.
    #[default]
    PaperPractice,
    /// A caller-chosen weight, which must be positive.
    Explicit(f64),
    /// Any finite weight, zero and negative included. For probing what
    /// happens when the constraint is under-enforced.
    Unchecked(f64),
}

/// Resolved parameters of a one-hot formulation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneHotConfig {
    pub k: usize,
    pub lambda_mode: LambdaMode,
    pub lambda_value: f64,
}

impl OneHotConfig {
    pub fn resolve(d: &DistanceMatrix, k: usize, mode: LambdaMode) -> Result<Self> {
        let lambda_value = resolve_lambda(d, k, mode)?;
        Ok(Self { k, lambda_mode: mode, lambda_value })
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(config(alloc::format!("one-hot clustering needs k >= 2, got {k}")));
    }
    if k + 1 > n {
        return Err(config(alloc::format!("one-hot clustering needs N >= k + 1, got N = {n}, k = {k}")));
    }
    Ok(())
}

/// Penalty weight for the one-hot formulation.
///
/// When every distance is zero the bound `(N − K)·d̃` vanishes; the weight
/// is floored at 1 in that case so the constraint is still enforced.
pub fn resolve_lambda(d: &DistanceMatrix, k: usize, mode: LambdaMode) -> Result<f64> {
    let n = d.len();
    check_k(n, k)?;
    match mode {
        LambdaMode::PaperBound => {
            let bound = (n - k) as f64 * d.max_entry();
            Ok(if bound > 0.0 { bound } else { 1.0 })
        }
        LambdaMode::PaperPractice => {
            let max = d.max_entry();
            if !(d.is_normalized() || max == 0.0) || max > 1.0 {
                return Err(config("lambda = N requires distances normalized to [0, 1]"));
            }
            Ok(n as f64)
        }
        LambdaMode::Explicit(v) => {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(config(alloc::format!("explicit lambda must be positive and finite, got {v}")))
            }
        }
        LambdaMode::Unchecked(v) => {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(config("lambda must be finite"))
            }
        }
    }
}

/// One-hot QUBO whose energy on any valid assignment equals the pairwise
/// within-cluster objective `W(C)`.
///
/// Expanding `½ Σ_ij d_ij Σ_a q_ia q_ja + λ Σ_i (Σ_a q_ia − 1)²` with
/// `q² = q` gives linear `−λ`, `2λ` between two clusters of one point,
/// `d_ij` between two points in one cluster, and offset `N·λ`.
pub fn build_onehot_qubo(d: &DistanceMatrix, cfg: &OneHotConfig) -> Result<QuboProblem> {
    let n = d.len();
    let k = cfg.k;
    check_k(n, k)?;
    let lambda = cfg.lambda_value;
    let n_vars = n * k;
    let mut quadratic = Vec::with_capacity(n * k * (k - 1) / 2 + k * n * (n - 1) / 2);
    for i in 0..n {
        let row = d.row(i);
        for a in 0..k {
            let u = i * k + a;
            for b in (a + 1)..k {
                quadratic.push(Coupling { i: u, j: i * k + b, value: 2.0 * lambda });
            }
            for (j, &dij) in row.iter().enumerate().skip(i + 1) {
                quadratic.push(Coupling { i: u, j: j * k + a, value: dij });
            }
        }
    }
    let labels = (0..n_vars).map(|v| VarLabel { point: v / k, cluster: v % k }).collect();
    QuboProblem::from_sorted(n_vars, vec![-lambda; n_vars], quadratic, n as f64 * lambda).with_var_labels(labels)
}

/// Constraint-free two-cluster Ising problem `Σ_{i<j} d_ij s_i s_j`.
pub fn build_binary_ising(d: &DistanceMatrix) -> Result<IsingProblem> {
    let n = d.len();
    if n < 2 {
        return Err(config("binary clustering needs at least two points"));
    }
    let mut couplings = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for (j, &value) in d.row(i).iter().enumerate().skip(i + 1) {
            couplings.push(Coupling { i, j, value });
        }
    }
    Ok(IsingProblem::from_sorted(n, vec![0.0; n], couplings, 0.0))
}

/// Exact substitution `q = (s + 1)/2`; every constant lands in the offset,
/// so energies agree state for state.
pub fn qubo_to_ising(problem: &QuboProblem) -> IsingProblem {
    let mut h: Vec<f64> = problem.linear().iter().map(|v| 0.5 * v).collect();
    let mut offset = problem.offset() + problem.linear().iter().sum::<f64>() * 0.5;
    let mut j = Vec::with_capacity(problem.quadratic().len());
    for c in problem.quadratic() {
        let quarter = 0.25 * c.value;
        h[c.i] += quarter;
        h[c.j] += quarter;
        offset += quarter;
        j.push(Coupling { value: quarter, ..*c });
    }
    IsingProblem::from_sorted(problem.n_vars(), h, j, offset)
}

/// Exact substitution `s = 2q − 1`, the inverse of [`qubo_to_ising`].
pub fn ising_to_qubo(problem: &IsingProblem) -> QuboProblem {
    let mut linear: Vec<f64> = problem.h().iter().map(|v| 2.0 * v).collect();
    let mut offset = problem.offset() - problem.h().iter().sum::<f64>();
    let mut quadratic = Vec::with_capacity(problem.couplings().len());
    for c in problem.couplings() {
        linear[c.i] -= 2.0 * c.value;
        linear[c.j] -= 2.0 * c.value;
        offset += c.value;
        quadratic.push(Coupling { value: 4.0 * c.value, ..*c });
    }
    QuboProblem::from_sorted(problem.n_vars(), linear, quadratic, offset)
}

/// `q = 1 ↔ s = +1`.
pub fn bits_to_spins(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&q| if q == 1 { 1 } else { -1 }).collect()
}

pub fn spins_to_bits(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| u8::from(s > 0)).collect()
}

/// Whether an `n_bits` integer coefficient range can hold a one-hot
/// instance without losing the penalty's dominance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrecisionReport {
    pub n_bits: u32,
    pub n_points: usize,
    pub k: usize,
    /// `None` for `k ≤ 2`, where the bound does not apply.
    pub d_bound: Option<f64>,
    pub feasible: bool,
    pub max_observed_d: f64,
}

/// For `k > 2`, distances must satisfy `|d| ≤ 2(2^{n−1} − 1) / ((N − K)(K − 2))`.
///
/// Advisory only: the solvers here work in full floating point.
pub fn precision_check(d: &DistanceMatrix, k: usize, n_bits: u32) -> Result<PrecisionReport> {
    if n_bits < 2 || k < 2 {
        return Err(config(alloc::format!("precision check needs n_bits >= 2 and k >= 2 (got {n_bits}, {k})")));
    }
    let n = d.len();
    let max_observed_d = d.max_entry();
    let d_bound = (k > 2).then(|| {
        if n <= k {
            f64::INFINITY
        } else {
            let levels = libm::pow(2.0, f64::from(n_bits - 1)) - 1.0;
            2.0 * levels / ((n - k) as f64 * (k - 2) as f64)
        }
    });
    let feasible = d_bound.is_none_or(|b| max_observed_d <= b);
    Ok(PrecisionReport { n_bits, n_points: n, k, d_bound, feasible, max_observed_d })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ViolationKind {
    NoCluster,
    MultipleClusters,
}

/// A point whose one-hot row does not have exactly one bit set.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstraintViolation {
    pub point_index: usize,
    pub kind: ViolationKind,
    pub clusters_set: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub enum DecodePolicy<'a> {
    /// Refuse to produce an assignment when any row is invalid.
    Strict,
    /// Place violating points greedily by their pairwise cost against the
    /// points already placed.
    Repair(&'a DistanceMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// `None` only under [`DecodePolicy::Strict`] with violations present.
    pub assignment: Option<ClusterAssignment>,
    pub violations: Vec<ConstraintViolation>,
    pub repaired: bool,
}

/// Reads a point-major one-hot state back into cluster labels.
pub fn decode_onehot(state: &[u8], n: usize, k: usize, policy: DecodePolicy<'_>) -> Result<Decoded> {
    check_len(n * k, state.len())?;
    if let DecodePolicy::Repair(d) = policy {
        check_len(n, d.len())?;
    }
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut violations = Vec::new();
    for (i, row) in state.chunks_exact(k).enumerate() {
        let set: Vec<usize> = row.iter().enumerate().filter(|(_, &q)| q == 1).map(|(a, _)| a).collect();
        match set.len() {
            1 => labels[i] = Some(set[0]),
            0 => violations.push(ConstraintViolation {
                point_index: i,
                kind: ViolationKind::NoCluster,
                clusters_set: set,
            }),
            _ => violations.push(ConstraintViolation {
                point_index: i,
                kind: ViolationKind::MultipleClusters,
                clusters_set: set,
            }),
        }
    }
    match policy {
        DecodePolicy::Strict if !violations.is_empty() => Ok(Decoded { assignment: None, violations, repaired: false }),
        DecodePolicy::Strict => {
            let labels = labels.into_iter().map(Option::unwrap).collect();
            Ok(Decoded { assignment: Some(ClusterAssignment::new(labels, k, "onehot")?), violations, repaired: false })
        }
        DecodePolicy::Repair(d) => {
            for v in &violations {
                let candidates: Vec<usize> = match v.kind {
                    ViolationKind::NoCluster => (0..k).collect(),
                    ViolationKind::MultipleClusters => v.clusters_set.clone(),
                };
                let cost = |c: usize| -> f64 {
                    labels
                        .iter()
                        .enumerate()
                        .filter(|(_, l)| **l == Some(c))
                        .map(|(j, _)| d.get(v.point_index, j))
                        .sum()
                };
                let mut best = candidates[0];
                let mut best_cost = cost(best);
                for &c in &candidates[1..] {
                    let cc = cost(c);
                    if cc < best_cost {
                        best = c;
                        best_cost = cc;
                    }
                }
                labels[v.point_index] = Some(best);
            }
            let repaired = !violations.is_empty();
            let labels = labels.into_iter().map(Option::unwrap).collect();
            Ok(Decoded { assignment: Some(ClusterAssignment::new(labels, k, "onehot")?), violations, repaired })
        }
    }
}

/// `s = +1 → 0`, `s = −1 → 1`.
pub fn decode_binary(state: &[i8]) -> Result<ClusterAssignment> {
    let mut labels = Vec::with_capacity(state.len());
    for (i, &s) in state.iter().enumerate() {
        labels.push(match s {
            1 => 0,
            -1 => 1,
            other => return Err(domain(alloc::format!("spin {i} is {other}"))),
        });
    }
    ClusterAssignment::new(labels, 2, "binary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{distance_matrix, Dataset, Metric};

    // Exhaustive minimum over all binary states, independent of the solvers module.
    fn enumerate_min(p: &QuboProblem) -> (f64, Vec<Vec<u8>>) {
        let n = p.n_vars();
        let mut best = f64::INFINITY;
        let mut argmins = Vec::new();
        for m in 0u64..(1 << n) {
            let s: Vec<u8> = (0..n).map(|b| (m >> b & 1) as u8).collect();
            let e = p.energy(&s).unwrap();
            if e < best - 1e-12 {
                best = e;
                argmins.clear();
            }
            if (e - best).abs() <= 1e-12 {
                argmins.push(s);
            }
        }
        (best, argmins)
    }

    fn w_of(d: &DistanceMatrix, labels: &[usize]) -> f64 {
        let mut w = 0.0;
        for i in 0..labels.len() {
            for j in (i + 1)..labels.len() {
                if labels[i] == labels[j] {
                    w += d.get(i, j);
                }
            }
        }
        w
    }

    fn dm(n: usize, f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i * n + j] = f(i.min(j), i.max(j));
                }
            }
        }
        DistanceMatrix::from_dense(n, d, Metric::SquaredEuclidean).unwrap()
    }

    fn lcg_points(seed: u64, n: usize) -> Dataset {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        let pts = (0..n).map(|_| vec![next() * 4.0, next() * 4.0]).collect();
        Dataset::new(pts, None).unwrap()
    }

    #[test]
    fn lambda_modes() {
        let d = dm(10, |_, _| 1.0);
        assert_eq!(resolve_lambda(&d, 2, LambdaMode::PaperBound).unwrap(), 8.0);
        assert!(resolve_lambda(&d, 2, LambdaMode::PaperPractice).is_err());
        let data = lcg_points(1, 200);
        let dn = distance_matrix(&data, Metric::SquaredEuclidean, true);
        assert_eq!(resolve_lambda(&dn, 6, LambdaMode::PaperPractice).unwrap(), 200.0);
        assert!(resolve_lambda(&d, 2, LambdaMode::Explicit(0.0)).is_err());
        assert!(resolve_lambda(&d, 2, LambdaMode::Explicit(-1.0)).is_err());
        assert_eq!(resolve_lambda(&d, 2, LambdaMode::Unchecked(0.0)).unwrap(), 0.0);
        assert!(resolve_lambda(&d, 10, LambdaMode::PaperBound).is_err());
        assert!(resolve_lambda(&d, 1, LambdaMode::PaperBound).is_err());
    }

    #[test]
    fn lambda_floor_on_coincident_points_still_enforces_one_hot() {
        let d = dm(5, |_, _| 0.0);
        let lambda = resolve_lambda(&d, 3, LambdaMode::PaperBound).unwrap();
        assert_eq!(lambda, 1.0);
        let cfg = OneHotConfig { k: 3, lambda_mode: LambdaMode::PaperBound, lambda_value: lambda };
        let p = build_onehot_qubo(&d, &cfg).unwrap();
        let (e, argmins) = enumerate_min(&p);
        assert_eq!(e, 0.0);
        for s in argmins {
            let dec = decode_onehot(&s, 5, 3, DecodePolicy::Strict).unwrap();
            assert!(dec.violations.is_empty());
        }
    }

    #[test]
    fn onehot_expansion_small_case() {
        let d = dm(3, |i, j| (i + j) as f64);
        let cfg = OneHotConfig { k: 2, lambda_mode: LambdaMode::Explicit(2.0), lambda_value: 2.0 };
        let p = build_onehot_qubo(&d, &cfg).unwrap();
        assert_eq!(p.linear(), &[-2.0; 6]);
        assert_eq!(p.offset(), 6.0);
        let mut got: Vec<(usize, usize, f64)> = p.quadratic().iter().map(|c| (c.i, c.j, c.value)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = vec![
            (0, 1, 4.0),
            (0, 2, 1.0),
            (0, 4, 2.0),
            (1, 3, 1.0),
            (1, 5, 2.0),
            (2, 3, 4.0),
            (2, 4, 3.0),
            (3, 5, 3.0),
            (4, 5, 4.0),
        ];
        assert_eq!(got, want);
        assert_eq!(p.var_labels().unwrap()[3], VarLabel { point: 1, cluster: 1 });
    }

    #[test]
    fn onehot_two_points_two_clusters_is_rejected() {
        let d = dm(2, |_, _| 1.0);
        let cfg = OneHotConfig { k: 2, lambda_mode: LambdaMode::Explicit(2.0), lambda_value: 2.0 };
        assert!(matches!(build_onehot_qubo(&d, &cfg), Err(crate::Error::Config(_))));
    }

    #[test]
    fn onehot_rejects_too_many_clusters() {
        let d = dm(3, |_, _| 1.0);
        let cfg = OneHotConfig { k: 3, lambda_mode: LambdaMode::Explicit(1.0), lambda_value: 1.0 };
        assert!(build_onehot_qubo(&d, &cfg).is_err());
    }

    #[test]
    fn onehot_energy_equals_w_on_valid_states() {
        for seed in 0..5 {
            for (n, k) in [(4, 2), (5, 3), (6, 3)] {
                let d = distance_matrix(&lcg_points(seed, n), Metric::SquaredEuclidean, true);
                let cfg = OneHotConfig::resolve(&d, k, LambdaMode::PaperBound).unwrap();
                let p = build_onehot_qubo(&d, &cfg).unwrap();
                // every labelling in [0,k)^n, empty clusters included
                for code in 0..k.pow(n as u32) {
                    let labels: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
                    let mut s = vec![0u8; n * k];
                    for (i, &a) in labels.iter().enumerate() {
                        s[i * k + a] = 1;
                    }
                    assert!((p.energy(&s).unwrap() - w_of(&d, &labels)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn all_zero_distances_ground_states_are_exactly_the_valid_ones() {
        let d = dm(3, |_, _| 0.0);
        let cfg = OneHotConfig { k: 2, lambda_mode: LambdaMode::Explicit(1.0), lambda_value: 1.0 };
        let p = build_onehot_qubo(&d, &cfg).unwrap();
        let (e, argmins) = enumerate_min(&p);
        assert_eq!(e, 0.0);
        assert_eq!(argmins.len(), 8);
        assert!(argmins.iter().all(|s| decode_onehot(s, 3, 2, DecodePolicy::Strict).unwrap().violations.is_empty()));
    }

    #[test]
    fn penalty_bound_forbids_violations_in_ground_states() {
        for seed in 0..20 {
            for n in 4..=6 {
                for k in [2, 3] {
                    let d = distance_matrix(&lcg_points(100 + seed, n), Metric::SquaredEuclidean, true);
                    let cfg = OneHotConfig::resolve(&d, k, LambdaMode::PaperBound).unwrap();
                    let p = build_onehot_qubo(&d, &cfg).unwrap();
                    let (ground, argmins) = enumerate_min(&p);
                    for s in &argmins {
                        let dec = decode_onehot(s, n, k, DecodePolicy::Strict).unwrap();
                        assert!(dec.violations.is_empty(), "seed {seed} n {n} k {k}");
                    }
                    // states with a doubly-assigned point never undercut the ground state
                    for m in 0u64..(1 << (n * k)) {
                        let s: Vec<u8> = (0..n * k).map(|b| (m >> b & 1) as u8).collect();
                        let multi = s.chunks(k).any(|r| r.iter().filter(|&&q| q == 1).count() >= 2);
                        if multi {
                            assert!(p.energy(&s).unwrap() >= ground - 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn binary_ising_examples() {
        let p = build_binary_ising(&dm(2, |_, _| 5.0)).unwrap();
        assert_eq!(p.coupling(0, 1), Some(5.0));
        assert_eq!(p.energy(&[1, -1]).unwrap(), -5.0);
        assert_eq!(p.energy(&[-1, 1]).unwrap(), -5.0);
        assert_eq!(p.energy(&[1, 1]).unwrap(), 5.0);

        let p = build_binary_ising(&dm(3, |_, _| 1.0)).unwrap();
        let min = (0..8u32)
            .map(|m| p.energy(&(0..3).map(|b| if m >> b & 1 == 1 { 1 } else { -1 }).collect::<Vec<i8>>()).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, -1.0);

        let p = build_binary_ising(&dm(4, |_, _| 0.0)).unwrap();
        assert_eq!(p.energy(&[1, -1, -1, 1]).unwrap(), 0.0);
        assert!(build_binary_ising(&dm(1, |_, _| 0.0)).is_err());
    }

    #[test]
    fn qubo_to_ising_examples() {
        let p = QuboProblem::new(1, vec![1.0], [], 0.0).unwrap();
        let s = qubo_to_ising(&p);
        assert_eq!(s.h(), &[0.5]);
        assert_eq!(s.offset(), 0.5);

        let p = QuboProblem::new(2, vec![0.0, 0.0], [(0, 1, 4.0)], 0.0).unwrap();
        let s = qubo_to_ising(&p);
        assert_eq!(s.coupling(0, 1), Some(1.0));
        assert_eq!(s.h(), &[1.0, 1.0]);
        assert_eq!(s.offset(), 1.0);
    }

    #[test]
    fn qubo_ising_round_trip_preserves_energy_exhaustively() {
        let mut x = 7u64;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
            (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let n = 10;
        let linear: Vec<f64> = (0..n).map(|_| next()).collect();
        let mut quad = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                quad.push((i, j, next()));
            }
        }
        let p = QuboProblem::new(n, linear, quad, next()).unwrap();
        let s = qubo_to_ising(&p);
        let back = ising_to_qubo(&s);
        let mut worst: f64 = 0.0;
        for m in 0u64..(1 << n) {
            let q: Vec<u8> = (0..n).map(|b| (m >> b & 1) as u8).collect();
            let eq = p.energy(&q).unwrap();
            worst = worst.max((eq - s.energy(&bits_to_spins(&q)).unwrap()).abs());
            worst = worst.max((eq - back.energy(&q).unwrap()).abs());
        }
        assert!(worst <= 1e-9, "{worst}");
    }

    #[test]
    fn precision_examples() {
        let r = precision_check(&dm(4, |_, _| 1.0), 3, 6).unwrap();
        assert_eq!(r.d_bound, Some(62.0));
        assert!(r.feasible);
        let r = precision_check(&dm(10, |_, _| 6.0), 4, 6).unwrap();
        assert!((r.d_bound.unwrap() - 62.0 / 12.0).abs() < 1e-12);
        assert!(!r.feasible);
        let r = precision_check(&dm(10, |_, _| 1e9), 2, 6).unwrap();
        assert_eq!(r.d_bound, None);
        assert!(r.feasible);
        let r = precision_check(&dm(10, |_, _| 1e9), 5, 2000).unwrap();
        assert!(r.feasible);
        assert!(precision_check(&dm(4, |_, _| 1.0), 3, 1).is_err());
    }

    #[test]
    fn decode_onehot_examples() {
        let dec = decode_onehot(&[1, 0, 0, 1], 2, 2, DecodePolicy::Strict).unwrap();
        assert_eq!(dec.assignment.unwrap().labels(), &[0, 1]);

        let dec = decode_onehot(&[1, 1, 0, 1], 2, 2, DecodePolicy::Strict).unwrap();
        assert!(dec.assignment.is_none());
        assert_eq!(
            dec.violations,
            vec![ConstraintViolation {
                point_index: 0,
                kind: ViolationKind::MultipleClusters,
                clusters_set: vec![0, 1]
            }]
        );

        let dec = decode_onehot(&[0, 0, 1, 0], 2, 2, DecodePolicy::Strict).unwrap();
        assert_eq!(
            dec.violations,
            vec![ConstraintViolation { point_index: 0, kind: ViolationKind::NoCluster, clusters_set: vec![] }]
        );
        assert!(decode_onehot(&[0, 0, 1], 2, 2, DecodePolicy::Strict).is_err());
    }

    #[test]
    fn decode_onehot_repair() {
        // points 0,1 close; 2,3 close
        let d = dm(4, |i, j| if (i < 2) == (j < 2) { 0.1 } else { 1.0 });
        // point 1 unassigned, point 2 in both clusters
        let state = [1, 0, 0, 0, 1, 1, 0, 1];
        let dec = decode_onehot(&state, 4, 2, DecodePolicy::Repair(&d)).unwrap();
        assert!(dec.repaired);
        assert_eq!(dec.violations.len(), 2);
        assert_eq!(dec.assignment.unwrap().labels(), &[0, 0, 1, 1]);

        let dec = decode_onehot(&[1, 0, 0, 1, 0, 1, 0, 1], 4, 2, DecodePolicy::Repair(&d)).unwrap();
        assert!(!dec.repaired);
    }

    #[test]
    fn decode_binary_examples() {
        assert_eq!(decode_binary(&[1, 1, -1]).unwrap().labels(), &[0, 0, 1]);
        let flipped = decode_binary(&[-1, -1, 1]).unwrap();
        assert_eq!(flipped.labels(), &[1, 1, 0]);
        assert!(flipped.same_partition(&decode_binary(&[1, 1, -1]).unwrap()));
        let all = decode_binary(&[1, 1, 1]).unwrap();
        assert_eq!(all.empty_clusters(), vec![1]);
        assert!(decode_binary(&[1, 0]).is_err());
    }
}
