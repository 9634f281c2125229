//! Problem and solution types shared by every formulation and solver.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::error::{check_len, domain, Error, Result};
use crate::solvers::SolverConfig;

/// `N` points in `p` dimensions, stored row-major, plus optional generator labels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    dims: usize,
    coords: Vec<f64>,
    true_labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from one coordinate vector per point.
    pub fn new(points: Vec<Vec<f64>>, true_labels: Option<Vec<usize>>) -> Result<Self> {
        let dims = points.first().map(Vec::len).unwrap_or(0);
        let mut coords = Vec::with_capacity(points.len() * dims);
        for p in &points {
            check_len(dims, p.len())?;
            coords.extend_from_slice(p);
        }
        Self::from_flat(dims, coords, true_labels)
    }

    /// Builds a dataset from row-major coordinates.
    pub fn from_flat(dims: usize, coords: Vec<f64>, true_labels: Option<Vec<usize>>) -> Result<Self> {
        if dims == 0 || coords.is_empty() {
            return Err(domain("a dataset needs at least one point with at least one coordinate"));
        }
        if coords.len() % dims != 0 {
            return Err(Error::Dimension { expected: (coords.len() / dims + 1) * dims, actual: coords.len() });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(domain(alloc::format!(
                "non-finite coordinate at point {}, dimension {}",
                pos / dims,
                pos % dims
            )));
        }
        if let Some(labels) = &true_labels {
            check_len(coords.len() / dims, labels.len())?;
        }
        Ok(Self { dims, coords, true_labels })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dims
    }

    /// Always false: a dataset holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dims..(i + 1) * self.dims]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dims)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn true_labels(&self) -> Option<&[usize]> {
        self.true_labels.as_deref()
    }

    /// The points at `indices`, in that order. Labels follow the points.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dims);
        for &i in indices {
            if i >= self.len() {
                return Err(domain(alloc::format!("point index {i} out of range")));
            }
            coords.extend_from_slice(self.point(i));
        }
        let labels = self.true_labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect());
        Self::from_flat(self.dims, coords, labels)
    }
}

/// Pairwise dissimilarity used to build a [`DistanceMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    Euclidean,
    /// Makes the pairwise objective comparable with centroid inertia.
    #[default]
    SquaredEuclidean,
}

impl Metric {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        match self {
            Metric::Euclidean => libm::sqrt(sq),
            Metric::SquaredEuclidean => sq,
        }
    }
}

/// Symmetric, zero-diagonal matrix of pairwise dissimilarities.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
    metric: Metric,
    normalized: bool,
    d_max: f64,
}

impl DistanceMatrix {
    /// Wraps a dense row-major `n × n` matrix after checking symmetry,
    /// the zero diagonal and non-negativity.
    pub fn from_dense(n: usize, d: Vec<f64>, metric: Metric) -> Result<Self> {
        check_len(n * n, d.len())?;
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(domain(alloc::format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(domain(alloc::format!("invalid distance {v} at ({i},{j})")));
                }
                if v != d[j * n + i] {
                    return Err(domain(alloc::format!("asymmetric entry at ({i},{j})")));
                }
            }
        }
        let d_max = d.iter().copied().fold(0.0, f64::max);
        Ok(Self { n, d, metric, normalized: false, d_max })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Largest pairwise dissimilarity before any normalization.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Largest entry currently stored (1 after normalization unless all are 0).
    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Divides every entry by the largest one. A matrix of all zeros is
    /// returned unchanged and stays flagged as not normalized.
    pub fn normalize(mut self) -> Self {
        let m = self.max_entry();
        if m > 0.0 && !self.normalized {
            for v in &mut self.d {
                *v /= m;
            }
            self.normalized = true;
            self.d_max = m;
        }
        self
    }

    /// Restriction to the rows and columns in `indices`, un-normalized
    /// relative to `self` (entries keep their current scale).
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut d = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                d[a * m + b] = self.get(i, j);
            }
        }
        let d_max = d.iter().copied().fold(0.0, f64::max);
        Self { n: m, d, metric: self.metric, normalized: false, d_max }
    }
}

/// Pairwise dissimilarities of `data` under `metric`, optionally scaled into `[0, 1]`.
pub fn distance_matrix(data: &Dataset, metric: Metric, normalize: bool) -> DistanceMatrix {
    let n = data.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let pi = data.point(i);
        for j in (i + 1)..n {
            let v = metric.eval(pi, data.point(j));
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let d_max = d.iter().copied().fold(0.0, f64::max);
    let dm = DistanceMatrix { n, d, metric, normalized: false, d_max };
    if normalize {
        dm.normalize()
    } else {
        dm
    }
}

/// One stored off-diagonal coefficient, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Sorts terms by `(i, j)` and merges duplicates. Diagonal terms are
/// returned separately so the caller can fold them by variable domain.
fn canonical_terms(
    n_vars: usize,
    terms: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Result<(Vec<Coupling>, Vec<(usize, f64)>)> {
    let mut off = Vec::new();
    let mut diag = Vec::new();
    for (a, b, value) in terms {
        if a >= n_vars || b >= n_vars {
            return Err(domain(alloc::format!("coupling ({a},{b}) outside {n_vars} variables")));
        }
        if !value.is_finite() {
            return Err(domain(alloc::format!("non-finite coupling at ({a},{b})")));
        }
        if a == b {
            diag.push((a, value));
        } else {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            off.push(Coupling { i, j, value });
        }
    }
    off.sort_by_key(|c| (c.i, c.j));
    let mut merged: Vec<Coupling> = Vec::with_capacity(off.len());
    for c in off {
        match merged.last_mut() {
            Some(last) if last.i == c.i && last.j == c.j => last.value += c.value,
            _ => merged.push(c),
        }
    }
    Ok((merged, diag))
}

fn lookup(couplings: &[Coupling], i: usize, j: usize) -> Option<f64> {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    couplings.binary_search_by_key(&(i, j), |c| (c.i, c.j)).ok().map(|k| couplings[k].value)
}

fn check_coefficients(n_vars: usize, linear: &[f64], offset: f64) -> Result<()> {
    check_len(n_vars, linear.len())?;
    if linear.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
        return Err(domain("non-finite coefficient"));
    }
    Ok(())
}

/// Which `(point, cluster)` pair a one-hot variable encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarLabel {
    pub point: usize,
    pub cluster: usize,
}

/// Quadratic energy over binary variables `q ∈ {0,1}` with a constant offset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuboProblem {
    n_vars: usize,
    linear: Vec<f64>,
    quadratic: Vec<Coupling>,
    offset: f64,
    var_labels: Option<Vec<VarLabel>>,
}

impl QuboProblem {
    /// Diagonal entries in `quadratic` are folded into `linear` (`q² = q`).
    pub fn new(
        n_vars: usize,
        mut linear: Vec<f64>,
        quadratic: impl IntoIterator<Item = (usize, usize, f64)>,
        offset: f64,
    ) -> Result<Self> {
        check_coefficients(n_vars, &linear, offset)?;
        let (quadratic, diag) = canonical_terms(n_vars, quadratic)?;
        for (i, v) in diag {
            linear[i] += v;
        }
        Ok(Self { n_vars, linear, quadratic, offset, var_labels: None })
    }

    /// Takes already sorted, duplicate-free upper-triangular couplings.
    pub(crate) fn from_sorted(n_vars: usize, linear: Vec<f64>, quadratic: Vec<Coupling>, offset: f64) -> Self {
        debug_assert!(quadratic.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        debug_assert!(quadratic.iter().all(|c| c.i < c.j && c.j < n_vars));
        Self { n_vars, linear, quadratic, offset, var_labels: None }
    }

    pub fn with_var_labels(mut self, labels: Vec<VarLabel>) -> Result<Self> {
        check_len(self.n_vars, labels.len())?;
        self.var_labels = Some(labels);
        Ok(self)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[Coupling] {
        &self.quadratic
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<f64> {
        lookup(&self.quadratic, i, j)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn var_labels(&self) -> Option<&[VarLabel]> {
        self.var_labels.as_deref()
    }

    /// `offset + Σ linear·q + Σ quadratic·q·q`.
    pub fn energy(&self, state: &[u8]) -> Result<f64> {
        check_len(self.n_vars, state.len())?;
        if let Some(i) = state.iter().position(|&q| q > 1) {
            return Err(domain(alloc::format!("state entry {i} is {} (expected 0 or 1)", state[i])));
        }
        Ok(self.energy_unchecked(state))
    }

    pub(crate) fn energy_unchecked(&self, state: &[u8]) -> f64 {
        let mut e = self.offset;
        for (h, &q) in self.linear.iter().zip(state) {
            if q == 1 {
                e += h;
            }
        }
        for c in &self.quadratic {
            if state[c.i] == 1 && state[c.j] == 1 {
                e += c.value;
            }
        }
        e
    }

    /// Every coefficient and the offset multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.linear.iter_mut().for_each(|v| *v *= factor);
        out.quadratic.iter_mut().for_each(|c| c.value *= factor);
        out.offset *= factor;
        out
    }
}

/// Quadratic energy over spins `s ∈ {−1,+1}` with a constant offset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsingProblem {
    n_vars: usize,
    h: Vec<f64>,
    j: Vec<Coupling>,
    offset: f64,
}

impl IsingProblem {
    /// Diagonal couplings are folded into the offset (`s² = 1`).
    pub fn new(
        n_vars: usize,
        h: Vec<f64>,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
        mut offset: f64,
    ) -> Result<Self> {
        check_coefficients(n_vars, &h, offset)?;
        let (j, diag) = canonical_terms(n_vars, couplings)?;
        for (_, v) in diag {
            offset += v;
        }
        Ok(Self { n_vars, h, j, offset })
    }

    pub(crate) fn from_sorted(n_vars: usize, h: Vec<f64>, j: Vec<Coupling>, offset: f64) -> Self {
        debug_assert!(j.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        Self { n_vars, h, j, offset }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.j
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<f64> {
        lookup(&self.j, i, j)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `offset + Σ h·s + Σ J·s·s`.
    pub fn energy(&self, state: &[i8]) -> Result<f64> {
        check_len(self.n_vars, state.len())?;
        if let Some(i) = state.iter().position(|&s| s != 1 && s != -1) {
            return Err(domain(alloc::format!("spin {i} is {} (expected -1 or +1)", state[i])));
        }
        Ok(self.energy_unchecked(state))
    }

    pub(crate) fn energy_unchecked(&self, state: &[i8]) -> f64 {
        let mut e = self.offset;
        for (h, &s) in self.h.iter().zip(state) {
            e += h * f64::from(s);
        }
        for c in &self.j {
            e += c.value * f64::from(state[c.i] * state[c.j]);
        }
        e
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.h.iter_mut().for_each(|v| *v *= factor);
        out.j.iter_mut().for_each(|c| c.value *= factor);
        out.offset *= factor;
        out
    }
}

/// Energy of a binary state under a QUBO.
pub fn qubo_energy(problem: &QuboProblem, state: &[u8]) -> Result<f64> {
    problem.energy(state)
}

/// Energy of a spin state under an Ising problem.
pub fn ising_energy(problem: &IsingProblem, state: &[i8]) -> Result<f64> {
    problem.energy(state)
}

/// Point-to-cluster map. Labels lie in `[0, k)`; clusters may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
    source: String,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, k: usize, source: impl Into<String>) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(domain(alloc::format!("label {bad} outside [0, {k})")));
        }
        Ok(Self { labels, k, source: source.into() })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Name of the solver or baseline that produced the assignment.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Cluster indices in `[0, k)` that no point uses.
    pub fn empty_clusters(&self) -> Vec<usize> {
        self.cluster_sizes().iter().enumerate().filter(|(_, &s)| s == 0).map(|(a, _)| a).collect()
    }

    /// Labels renumbered by first appearance, so equal partitions compare equal.
    pub fn canonical_labels(&self) -> Vec<usize> {
        canonical_labels(&self.labels)
    }

    pub fn same_partition(&self, other: &ClusterAssignment) -> bool {
        self.canonical_labels() == other.canonical_labels()
    }
}

pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(from, _)| *from == l) {
            Some(&(_, to)) => to,
            None => {
                let to = map.len();
                map.push((l, to));
                to
            }
        })
        .collect()
}

/// A solver state: binary for QUBOs, spins for Ising problems.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum State {
    Binary(Vec<u8>),
    Spin(Vec<i8>),
}

impl State {
    pub fn len(&self) -> usize {
        match self {
            State::Binary(v) => v.len(),
            State::Spin(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_binary(&self) -> Option<&[u8]> {
        match self {
            State::Binary(v) => Some(v),
            State::Spin(_) => None,
        }
    }

    pub fn as_spin(&self) -> Option<&[i8]> {
        match self {
            State::Spin(v) => Some(v),
            State::Binary(_) => None,
        }
    }
}

/// Outcome of one solver invocation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub best_state: State,
    pub best_energy: f64,
    /// One entry per sample, restart or decomposition round.
    pub sample_energies: Vec<f64>,
    /// Wall time. The core crate has no clock and leaves this at zero;
    /// std callers fill it in.
    pub elapsed: Duration,
    /// Solver parameters as actually used (auto values resolved).
    pub config: SolverConfig,
    pub seed: u64,
}

impl SolveReport {
    /// Equality on everything except the wall time.
    pub fn same_outcome(&self, other: &SolveReport) -> bool {
        self.best_state == other.best_state
            && self.best_energy.to_bits() == other.best_energy.to_bits()
            && self.sample_energies.len() == other.sample_energies.len()
            && self.sample_energies.iter().zip(&other.sample_energies).all(|(a, b)| a.to_bits() == b.to_bits())
            && self.config == other.config
            && self.seed == other.seed
    }
}
