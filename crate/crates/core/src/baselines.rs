//! k-means baseline and the two quality metrics used to compare clusterings.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{check_len, config, Result};
use crate::model::{ClusterAssignment, Dataset, DistanceMatrix};
use crate::solvers::stream_rng;

/// Pairwise objective `W(C)`: the sum of `d(x_i, x_j)` over unordered
/// pairs in the same cluster (half the ordered double sum).
pub fn objective_w(d: &DistanceMatrix, assignment: &ClusterAssignment) -> Result<f64> {
    check_len(d.len(), assignment.len())?;
    let labels = assignment.labels();
    let mut w = 0.0;
    for i in 0..labels.len() {
        let row = d.row(i);
        for j in (i + 1)..labels.len() {
            if labels[i] == labels[j] {
                w += row[j];
            }
        }
    }
    Ok(w)
}

/// Cluster means, one row per cluster; empty clusters get `None`.
pub fn cluster_means(data: &Dataset, assignment: &ClusterAssignment) -> Result<Vec<Option<Vec<f64>>>> {
    check_len(data.len(), assignment.len())?;
    let p = data.dims();
    let mut sums = vec![vec![0.0; p]; assignment.k()];
    let mut counts = vec![0usize; assignment.k()];
    for (x, &l) in data.points().zip(assignment.labels()) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(x) {
            *s += v;
        }
    }
    Ok(sums
        .into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s.into_iter().map(|v| v / c as f64).collect()))
        .collect())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum of squared distances from each point to its cluster mean.
/// Empty clusters contribute nothing.
pub fn inertia(data: &Dataset, assignment: &ClusterAssignment) -> Result<f64> {
    let means = cluster_means(data, assignment)?;
    Ok(data.points().zip(assignment.labels()).map(|(x, &l)| sq_dist(x, means[l].as_ref().expect("non-empty"))).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitMethod {
    /// `k` distinct data points drawn uniformly.
    Random,
    /// D² sampling.
    #[default]
    KMeansPlusPlus,
    /// Centroids supplied by the caller.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KMeansConfig {
    pub k: usize,
    pub init: InitMethod,
    pub n_init: usize,
    pub max_iterations: usize,
    /// Stop once one iteration improves inertia by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self { k, init: InitMethod::KMeansPlusPlus, n_init: 10, max_iterations: 300, tol: 1e-4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    /// `k × p`; the mean of each cluster (a reseeded point for a cluster
    /// left empty when the iteration limit hit).
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations_run: usize,
    pub init_used: InitMethod,
    /// Inertia after every iteration of the returned run.
    pub inertia_history: Vec<f64>,
}

fn check_k(data: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > data.len() {
        return Err(config(alloc::format!("k-means needs 1 <= k <= N, got k = {k}, N = {}", data.len())));
    }
    Ok(())
}

fn nearest(x: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (a, c) in centroids.iter().enumerate() {
        let d = sq_dist(x, c);
        if d < best_d {
            best = a;
            best_d = d;
        }
    }
    best
}

fn lloyd(
    data: &Dataset,
    mut centroids: Vec<Vec<f64>>,
    max_iterations: usize,
    tol: f64,
    init: InitMethod,
) -> Result<KMeansResult> {
    let k = centroids.len();
    let n = data.len();
    let mut labels = vec![0usize; n];
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    let mut iterations_run = 0;
    for _ in 0..max_iterations {
        iterations_run += 1;
        for (l, x) in labels.iter_mut().zip(data.points()) {
            *l = nearest(x, &centroids);
        }
        let assignment = ClusterAssignment::new(labels.clone(), k, "kmeans")?;
        let means = cluster_means(data, &assignment)?;
        let sizes = assignment.cluster_sizes();
        for (c, m) in centroids.iter_mut().zip(&means) {
            if let Some(m) = m {
                c.clone_from(m);
            }
        }
        let dist: Vec<f64> = data.points().zip(&labels).map(|(x, &l)| sq_dist(x, &centroids[l])).collect();
        let current: f64 = dist.iter().sum();
        history.push(current);

        // move each empty centroid onto the point farthest from its own
        // centroid, taken from a cluster that keeps at least one point
        let mut reseeded = false;
        let mut taken = vec![false; n];
        let mut remaining = sizes.clone();
        for a in (0..k).filter(|&a| sizes[a] == 0) {
            let far =
                (0..n).filter(|&i| !taken[i] && remaining[labels[i]] >= 2).fold(
                    None,
                    |acc: Option<usize>, i| match acc {
                        Some(j) if dist[j] >= dist[i] => Some(j),
                        _ => Some(i),
                    },
                );
            if let Some(i) = far {
                taken[i] = true;
                remaining[labels[i]] -= 1;
                centroids[a] = data.point(i).to_vec();
                reseeded = true;
            }
        }
        if !reseeded && prev - current < tol {
            break;
        }
        prev = current;
    }
    let inertia = *history.last().expect("at least one iteration");
    Ok(KMeansResult {
        assignment: ClusterAssignment::new(labels, k, "kmeans")?,
        centroids,
        inertia,
        iterations_run,
        init_used: init,
        inertia_history: history,
    })
}

fn init_random(data: &Dataset, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    rand::seq::index::sample(rng, data.len(), k).iter().map(|i| data.point(i).to_vec()).collect()
}

fn init_plus_plus(data: &Dataset, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = data.len();
    let first = rng.random_range(0..n);
    let mut centroids = vec![data.point(first).to_vec()];
    let mut d2: Vec<f64> = data.points().map(|x| sq_dist(x, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            // guard against round-off landing on a zero-weight point
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|&w| w > 0.0).expect("positive total");
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = data.point(pick).to_vec();
        for (w, x) in d2.iter_mut().zip(data.points()) {
            *w = w.min(sq_dist(x, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn validate(data: &Dataset, cfg: &KMeansConfig) -> Result<()> {
    check_k(data, cfg.k)?;
    if cfg.n_init == 0 || cfg.max_iterations == 0 {
        return Err(config("k-means needs n_init >= 1 and max_iterations >= 1"));
    }
    if cfg.init == InitMethod::Explicit {
        return Err(config("explicit centroids go through kmeans_with_explicit_init"));
    }
    Ok(())
}

/// Lloyd run number `run` of a batch, initialized from RNG stream `run`.
pub fn kmeans_run(data: &Dataset, cfg: &KMeansConfig, run: usize) -> Result<KMeansResult> {
    validate(data, cfg)?;
    let mut rng = stream_rng(cfg.seed, run as u64);
    let init = match cfg.init {
        InitMethod::Random => init_random(data, cfg.k, &mut rng),
        _ => init_plus_plus(data, cfg.k, &mut rng),
    };
    lloyd(data, init, cfg.max_iterations, cfg.tol, cfg.init)
}

/// Best of `n_init` Lloyd runs by final inertia (earliest run on ties).
pub fn kmeans(data: &Dataset, cfg: &KMeansConfig) -> Result<KMeansResult> {
    validate(data, cfg)?;
    let mut best: Option<KMeansResult> = None;
    for run in 0..cfg.n_init {
        let r = kmeans_run(data, cfg, run)?;
        if best.as_ref().is_none_or(|b| r.inertia < b.inertia) {
            best = Some(r);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

/// A single Lloyd run from the given `k × p` centroids.
pub fn kmeans_with_explicit_init(
    data: &Dataset,
    centroids: &[Vec<f64>],
    max_iterations: usize,
    tol: f64,
) -> Result<KMeansResult> {
    check_k(data, centroids.len())?;
    for c in centroids {
        check_len(data.dims(), c.len())?;
    }
    if max_iterations == 0 {
        return Err(config("max_iterations must be at least 1"));
    }
    lloyd(data, centroids.to_vec(), max_iterations, tol, InitMethod::Explicit)
}
