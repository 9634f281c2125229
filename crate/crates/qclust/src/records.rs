//! Clustering runs that produce self-describing assignment records.
//!
//! `w` and `inertia` are measured on the raw coordinates with squared
//! Euclidean distance. `energy` is in solver units, i.e. on distances
//! scaled into `[0, 1]`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qclust_core::baselines::{inertia, kmeans, kmeans_with_explicit_init, objective_w, KMeansConfig, KMeansResult};
use qclust_core::formulation::LambdaMode;
use qclust_core::pipelines::{cluster_binary_with, cluster_hierarchical_with, cluster_onehot_with, HierarchyConfig};
use qclust_core::solvers::Objective;
use qclust_core::{distance_matrix, ClusterAssignment, Dataset, Metric, SolveReport, SolverConfig};

use crate::error::Result;
use crate::exec::solve_timed;

/// Contents of an assignment JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    /// `None` when a one-hot solution broke the constraint.
    pub labels: Option<Vec<usize>>,
    pub k: usize,
    pub method: String,
    pub energy: Option<f64>,
    pub w: Option<f64>,
    pub inertia: Option<f64>,
    /// Points whose one-hot row was not exactly one bit.
    pub violations: usize,
    pub seed: u64,
    pub config: Value,
    pub elapsed_seconds: f64,
}

impl AssignmentRecord {
    fn new(data: &Dataset, assignment: Option<&ClusterAssignment>, k: usize, method: &str, seed: u64) -> Result<Self> {
        let (w, inertia) = match assignment {
            Some(a) => {
                let d = distance_matrix(data, Metric::SquaredEuclidean, false);
                (Some(objective_w(&d, a)?), Some(inertia(data, a)?))
            }
            None => (None, None),
        };
        Ok(Self {
            labels: assignment.map(|a| a.labels().to_vec()),
            k,
            method: method.to_owned(),
            energy: None,
            w,
            inertia,
            violations: 0,
            seed,
            config: Value::Null,
            elapsed_seconds: 0.0,
        })
    }

    /// Zeroes the wall-time field so reruns produce identical bytes.
    pub fn without_timing(mut self) -> Self {
        self.elapsed_seconds = 0.0;
        self
    }
}

fn timed_runner(p: &dyn Objective, c: &SolverConfig) -> qclust_core::Result<SolveReport> {
    solve_timed(p, c)
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

pub fn run_onehot(
    data: &Dataset,
    k: usize,
    solver: &SolverConfig,
    lambda_mode: LambdaMode,
) -> Result<AssignmentRecord> {
    let start = Instant::now();
    let d = distance_matrix(data, Metric::SquaredEuclidean, true);
    let out = cluster_onehot_with(&d, k, solver, lambda_mode, &timed_runner)?;
    let mut rec = AssignmentRecord::new(data, out.assignment.as_ref(), k, "onehot", solver.seed())?;
    rec.energy = Some(out.report.best_energy);
    rec.violations = out.violations.len();
    rec.config = json!({
        "pipeline": "onehot",
        "metric": Metric::SquaredEuclidean,
        "d_max": d.d_max(),
        "lambda_mode": lambda_mode,
        "lambda": out.lambda,
        "solver": out.report.config,
        "violated_points": out.violations.iter().map(|v| v.point_index).collect::<Vec<_>>(),
    });
    rec.elapsed_seconds = secs(start.elapsed());
    Ok(rec)
}

pub fn run_binary(data: &Dataset, solver: &SolverConfig) -> Result<AssignmentRecord> {
    let start = Instant::now();
    let d = distance_matrix(data, Metric::SquaredEuclidean, true);
    let (assignment, report) = cluster_binary_with(&d, solver, &timed_runner)?;
    let mut rec = AssignmentRecord::new(data, Some(&assignment), 2, "binary", solver.seed())?;
    rec.energy = Some(report.best_energy);
    rec.config = json!({
        "pipeline": "binary",
        "metric": Metric::SquaredEuclidean,
        "d_max": d.d_max(),
        "solver": report.config,
    });
    rec.elapsed_seconds = secs(start.elapsed());
    Ok(rec)
}

pub fn run_hierarchical(data: &Dataset, cfg: &HierarchyConfig) -> Result<AssignmentRecord> {
    let start = Instant::now();
    let d = distance_matrix(data, Metric::SquaredEuclidean, true);
    let out = cluster_hierarchical_with(&d, cfg, &timed_runner)?;
    let mut rec = AssignmentRecord::new(data, Some(&out.assignment), cfg.target_k, "hierarchical", cfg.seed)?;
    let splits: Vec<Value> = out
        .history
        .iter()
        .map(|s| {
            json!({
                "cluster": s.cluster,
                "new_cluster": s.new_cluster,
                "members": s.members,
                "scale": s.scale,
                "skipped": s.skipped,
                "energy": s.report.best_energy,
                "solver": s.report.config,
            })
        })
        .collect();
    rec.config = json!({
        "pipeline": "hierarchical",
        "metric": Metric::SquaredEuclidean,
        "target_k": cfg.target_k,
        "split_selection": cfg.split_selection,
        "solver": cfg.solver,
        "splits": splits,
    });
    rec.elapsed_seconds = secs(start.elapsed());
    Ok(rec)
}

fn kmeans_record(data: &Dataset, r: &KMeansResult, method: &str, seed: u64, config: Value) -> Result<AssignmentRecord> {
    let mut rec = AssignmentRecord::new(data, Some(&r.assignment), r.assignment.k(), method, seed)?;
    rec.inertia = Some(r.inertia);
    rec.config = json!({
        "pipeline": "kmeans",
        "kmeans": config,
        "iterations_run": r.iterations_run,
        "centroids": r.centroids,
        "raw_coordinates": true,
    });
    Ok(rec)
}

pub fn run_kmeans(data: &Dataset, cfg: &KMeansConfig) -> Result<AssignmentRecord> {
    let start = Instant::now();
    let r = kmeans(data, cfg)?;
    let method = match cfg.init {
        qclust_core::baselines::InitMethod::Random => "kmeans_random",
        _ => "kmeans_pp",
    };
    let mut rec = kmeans_record(data, &r, method, cfg.seed, serde_json::to_value(cfg)?)?;
    rec.elapsed_seconds = secs(start.elapsed());
    Ok(rec)
}

pub fn run_kmeans_explicit(
    data: &Dataset,
    centroids: &[Vec<f64>],
    max_iterations: usize,
    tol: f64,
) -> Result<AssignmentRecord> {
    let start = Instant::now();
    let r = kmeans_with_explicit_init(data, centroids, max_iterations, tol)?;
    let config =
        json!({ "init": "explicit", "initial_centroids": centroids, "max_iterations": max_iterations, "tol": tol });
    let mut rec = kmeans_record(data, &r, "kmeans_explicit", 0, config)?;
    rec.elapsed_seconds = secs(start.elapsed());
    Ok(rec)
}
