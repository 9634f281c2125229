//! Benchmark harness: every (dataset, method) cell of a suite is run and
//! scored with both inertia and the pairwise objective `W`.
//!
//! Output files, written by [`write_outputs`] into the output directory:
//!
//! * `<suite>_records.csv` with columns, in order: `dataset_tag, n, k,
//!   method, nrepeat, run, seed, status, inertia, w, energy, violations,
//!   elapsed_seconds, error, solver_config`.
//! * `<suite>_summary.json` with the suite echo, per-method aggregates and,
//!   for sweeps, per-`nrepeat` medians.
//!
//! Cells run concurrently. Each cell's seed is derived from the suite seed
//! and the cell's dataset, method and run indices (not its `nrepeat`), so
//! the records are identical for any thread count, and a sweep compares
//! runs that differ only in their round count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qclust_core::baselines::{InitMethod, KMeansConfig};
use qclust_core::datagen::{ellipse_uniform, gaussian_blobs, pedagogical_instance, BlobSpec, EllipseSpec};
use qclust_core::formulation::LambdaMode;
use qclust_core::pipelines::{HierarchyConfig, SplitSelection};
use qclust_core::solvers::{derive_seed, DecompositionConfig, SaSchedule};
use qclust_core::{Dataset, SolverConfig};

use crate::error::{Error, Result};
use crate::formats::write_text;
use crate::records::{run_binary, run_hierarchical, run_kmeans, run_onehot, AssignmentRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum DatasetSource {
    Blobs(BlobSpec),
    Ellipse(EllipseSpec),
    Pedagogical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub tag: String,
    /// Cluster count used by every method on this dataset.
    pub k: usize,
    #[serde(flatten)]
    pub source: DatasetSource,
}

impl DatasetSpec {
    pub fn generate(&self) -> Result<Dataset> {
        Ok(match &self.source {
            DatasetSource::Blobs(spec) => gaussian_blobs(spec)?,
            DatasetSource::Ellipse(spec) => ellipse_uniform(spec)?,
            DatasetSource::Pedagogical => pedagogical_instance().0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MethodSpec {
    KmeansRandom { n_init: usize },
    KmeansPp { n_init: usize },
    Onehot { solver: SolverConfig, lambda_mode: LambdaMode },
    Binary { solver: SolverConfig },
    Hierarchical { solver: SolverConfig, split_selection: SplitSelection },
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::KmeansRandom { .. } => "kmeans_random",
            MethodSpec::KmeansPp { .. } => "kmeans_pp",
            MethodSpec::Onehot { .. } => "onehot",
            MethodSpec::Binary { .. } => "binary",
            MethodSpec::Hierarchical { .. } => "hierarchical",
        }
    }

    fn sweeps(&self) -> bool {
        matches!(
            self,
            MethodSpec::Onehot { solver: SolverConfig::Decompose(_), .. }
                | MethodSpec::Binary { solver: SolverConfig::Decompose(_) }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub name: String,
    pub seed: u64,
    pub datasets: Vec<DatasetSpec>,
    pub methods: Vec<MethodSpec>,
    /// Round counts to sweep for decomposition-based methods.
    #[serde(default)]
    pub nrepeat_sweep: Option<Vec<usize>>,
    /// Independent runs per cell, each with its own seed.
    #[serde(default = "one")]
    pub runs: usize,
}

fn one() -> usize {
    1
}

/// One row of the records CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub dataset_tag: String,
    pub n: usize,
    pub k: usize,
    pub method: String,
    pub nrepeat: Option<usize>,
    pub run: usize,
    pub seed: u64,
    /// `ok`, or `failed:<class>` with the class of the error.
    pub status: String,
    pub inertia: Option<f64>,
    pub w: Option<f64>,
    pub energy: Option<f64>,
    pub violations: usize,
    pub elapsed_seconds: f64,
    pub error: Option<String>,
    /// JSON echo of the resolved configuration.
    pub solver_config: String,
}

impl BenchmarkRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

struct Cell {
    dataset: usize,
    method: usize,
    nrepeat: Option<usize>,
    run: usize,
}

fn cells(suite: &SuiteSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for dataset in 0..suite.datasets.len() {
        for (method, spec) in suite.methods.iter().enumerate() {
            let sweep: Vec<Option<usize>> = match (&suite.nrepeat_sweep, spec.sweeps()) {
                (Some(values), true) => values.iter().copied().map(Some).collect(),
                _ => vec![None],
            };
            for &nrepeat in &sweep {
                for run in 0..suite.runs.max(1) {
                    out.push(Cell { dataset, method, nrepeat, run });
                }
            }
        }
    }
    out
}

fn cell_seed(suite_seed: u64, cell: &Cell) -> u64 {
    let key = ((cell.dataset as u64) << 40) | ((cell.method as u64) << 20) | cell.run as u64;
    derive_seed(suite_seed, key)
}

fn with_rounds(solver: &SolverConfig, nrepeat: Option<usize>) -> SolverConfig {
    match (solver, nrepeat) {
        (SolverConfig::Decompose(c), Some(r)) => {
            SolverConfig::Decompose(DecompositionConfig { nrepeat: r, ..c.clone() })
        }
        (other, _) => other.clone(),
    }
}

fn run_cell(
    spec: &MethodSpec,
    data: &Dataset,
    k: usize,
    nrepeat: Option<usize>,
    seed: u64,
) -> Result<AssignmentRecord> {
    match spec {
        MethodSpec::KmeansRandom { n_init } => {
            run_kmeans(data, &KMeansConfig { init: InitMethod::Random, n_init: *n_init, seed, ..KMeansConfig::new(k) })
        }
        MethodSpec::KmeansPp { n_init } => run_kmeans(
            data,
            &KMeansConfig { init: InitMethod::KMeansPlusPlus, n_init: *n_init, seed, ..KMeansConfig::new(k) },
        ),
        MethodSpec::Onehot { solver, lambda_mode } => {
            run_onehot(data, k, &with_rounds(solver, nrepeat).with_seed(seed), *lambda_mode)
        }
        MethodSpec::Binary { solver } => run_binary(data, &with_rounds(solver, nrepeat).with_seed(seed)),
        MethodSpec::Hierarchical { solver, split_selection } => run_hierarchical(
            data,
            &HierarchyConfig { target_k: k, split_selection: *split_selection, solver: solver.clone(), seed },
        ),
    }
}

/// Runs every cell of `suite`. Failures become `failed` rows; only a
/// dataset that cannot be generated aborts the suite.
pub fn run_benchmark(suite: &SuiteSpec) -> Result<Vec<BenchmarkRecord>> {
    let datasets: Vec<Dataset> = suite.datasets.iter().map(DatasetSpec::generate).collect::<Result<_>>()?;
    let cells = cells(suite);
    let records = cells
        .par_iter()
        .map(|cell| {
            let ds = &suite.datasets[cell.dataset];
            let data = &datasets[cell.dataset];
            let method = &suite.methods[cell.method];
            let seed = cell_seed(suite.seed, cell);
            let base = BenchmarkRecord {
                dataset_tag: ds.tag.clone(),
                n: data.len(),
                k: ds.k,
                method: method.name().to_owned(),
                nrepeat: cell.nrepeat,
                run: cell.run,
                seed,
                status: "ok".into(),
                inertia: None,
                w: None,
                energy: None,
                violations: 0,
                elapsed_seconds: 0.0,
                error: None,
                solver_config: String::new(),
            };
            match run_cell(method, data, ds.k, cell.nrepeat, seed) {
                Ok(rec) => BenchmarkRecord {
                    inertia: rec.inertia,
                    w: rec.w,
                    energy: rec.energy,
                    violations: rec.violations,
                    elapsed_seconds: rec.elapsed_seconds,
                    solver_config: rec.config.to_string(),
                    status: if rec.labels.is_some() { "ok".into() } else { "failed:violations".into() },
                    ..base
                },
                Err(e) => BenchmarkRecord {
                    status: format!("failed:{}", e.class()),
                    error: Some(e.to_string()),
                    solver_config: serde_json::to_string(method).unwrap_or_default(),
                    ..base
                },
            }
        })
        .collect();
    Ok(records)
}

pub fn records_csv(records: &[BenchmarkRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::Usage(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Per-method aggregates and, for sweeps, per-`nrepeat` medians.
pub fn summary(suite: &SuiteSpec, records: &[BenchmarkRecord]) -> Value {
    let mut by_method: BTreeMap<(String, String), Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        by_method.entry((r.dataset_tag.clone(), r.method.clone())).or_default().push(r);
    }
    let cells: Vec<Value> = by_method
        .iter()
        .map(|((tag, method), rs)| {
            let ok: Vec<&&BenchmarkRecord> = rs.iter().filter(|r| r.is_ok()).collect();
            let inertia: Vec<f64> = ok.iter().filter_map(|r| r.inertia).collect();
            let w: Vec<f64> = ok.iter().filter_map(|r| r.w).collect();
            json!({
                "dataset_tag": tag,
                "method": method,
                "records": rs.len(),
                "failed": rs.len() - ok.len(),
                "mean_inertia": mean(&inertia),
                "min_inertia": inertia.iter().copied().reduce(f64::min),
                "mean_w": mean(&w),
                "total_violations": rs.iter().map(|r| r.violations).sum::<usize>(),
                "mean_elapsed_seconds": mean(&rs.iter().map(|r| r.elapsed_seconds).collect::<Vec<_>>()),
            })
        })
        .collect();
    let mut sweep: BTreeMap<(String, String, usize), Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        if let Some(n) = r.nrepeat {
            sweep.entry((r.dataset_tag.clone(), r.method.clone(), n)).or_default().push(r);
        }
    }
    let sweep: Vec<Value> = sweep
        .iter()
        .map(|((tag, method, n), rs)| {
            json!({
                "dataset_tag": tag,
                "method": method,
                "nrepeat": n,
                "runs": rs.len(),
                "median_energy": median(rs.iter().filter_map(|r| r.energy).collect()),
                "median_inertia": median(rs.iter().filter_map(|r| r.inertia).collect()),
            })
        })
        .collect();
    json!({
        "suite": suite,
        "records": records.len(),
        "failed": records.iter().filter(|r| !r.is_ok()).count(),
        "kmeans_coordinates": "raw",
        "qubo_distances": "squared_euclidean scaled to [0, 1]",
        "cells": cells,
        "nrepeat_sweep": sweep,
    })
}

/// Writes the records CSV and summary JSON; returns their paths.
pub fn write_outputs(dir: &Path, suite: &SuiteSpec, records: &[BenchmarkRecord]) -> Result<(PathBuf, PathBuf)> {
    let csv_path = dir.join(format!("{}_records.csv", suite.name));
    let json_path = dir.join(format!("{}_summary.json", suite.name));
    write_text(&csv_path, &records_csv(records)?)?;
    write_text(&json_path, &(serde_json::to_string_pretty(&summary(suite, records))? + "\n"))?;
    Ok((csv_path, json_path))
}

/// Names accepted by [`builtin_suite`].
pub const BUILTIN_SUITES: [&str; 4] = ["table1", "table2", "fig3", "pedagogical"];

fn blobs(tag_n: usize, k: usize, seed: u64) -> DatasetSpec {
    DatasetSpec {
        tag: format!("blobs_n{tag_n}"),
        k,
        source: DatasetSource::Blobs(BlobSpec { allow_overlap: true, ..BlobSpec::new(tag_n, k, seed) }),
    }
}

fn ellipse(n: usize, seed: u64) -> DatasetSpec {
    DatasetSpec {
        tag: format!("ellipse_n{n}"),
        k: 2,
        source: DatasetSource::Ellipse(EllipseSpec::new(n, 4.0, 1.0, seed)),
    }
}

/// Annealing settings used for binary clustering in the built-in suites.
pub fn binary_schedule() -> SaSchedule {
    SaSchedule { sweeps: 1000, samples: 16, ..SaSchedule::default() }
}

/// Built-in suites at desk scale. `sizes` overrides the dataset sizes.
pub fn builtin_suite(name: &str, seed: u64, sizes: Option<&[usize]>) -> Option<SuiteSpec> {
    let kmeans = [MethodSpec::KmeansPp { n_init: 10 }, MethodSpec::KmeansRandom { n_init: 10 }];
    let onehot_decompose = MethodSpec::Onehot {
        solver: SolverConfig::Decompose(DecompositionConfig::default()),
        lambda_mode: LambdaMode::PaperPractice,
    };
    let suite = |name: &str, datasets, methods, nrepeat_sweep, runs| SuiteSpec {
        name: name.into(),
        seed,
        datasets,
        methods,
        nrepeat_sweep,
        runs,
    };
    let ds_seed = |i: usize| derive_seed(seed, 1_000_000 + i as u64);
    Some(match name {
        "table1" => {
            let sizes = sizes.unwrap_or(&[200, 1000]);
            let datasets = sizes.iter().enumerate().map(|(i, &n)| blobs(n, 6, ds_seed(i))).collect();
            suite(name, datasets, [&kmeans[..], &[onehot_decompose]].concat(), None, 1)
        }
        "table2" => {
            let sizes = sizes.unwrap_or(&[40, 1000, 2000]);
            let datasets = sizes.iter().enumerate().map(|(i, &n)| ellipse(n, ds_seed(i))).collect();
            let binary = MethodSpec::Binary { solver: SolverConfig::SimulatedAnnealing(binary_schedule()) };
            suite(name, datasets, [&kmeans[..], &[binary]].concat(), None, 1)
        }
        "fig3" => {
            let sizes = sizes.unwrap_or(&[200]);
            let datasets = sizes.iter().enumerate().map(|(i, &n)| blobs(n, 6, ds_seed(i))).collect();
            suite(name, datasets, vec![kmeans[0].clone(), onehot_decompose], Some(vec![1, 5, 10, 25, 50]), 10)
        }
        "pedagogical" => {
            let datasets = vec![DatasetSpec { tag: "pedagogical".into(), k: 4, source: DatasetSource::Pedagogical }];
            let sa = SolverConfig::SimulatedAnnealing(SaSchedule { samples: 100, ..SaSchedule::default() });
            let methods = vec![
                kmeans[0].clone(),
                kmeans[1].clone(),
                MethodSpec::Onehot { solver: sa.clone(), lambda_mode: LambdaMode::PaperPractice },
                MethodSpec::Hierarchical { solver: sa, split_selection: SplitSelection::default() },
            ];
            suite(name, datasets, methods, None, 1)
        }
        _ => return None,
    })
}
