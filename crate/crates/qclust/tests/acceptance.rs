//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;

use qclust::benchmark::{binary_schedule, DatasetSource, DatasetSpec, MethodSpec, SuiteSpec};
use qclust::cli;
use qclust::exec::solve_timed;
use qclust::records::{run_binary, run_kmeans};
use qclust_core::baselines::{kmeans, kmeans_with_explicit_init, objective_w, KMeansConfig};
use qclust_core::datagen::{ellipse_uniform, gaussian_blobs, pedagogical_instance, BlobSpec, EllipseSpec};
use qclust_core::formulation::{
    bits_to_spins, build_binary_ising, build_onehot_qubo, decode_binary, decode_onehot, precision_check, qubo_to_ising,
    DecodePolicy, LambdaMode, OneHotConfig,
};
use qclust_core::pipelines::{cluster_hierarchical, cluster_onehot_with, HierarchyConfig, SplitSelection};
use qclust_core::solvers::{
    brute_force_clustering, brute_force_minimize, count_assignments, decompose_solve, stream_rng, Backend,
    DecompositionConfig, Objective, SaSchedule, TabuConfig,
};
use qclust_core::{
    distance_matrix, ClusterAssignment, Dataset, DistanceMatrix, Metric, QuboProblem, SolveReport, SolverConfig,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_s), format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64()))
}

fn random_points(rng: &mut impl Rng, n: usize) -> Dataset {
    let pts = (0..n).map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect();
    Dataset::new(pts, None).unwrap()
}

fn random_qubo(rng: &mut impl Rng, n: usize, density: f64) -> QuboProblem {
    let linear = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut quad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                quad.push((i, j, rng.random_range(-2.0..2.0)));
            }
        }
    }
    QuboProblem::new(n, linear, quad, rng.random_range(-1.0..1.0)).unwrap()
}

fn runner(p: &dyn Objective, c: &SolverConfig) -> qclust_core::Result<SolveReport> {
    solve_timed(p, c)
}

fn w_of(d: &DistanceMatrix, labels: &[usize], k: usize) -> f64 {
    objective_w(d, &ClusterAssignment::new(labels.to_vec(), k, "check").unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(101, 0);
    for trial in 0..50 {
        let n = rng.random_range(4..=6);
        let k = rng.random_range(2..=3);
        let data = random_points(&mut rng, n);
        let d = distance_matrix(&data, Metric::SquaredEuclidean, true);
        let cfg = OneHotConfig::resolve(&d, k, LambdaMode::PaperBound).unwrap();
        let qubo = build_onehot_qubo(&d, &cfg).unwrap();
        let report = brute_force_minimize(&qubo).unwrap();
        let decoded = decode_onehot(report.best_state.as_binary().unwrap(), n, k, DecodePolicy::Strict).unwrap();
        ensure(decoded.violations.is_empty(), format!("trial {trial}: {} violations", decoded.violations.len()))?;
        let w = objective_w(&d, &decoded.assignment.unwrap()).unwrap();
        let oracle = brute_force_clustering(&d, k).unwrap().w;
        ensure((w - oracle).abs() <= 1e-9, format!("trial {trial}: W {w} vs oracle {oracle}"))?;
    }
    within(start.elapsed(), 60)?;
    Ok(format!("50 instances agree, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(102, 0);
    let mut states = 0u64;
    for trial in 0..50 {
        let n = rng.random_range(2..=14);
        let data = random_points(&mut rng, n);
        let d = distance_matrix(&data, Metric::SquaredEuclidean, true);
        let ising = build_binary_ising(&d).unwrap();
        let report = brute_force_minimize(&ising).unwrap();
        let a = decode_binary(report.best_state.as_spin().unwrap()).unwrap();
        let w = objective_w(&d, &a).unwrap();
        let oracle = brute_force_clustering(&d, 2).unwrap().w;
        ensure((w - oracle).abs() <= 1e-9, format!("trial {trial}: W {w} vs oracle {oracle}"))?;
        for m in 0u32..1 << n {
            let s: Vec<i8> = (0..n).map(|i| if (m >> i) & 1 == 1 { 1 } else { -1 }).collect();
            let f: Vec<i8> = s.iter().map(|v| -v).collect();
            ensure(ising.energy(&s).unwrap() == ising.energy(&f).unwrap(), format!("trial {trial}: flip asymmetry"))?;
            states += 1;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("50 instances agree, flip symmetry on {states} states, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let mut rng = stream_rng(103, 0);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let n = rng.random_range(1..=12);
        let q = random_qubo(&mut rng, n, 0.7);
        let ising = qubo_to_ising(&q);
        for m in 0u32..1 << n {
            let bits: Vec<u8> = (0..n).map(|i| ((m >> i) & 1) as u8).collect();
            let gap = (q.energy(&bits).unwrap() - ising.energy(&bits_to_spins(&bits)).unwrap()).abs();
            worst = worst.max(gap);
        }
    }
    ensure(worst <= 1e-9, format!("max gap {worst:e}"))?;
    Ok(format!("max gap {worst:e}"))
}

fn criterion_4() -> Outcome {
    // S(n, k) = k·S(n−1, k) + S(n−1, k−1)
    let mut s = vec![vec![0u128; 21]; 21];
    s[0][0] = 1;
    for n in 1..=20 {
        for k in 1..=n {
            s[n][k] = k as u128 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    for n in 1..=20 {
        for k in 1..=n {
            let got = count_assignments(n, k).unwrap().to_string();
            ensure(got == s[n][k].to_string(), format!("S({n},{k}) = {got}, recurrence {}", s[n][k]))?;
        }
    }
    let s19: f64 = count_assignments(19, 4).unwrap().to_string().parse().unwrap();
    let ratio = s19 / 1e10;
    ensure((1.0 / 1.2..=1.2).contains(&ratio), format!("S(19,4) = {s19}, ratio {ratio}"))?;
    Ok(format!("all 210 counts match, S(19,4) = {s19} ({ratio:.3} x 1e10)"))
}

fn criterion_5() -> Outcome {
    let data = Dataset::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], None).unwrap();
    let d = distance_matrix(&data, Metric::SquaredEuclidean, false);
    let report = precision_check(&d, 3, 6).unwrap();
    ensure(report.d_bound == Some(62.0), format!("d_bound {:?}", report.d_bound))?;
    Ok("d_bound = 62".into())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (data, centroids) = pedagogical_instance();
    let d = distance_matrix(&data, Metric::SquaredEuclidean, true);
    let oracle = brute_force_clustering(&d, 4).unwrap().w;
    let trapped = kmeans_with_explicit_init(&data, &centroids, 300, 1e-4).unwrap();
    let trapped_w = objective_w(&d, &trapped.assignment).unwrap();
    ensure(
        trapped_w > oracle + 1e-9,
        format!("k-means from the adversarial start reached W {trapped_w}, optimum {oracle}"),
    )?;
    let mut recovered = 0;
    for seed in 0..100 {
        let solver = SolverConfig::SimulatedAnnealing(SaSchedule { samples: 100, seed, ..SaSchedule::default() });
        let out = cluster_onehot_with(&d, 4, &solver, LambdaMode::PaperPractice, &runner).unwrap();
        if out.assignment.is_some_and(|a| (objective_w(&d, &a).unwrap() - oracle).abs() <= 1e-9) {
            recovered += 1;
        }
    }
    let detail = format!(
        "k-means trapped at W {trapped_w:.4} > {oracle:.4}; SA recovered the optimum in {recovered}/100 seeds (need 95), {:.1}s",
        start.elapsed().as_secs_f64()
    );
    ensure(recovered >= 95, detail.clone())?;
    within(start.elapsed(), 120)?;
    Ok(detail)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let data = ellipse_uniform(&EllipseSpec::new(1000, 4.0, 1.0, 7)).unwrap();
    let km = run_kmeans(&data, &KMeansConfig { n_init: 10, seed: 7, ..KMeansConfig::new(2) }).unwrap();
    let solver = SolverConfig::SimulatedAnnealing(SaSchedule { seed: 7, ..binary_schedule() });
    let bin = run_binary(&data, &solver).unwrap();
    let (ki, bi) = (km.inertia.unwrap(), bin.inertia.unwrap());
    let gap = (bi - ki) / ki;
    let detail = format!(
        "binary inertia {bi:.4}, k-means {ki:.4}, gap {:.4}%, {:.1}s",
        100.0 * gap,
        start.elapsed().as_secs_f64()
    );
    ensure(gap <= 0.005, detail.clone())?;
    within(start.elapsed(), 300)?;
    Ok(detail)
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let data = gaussian_blobs(&BlobSpec::new(200, 6, 8)).unwrap();
    let d = distance_matrix(&data, Metric::SquaredEuclidean, true);
    let sweep = [1usize, 5, 10, 25, 50];
    let mut medians = Vec::new();
    for &nrepeat in &sweep {
        let mut energies = Vec::new();
        for seed in 0..10 {
            let solver =
                SolverConfig::Decompose(DecompositionConfig { nrepeat, seed, ..DecompositionConfig::default() });
            let out = cluster_onehot_with(&d, 6, &solver, LambdaMode::PaperPractice, &runner).unwrap();
            let e = &out.report.sample_energies;
            ensure(e.windows(2).all(|w| w[1] <= w[0]), format!("nrepeat {nrepeat}, seed {seed}: round energies rose"))?;
            energies.push(out.report.best_energy);
        }
        energies.sort_by(f64::total_cmp);
        medians.push(0.5 * (energies[4] + energies[5]));
    }
    let text: Vec<String> = sweep.iter().zip(&medians).map(|(n, m)| format!("{n}:{m:.4}")).collect();
    ensure(medians.windows(2).all(|w| w[1] <= w[0]), format!("medians not non-increasing: {}", text.join(" ")))?;
    Ok(format!("medians {}, {:.1}s", text.join(" "), start.elapsed().as_secs_f64()))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let mut full = vec!["qclust", "--no-timing", "--seed", "5"];
    full.extend_from_slice(args);
    let _ = dir;
    cli::run(full).map(|o| o.stdout).map_err(|e| format!("{args:?}: {e}"))
}

fn criterion_9() -> Outcome {
    let reports = |seed| -> Vec<SolveReport> {
        let mut rng = stream_rng(109, 0);
        let q = random_qubo(&mut rng, 30, 0.5);
        let configs = [
            SolverConfig::SimulatedAnnealing(SaSchedule { samples: 16, sweeps: 200, seed, ..Default::default() }),
            SolverConfig::Tabu(TabuConfig { seed, ..Default::default() }),
            SolverConfig::Decompose(DecompositionConfig { subqubo_size: 10, nrepeat: 10, seed, ..Default::default() }),
        ];
        configs.iter().map(|c| solve_timed(&q, c).unwrap()).collect()
    };
    let (a, b) = (reports(9), reports(9));
    ensure(a.iter().zip(&b).all(|(x, y)| x.same_outcome(y)), "solver reports differ between identical runs")?;

    let files = |root: &Path| -> Result<Vec<(String, Vec<u8>)>, String> {
        let p = |name: &str| root.join(name).to_string_lossy().into_owned();
        let (blobs, ped, qubo) = (p("blobs.csv"), p("ped.csv"), p("blobs.qubo"));
        let suite = p("suite.json");
        let mini = SuiteSpec {
            name: "mini".into(),
            seed: 3,
            datasets: vec![DatasetSpec {
                tag: "b".into(),
                k: 3,
                source: DatasetSource::Blobs(BlobSpec::new(30, 3, 4)),
            }],
            methods: vec![
                MethodSpec::KmeansRandom { n_init: 3 },
                MethodSpec::Onehot {
                    solver: SolverConfig::Decompose(DecompositionConfig {
                        subqubo_size: 12,
                        nrepeat: 4,
                        ..Default::default()
                    }),
                    lambda_mode: LambdaMode::PaperPractice,
                },
                MethodSpec::Hierarchical {
                    solver: SolverConfig::Tabu(TabuConfig {
                        max_iterations: 500,
                        stall_limit: 100,
                        ..Default::default()
                    }),
                    split_selection: SplitSelection::LargestWContribution,
                },
            ],
            nrepeat_sweep: Some(vec![1, 4]),
            runs: 2,
        };
        std::fs::write(&suite, serde_json::to_string_pretty(&mini).unwrap()).map_err(|e| e.to_string())?;
        let bench = p("bench");
        run_cli(root, &["generate", "blobs", "--n", "30", "--k", "3", "-o", &blobs])?;
        run_cli(root, &["generate", "ellipse", "--n", "50", "--a", "3", "--b", "1", "-o", &p("ellipse.csv")])?;
        run_cli(root, &["generate", "pedagogical", "-o", &ped])?;
        run_cli(root, &["build", "onehot", &blobs, "--k", "3", "-o", &qubo])?;
        run_cli(root, &["build", "binary", &blobs, "-o", &p("binary.qubo")])?;
        run_cli(root, &["solve", &qubo, "--solver", "sa", "--samples", "8", "--sweeps", "100", "-o", &p("sa.json")])?;
        run_cli(root, &["solve", &qubo, "--solver", "tabu", "-o", &p("tabu.json")])?;
        run_cli(root, &["solve", &qubo, "--solver", "decompose", "--nrepeat", "5", "-o", &p("dec.json")])?;
        run_cli(root, &["cluster", "onehot", &blobs, "--k", "3", "--solver", "tabu", "-o", &p("c_onehot.json")])?;
        run_cli(root, &["cluster", "binary", &blobs, "--samples", "8", "--sweeps", "100", "-o", &p("c_binary.json")])?;
        run_cli(root, &["cluster", "hierarchical", &blobs, "--k", "3", "--solver", "tabu", "-o", &p("c_hier.json")])?;
        run_cli(root, &["kmeans", &blobs, "--k", "3", "--init", "random", "-o", &p("km.json")])?;
        run_cli(root, &["benchmark", "--suite", &suite, "--out-dir", &bench])?;
        let mut out = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(dir) = stack.pop() {
            for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
                let path = entry.map_err(|e| e.to_string())?.path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                    out.push((rel, std::fs::read(&path).map_err(|e| e.to_string())?));
                }
            }
        }
        out.sort();
        Ok(out)
    };
    // Same directory both times: some outputs echo their input paths.
    let dir = tempfile::tempdir().unwrap();
    let f1 = files(dir.path())?;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            std::fs::remove_dir_all(path).unwrap()
        } else {
            std::fs::remove_file(path).unwrap()
        }
    }
    let f2 = files(dir.path())?;
    ensure(f1.len() == f2.len(), "different file sets")?;
    for ((n1, b1), (n2, b2)) in f1.iter().zip(&f2) {
        ensure(n1 == n2 && b1 == b2, format!("{n1} differs between runs"))?;
    }
    Ok(format!("3 solver reports and {} output files identical across runs", f1.len()))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    for trial in 0..100u64 {
        let mut rng = stream_rng(110, trial);
        let n = rng.random_range(10..=60);
        let k = rng.random_range(1..=5);
        let data = random_points(&mut rng, n);
        let r = kmeans(&data, &KMeansConfig { n_init: 1, seed: trial, ..KMeansConfig::new(k) }).unwrap();
        ensure(
            r.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-9),
            format!("Lloyd trial {trial}: inertia rose"),
        )?;
    }
    for trial in 0..100u64 {
        let mut rng = stream_rng(210, trial);
        let n = rng.random_range(4..=20);
        let k = rng.random_range(2..=n.min(5));
        let data = random_points(&mut rng, n);
        let cfg = HierarchyConfig {
            target_k: k,
            split_selection: if trial % 2 == 0 {
                SplitSelection::LargestWContribution
            } else {
                SplitSelection::LargestCluster
            },
            solver: SolverConfig::Tabu(TabuConfig { seed: trial, ..Default::default() }),
            seed: trial,
        };
        let out = cluster_hierarchical(&data, &cfg).unwrap();
        let d = distance_matrix(&data, Metric::SquaredEuclidean, false);
        let mut prev = w_of(&d, &vec![0; n], k);
        for split in &out.history {
            let w = w_of(&d, &split.labels_after, k);
            ensure(w <= prev + 1e-9, format!("hierarchical trial {trial}: W rose from {prev} to {w}"))?;
            prev = w;
        }
    }
    for trial in 0..100u64 {
        let mut rng = stream_rng(310, trial);
        let n = rng.random_range(10..=60);
        let q = random_qubo(&mut rng, n, 0.3);
        let backend = match trial % 3 {
            0 => Backend::default(),
            1 => Backend::SimulatedAnnealing(SaSchedule { sweeps: 50, samples: 2, ..Default::default() }),
            _ => Backend::BruteForce,
        };
        let cfg = DecompositionConfig { subqubo_size: 8, nrepeat: 10, backend, seed: trial, ..Default::default() };
        let r = decompose_solve(&q, &cfg).unwrap();
        ensure(
            r.sample_energies.windows(2).all(|w| w[1] <= w[0]),
            format!("decomposition trial {trial}: incumbent rose"),
        )?;
    }
    Ok(format!("300 randomized trials monotone, {:.1}s", start.elapsed().as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("one-hot QUBO matches the clustering oracle", criterion_1),
        ("binary Ising matches the clustering oracle", criterion_2),
        ("QUBO and Ising energies agree", criterion_3),
        ("partition counts", criterion_4),
        ("precision bound", criterion_5),
        ("pedagogical instance", criterion_6),
        ("ellipse binary vs k-means", criterion_7),
        ("decomposition round sweep", criterion_8),
        ("determinism", criterion_9),
        ("monotonicity", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
