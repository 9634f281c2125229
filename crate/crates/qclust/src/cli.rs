//! The `qclust` command line.
//!
//! Every command writes its primary output to `-o <path>` or, without it,
//! to standard output. Human-readable summaries go to standard output when
//! the primary output goes to a file, and to standard error otherwise.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qclust_core::baselines::{InitMethod, KMeansConfig};
use qclust_core::datagen::{ellipse_uniform, gaussian_blobs, pedagogical_instance, BlobSpec, EllipseSpec};
use qclust_core::formulation::{
    build_binary_ising, build_onehot_qubo, ising_to_qubo, precision_check, LambdaMode, OneHotConfig,
};
use qclust_core::pipelines::{HierarchyConfig, SplitSelection};
use qclust_core::solvers::{Backend, Cooling, DecompositionConfig, SaSchedule, TabuConfig};
use qclust_core::{distance_matrix, Dataset, Metric, SolverConfig};

use crate::benchmark::{builtin_suite, run_benchmark, write_outputs, SuiteSpec, BUILTIN_SUITES};
use crate::error::{Error, Result};
use crate::exec::{solve_timed, with_threads};
use crate::formats::{read_centroids, read_points, read_qubo, write_centroids, write_points, write_qubo, write_text};
use crate::records::{run_binary, run_hierarchical, run_kmeans, run_kmeans_explicit, run_onehot, AssignmentRecord};

#[derive(Debug, Parser)]
#[command(name = "qclust", version, about = "Clustering as QUBO and Ising minimization, with a k-means baseline")]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, env = "QCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Write zero for wall times so reruns produce identical files.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset as a points CSV.
    #[command(subcommand)]
    Generate(Generate),
    /// Write the QUBO for a points CSV.
    #[command(subcommand)]
    Build(Build),
    /// Minimize a QUBO file and write the solver report as JSON.
    Solve(SolveArgs),
    /// Cluster a points CSV through a QUBO or Ising formulation.
    #[command(subcommand)]
    Cluster(Cluster),
    /// Cluster a points CSV with k-means.
    Kmeans(KmeansArgs),
    /// Run a benchmark suite.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Subcommand)]
pub enum Generate {
    /// Isotropic Gaussian blobs.
    Blobs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        #[arg(long, default_value_t = 1.0)]
        std: f64,
        /// Space the centers far enough apart that blobs do not overlap.
        #[arg(long)]
        separated: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Points uniform over an ellipse.
    Ellipse {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rotation: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        cx: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        cy: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The fixed 12-point instance and its adversarial k-means start.
    Pedagogical {
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Defaults to `<output stem>_centroids.csv` next to the output.
        #[arg(long)]
        centroids: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    SquaredEuclidean,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::SquaredEuclidean => Metric::SquaredEuclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LambdaModeArg {
    PaperPractice,
    PaperBound,
    Explicit,
    Unchecked,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[arg(long, value_enum, default_value = "paper-practice")]
    pub lambda_mode: LambdaModeArg,
    /// Weight for the explicit and unchecked modes. Giving it alone selects
    /// the explicit mode.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
}

impl LambdaArgs {
    fn resolve(&self) -> Result<LambdaMode> {
        let need = |what: &str| {
            self.lambda.ok_or_else(|| Error::Usage(format!("--lambda-mode {what} needs --lambda <value>")))
        };
        Ok(match (self.lambda_mode, self.lambda) {
            (LambdaModeArg::PaperPractice, Some(v)) => LambdaMode::Explicit(v),
            (LambdaModeArg::PaperPractice, None) => LambdaMode::PaperPractice,
            (LambdaModeArg::PaperBound, Some(_)) => {
                return Err(Error::Usage("--lambda cannot be combined with --lambda-mode paper-bound".into()))
            }
            (LambdaModeArg::PaperBound, None) => LambdaMode::PaperBound,
            (LambdaModeArg::Explicit, _) => LambdaMode::Explicit(need("explicit")?),
            (LambdaModeArg::Unchecked, _) => LambdaMode::Unchecked(need("unchecked")?),
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Build {
    /// K-cluster one-hot QUBO with `N·K` variables.
    Onehot {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, value_enum, default_value = "squared-euclidean")]
        metric: MetricArg,
        /// Report whether coefficients fit an integer range of this width.
        #[arg(long)]
        n_bits: Option<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-cluster problem with `N` variables, written in QUBO form.
    Binary {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "squared-euclidean")]
        metric: MetricArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverKind {
    Sa,
    Tabu,
    Brute,
    Decompose,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendKind {
    Tabu,
    Sa,
    Brute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CoolingArg {
    Geometric,
    Linear,
}

/// Solver flags; a flag that does not apply to the chosen solver is ignored.
#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "sa")]
    pub solver: SolverKind,
    /// Annealing chains.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sweeps per annealing chain.
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub t_initial: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long, value_enum)]
    pub cooling: Option<CoolingArg>,
    /// Tabu step limit.
    #[arg(long)]
    pub tabu_iterations: Option<usize>,
    #[arg(long)]
    pub tenure: Option<usize>,
    /// Variables per decomposition sub-problem.
    #[arg(long)]
    pub subqubo_size: Option<usize>,
    /// Decomposition rounds.
    #[arg(long)]
    pub nrepeat: Option<usize>,
    /// Sub-problem solver for decomposition.
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
}

impl SolverArgs {
    pub fn config(&self, seed: u64) -> SolverConfig {
        let sa = || {
            let d = SaSchedule::default();
            SaSchedule {
                t_initial: self.t_initial,
                t_final: self.t_final,
                sweeps: self.sweeps.unwrap_or(d.sweeps),
                cooling: match self.cooling {
                    Some(CoolingArg::Linear) => Cooling::Linear,
                    Some(CoolingArg::Geometric) | None => Cooling::Geometric,
                },
                samples: self.samples.unwrap_or(d.samples),
                seed,
            }
        };
        let tabu = |base: TabuConfig| TabuConfig {
            tenure: self.tenure.or(base.tenure),
            max_iterations: self.tabu_iterations.unwrap_or(base.max_iterations),
            seed,
            ..base
        };
        match self.solver {
            SolverKind::Sa => SolverConfig::SimulatedAnnealing(sa()),
            SolverKind::Tabu => SolverConfig::Tabu(tabu(TabuConfig::default())),
            SolverKind::Brute => SolverConfig::BruteForce,
            SolverKind::Decompose => {
                let d = DecompositionConfig::default();
                let backend = match (self.backend, d.backend.clone()) {
                    (Some(BackendKind::Brute), _) => Backend::BruteForce,
                    (Some(BackendKind::Sa), _) => Backend::SimulatedAnnealing(sa()),
                    (_, Backend::Tabu(t)) => Backend::Tabu(tabu(t)),
                    (_, other) => other,
                };
                SolverConfig::Decompose(DecompositionConfig {
                    subqubo_size: self.subqubo_size.unwrap_or(d.subqubo_size),
                    nrepeat: self.nrepeat.unwrap_or(d.nrepeat),
                    backend,
                    seed,
                    ..d
                })
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SplitArg {
    LargestCluster,
    LargestWContribution,
}

#[derive(Debug, Subcommand)]
pub enum Cluster {
    /// K clusters from the one-hot QUBO.
    Onehot {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two clusters from the binary Ising problem.
    Binary {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// K clusters by repeated binary splits.
    Hierarchical {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "largest-w-contribution")]
        split: SplitArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Random,
    #[value(name = "kmeans++", alias = "kmeans-pp")]
    KmeansPp,
    Explicit,
}

#[derive(Debug, Args)]
pub struct KmeansArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "kmeans++")]
    pub init: InitArg,
    #[arg(long, default_value_t = 10)]
    pub n_init: usize,
    /// Initial centroids CSV; implies `--init explicit`.
    #[arg(long)]
    pub centroids: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// A built-in suite name or a suite JSON file.
    #[arg(long)]
    pub suite: String,
    /// Dataset sizes for a built-in suite, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value = "bench")]
    pub out_dir: PathBuf,
}

/// Text for standard output and standard error.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    /// Emits `primary` to `path` or stdout, and `summary` next to it.
    fn emit(&mut self, path: Option<&Path>, primary: &str, summary: &str) -> Result<()> {
        match path {
            Some(p) => {
                write_text(p, primary)?;
                self.stdout.push_str(summary);
            }
            None => {
                self.stdout.push_str(primary);
                self.stderr.push_str(summary);
            }
        }
        Ok(())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Error::Usage(String::new()),
        _ => Error::Usage(e.render().to_string()),
    })?;
    execute(&cli)
}

/// Process entry point: runs, prints and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Err(e) = Cli::try_parse_from(&args) {
        let code = if e.use_stderr() { crate::exit::USAGE } else { 0 };
        let _ = e.print();
        return code;
    }
    match run(args) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output> {
    with_threads(cli.threads, || dispatch(cli))
}

fn json_text(value: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn record_out(cli: &Cli, out: &mut Output, record: AssignmentRecord, path: Option<&Path>) -> Result<()> {
    let record = if cli.no_timing { record.without_timing() } else { record };
    let summary = format!(
        "{}: k={} violations={} inertia={} w={} seed={}\n",
        record.method,
        record.k,
        record.violations,
        record.inertia.map_or("-".into(), |v| v.to_string()),
        record.w.map_or("-".into(), |v| v.to_string()),
        record.seed,
    );
    out.emit(path, &json_text(&record)?, &summary)
}

fn dataset_summary(kind: &str, data: &Dataset, seed: Option<u64>) -> String {
    let seed = seed.map_or(String::new(), |s| format!(" seed={s}"));
    format!("{kind}: {} points in {} dimensions{seed}\n", data.len(), data.dims())
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let mut out = Output::default();
    let seed = cli.seed;
    match &cli.command {
        Command::Generate(g) => match g {
            Generate::Blobs { n, k, dims, std, separated, output } => {
                let spec =
                    BlobSpec { dims: *dims, std: *std, allow_overlap: !separated, ..BlobSpec::new(*n, *k, seed) };
                let data = gaussian_blobs(&spec)?;
                out.emit(output.as_deref(), &points_text(&data), &dataset_summary("blobs", &data, Some(seed)))?;
            }
            Generate::Ellipse { n, a, b, rotation, cx, cy, output } => {
                let spec =
                    EllipseSpec { rotation: *rotation, center: [*cx, *cy], ..EllipseSpec::new(*n, *a, *b, seed) };
                let data = ellipse_uniform(&spec)?;
                out.emit(output.as_deref(), &points_text(&data), &dataset_summary("ellipse", &data, Some(seed)))?;
            }
            Generate::Pedagogical { output, centroids } => {
                let (data, start) = pedagogical_instance();
                let centroid_path = centroids.clone().or_else(|| {
                    output.as_ref().map(|p| {
                        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                        p.with_file_name(format!("{stem}_centroids.csv"))
                    })
                });
                let mut summary = dataset_summary("pedagogical", &data, None);
                if let Some(p) = &centroid_path {
                    write_centroids(p, &start)?;
                    let _ = writeln!(summary, "adversarial centroids: {}", p.display());
                }
                match output {
                    Some(p) => {
                        write_points(p, &data)?;
                        out.stdout.push_str(&summary);
                    }
                    None => {
                        out.stdout.push_str(&points_text(&data));
                        out.stderr.push_str(&summary);
                    }
                }
            }
        },
        Command::Build(b) => build(b, &mut out)?,
        Command::Solve(args) => {
            let problem = read_qubo(&args.input)?;
            let config = args.solver.config(seed);
            let mut report = solve_timed(&problem, &config)?;
            if cli.no_timing {
                report.elapsed = Default::default();
            }
            let summary = format!(
                "{}: best energy {} over {} samples, seed={}\n",
                config.name(),
                report.best_energy,
                report.sample_energies.len(),
                seed
            );
            out.emit(args.output.as_deref(), &json_text(&report)?, &summary)?;
        }
        Command::Cluster(c) => {
            let (record, output) = match c {
                Cluster::Onehot { input, k, lambda, solver, output } => {
                    let data = read_points(input)?;
                    (run_onehot(&data, *k, &solver.config(seed), lambda.resolve()?)?, output)
                }
                Cluster::Binary { input, solver, output } => {
                    (run_binary(&read_points(input)?, &solver.config(seed))?, output)
                }
                Cluster::Hierarchical { input, k, split, solver, output } => {
                    let cfg = HierarchyConfig {
                        target_k: *k,
                        split_selection: match split {
                            SplitArg::LargestCluster => SplitSelection::LargestCluster,
                            SplitArg::LargestWContribution => SplitSelection::LargestWContribution,
                        },
                        solver: solver.config(seed),
                        seed,
                    };
                    (run_hierarchical(&read_points(input)?, &cfg)?, output)
                }
            };
            record_out(cli, &mut out, record, output.as_deref())?;
        }
        Command::Kmeans(args) => {
            let data = read_points(&args.input)?;
            let record = match (&args.centroids, args.init) {
                (Some(path), InitArg::Explicit | InitArg::KmeansPp) => {
                    let centroids = read_centroids(path)?;
                    if args.k.is_some_and(|k| k != centroids.len()) {
                        return Err(Error::Usage(format!(
                            "--k disagrees with the {} centroids given",
                            centroids.len()
                        )));
                    }
                    run_kmeans_explicit(&data, &centroids, args.max_iter, args.tol)?
                }
                (Some(_), InitArg::Random) => {
                    return Err(Error::Usage("--centroids cannot be combined with --init random".into()))
                }
                (None, InitArg::Explicit) => return Err(Error::Usage("--init explicit needs --centroids".into())),
                (None, init) => {
                    let k = args.k.ok_or_else(|| Error::Usage("--k is required without --centroids".into()))?;
                    let cfg = KMeansConfig {
                        init: if matches!(init, InitArg::Random) {
                            InitMethod::Random
                        } else {
                            InitMethod::KMeansPlusPlus
                        },
                        n_init: args.n_init,
                        max_iterations: args.max_iter,
                        tol: args.tol,
                        seed,
                        ..KMeansConfig::new(k)
                    };
                    run_kmeans(&data, &cfg)?
                }
            };
            record_out(cli, &mut out, record, args.output.as_deref())?;
        }
        Command::Benchmark(args) => {
            let suite = load_suite(args, seed)?;
            let mut records = run_benchmark(&suite)?;
            if cli.no_timing {
                records.iter_mut().for_each(|r| r.elapsed_seconds = 0.0);
            }
            let (csv, summary) = write_outputs(&args.out_dir, &suite, &records)?;
            let failed = records.iter().filter(|r| !r.is_ok()).count();
            let _ = writeln!(
                out.stdout,
                "{}: {} records ({failed} failed), seed={}\n{}\n{}",
                suite.name,
                records.len(),
                suite.seed,
                csv.display(),
                summary.display()
            );
        }
    }
    Ok(out)
}

fn points_text(data: &Dataset) -> String {
    crate::formats::format_points(data)
}

fn load_suite(args: &BenchmarkArgs, seed: u64) -> Result<SuiteSpec> {
    if let Some(suite) = builtin_suite(&args.suite, seed, args.sizes.as_deref()) {
        return Ok(suite);
    }
    let path = Path::new(&args.suite);
    if !path.exists() {
        return Err(Error::Usage(format!(
            "unknown suite {:?}; expected one of {} or a suite JSON file",
            args.suite,
            BUILTIN_SUITES.join(", ")
        )));
    }
    if args.sizes.is_some() {
        return Err(Error::Usage("--sizes only applies to built-in suites".into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: Some(path.to_path_buf()),
        line: e.line(),
        msg: e.to_string(),
    })
}

fn build(b: &Build, out: &mut Output) -> Result<()> {
    match b {
        Build::Onehot { input, k, lambda, metric, n_bits, output } => {
            let data = read_points(input)?;
            let d = distance_matrix(&data, (*metric).into(), true);
            let cfg = OneHotConfig::resolve(&d, *k, lambda.resolve()?)?;
            let problem = build_onehot_qubo(&d, &cfg)?;
            let mut summary = format!(
                "onehot: {} variables, {} couplings, lambda={} ({:?}), d_max={}\n",
                problem.n_vars(),
                problem.quadratic().len(),
                cfg.lambda_value,
                cfg.lambda_mode,
                d.d_max()
            );
            if let Some(bits) = n_bits {
                let report = precision_check(&d, *k, *bits)?;
                let _ = writeln!(summary, "precision: {}", serde_json::to_string(&report)?);
            }
            let comment = json!({
                "encoding": "onehot",
                "points": input,
                "k": k,
                "metric": format!("{:?}", d.metric()),
                "d_max": d.d_max(),
                "lambda_mode": cfg.lambda_mode,
                "lambda": cfg.lambda_value,
            });
            emit_qubo(out, output.as_deref(), &problem, &comment.to_string(), &summary)
        }
        Build::Binary { input, metric, output } => {
            let data = read_points(input)?;
            let d = distance_matrix(&data, (*metric).into(), true);
            let problem = ising_to_qubo(&build_binary_ising(&d)?);
            let summary = format!(
                "binary: {} variables, {} couplings, d_max={}\n",
                problem.n_vars(),
                problem.quadratic().len(),
                d.d_max()
            );
            let comment = json!({
                "encoding": "binary",
                "points": input,
                "metric": format!("{:?}", d.metric()),
                "d_max": d.d_max(),
                "bit_one_is_spin": 1,
            });
            emit_qubo(out, output.as_deref(), &problem, &comment.to_string(), &summary)
        }
    }
}

fn emit_qubo(
    out: &mut Output,
    path: Option<&Path>,
    problem: &qclust_core::QuboProblem,
    comment: &str,
    summary: &str,
) -> Result<()> {
    match path {
        Some(p) => {
            write_qubo(p, problem, Some(comment))?;
            out.stdout.push_str(summary);
        }
        None => {
            out.stdout.push_str(&crate::formats::format_qubo(problem, Some(comment)));
            out.stderr.push_str(summary);
        }
    }
    Ok(())
}
