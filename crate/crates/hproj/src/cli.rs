//! Argument parsing and subcommand dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hproj_core::discovery::{
    frechet_distance, pearson_correlation, pipl, ppl, sefa_directions, traverse, DirectionSet, Distance, GaussianStats,
    Generator, LinearGenerator, MeanSquared, RandomProjection, SquaredL2, TraversalSpec, DEFAULT_ALPHAS,
    DEFAULT_PIPL_EPS, DEFAULT_PPL_EPS,
};
use hproj_core::householder::{chain_accumulate, decompose_orthogonal};
use hproj_core::linalg::{frobenius_norm, orthogonality_error};
use hproj_core::projector::{nearest_orthogonal, ChainLayout};
use hproj_core::rng::{gaussian_vec, seeded};
use hproj_core::toy::{evaluate_recovery, make_ground_truth, train_toy, Init, TrainConfig};
use hproj_core::wy::{accumulate, Accumulation};
use hproj_core::{Matrix, ProjectorParams, ReflectorChain};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bench::{bench_accumulation, checksum};
use crate::error::{Error, Result};
use crate::format;
use crate::report::{render_table, sha256_hex, RunReport};

#[derive(Debug, Parser)]
#[command(name = "hproj", version, about = "Householder low-rank orthogonal projectors")]
pub struct Cli {
    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a projector, randomly or from a weight matrix.
    Init(InitArgs),
    /// Decompose an orthogonal matrix into a reflector chain.
    Decompose(DecomposeArgs),
    /// Accumulate a chain (or a projector's forward matrix) to a dense matrix.
    Reconstruct(ReconstructArgs),
    /// Nearest orthogonal matrix `U Vᵀ`.
    NearestOrth(NearestArgs),
    /// Closed-form latent directions (eigenvectors of AᵀA).
    Discover(DiscoverArgs),
    /// Evaluate a generator along one direction.
    Traverse(TraverseArgs),
    /// Path-length, Fréchet and correlation metrics.
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Time naive versus WY accumulation.
    Bench(BenchArgs),
    /// Train the synthetic factor-recovery generator.
    ToyTrain(ToyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Naive,
    Wy,
}

impl From<MethodArg> for Accumulation {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Naive => Accumulation::Naive,
            MethodArg::Wy => Accumulation::Wy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Random,
    Nearest,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceArg {
    SquaredL2,
    Mse,
    RandomProjection,
}

#[derive(Debug, Args, Serialize)]
pub struct InitArgs {
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub rank: usize,
    /// Initialize from the singular frames of this matrix.
    #[arg(long, value_name = "MATRIX")]
    pub from: Option<PathBuf>,
    /// Store only `rank` reflectors per side.
    #[arg(long)]
    pub truncated: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReconstructArgs {
    /// Chain (MATF/CSV, one reflector per row) or `.hproj` projector.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Wy)]
    pub method: MethodArg,
    #[arg(long, env = "HPROJ_WORKERS", default_value_t = 1)]
    pub workers: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct NearestArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscoverArgs {
    /// Weight matrix or `.hproj` projector.
    pub input: PathBuf,
    /// Number of directions; defaults to all of them.
    #[arg(long)]
    pub top: Option<usize>,
    /// For projectors: report the basis encoded by the parameters (leading
    /// columns of V) instead of an eigensolver basis.
    #[arg(long)]
    pub parameter_basis: bool,
    /// Directions as columns; without it they are reported inline.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TraverseArgs {
    /// Weight matrix or `.hproj` projector acting as the generator.
    #[arg(long)]
    pub proj: PathBuf,
    /// Directions as columns; defaults to the generator's own directions.
    #[arg(long)]
    pub dirs: Option<PathBuf>,
    #[arg(long)]
    pub dir_index: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Base latent (single row or column); otherwise drawn from `--seed`.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum MetricsCommand {
    Ppl(PplArgs),
    Pipl(PiplArgs),
    Fid(FidArgs),
    Pearson(PearsonArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = DistanceArg::SquaredL2)]
    pub distance: DistanceArg,
    /// Feature count for the random-projection distance.
    #[arg(long, default_value_t = 64)]
    pub features: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PplArgs {
    #[arg(long)]
    pub proj: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PPL_EPS)]
    pub eps: f64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct PiplArgs {
    #[arg(long)]
    pub proj: PathBuf,
    #[arg(long)]
    pub dirs: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PIPL_EPS)]
    pub eps: f64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FidArgs {
    /// Feature samples, one per row.
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PearsonArgs {
    pub steps: PathBuf,
    pub preds: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Wy)]
    pub method: MethodArg,
    #[arg(long, env = "HPROJ_WORKERS", default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 3)]
    pub factors: usize,
    /// Output dimension of the ground-truth map; defaults to `--dim`.
    #[arg(long)]
    pub out_dim: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub rank: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 256)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Nearest)]
    pub init: InitArg,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Records the digest of every file read.
#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = format::read_bytes(path)?;
        self.0.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn matrix(&mut self, path: &Path) -> Result<Matrix> {
        let bytes = self.read(path)?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            std::str::from_utf8(&bytes)
                .map_err(|_| Error::malformed("CSV is not UTF-8"))
                .and_then(format::decode_csv)
        } else {
            format::decode_matf(&bytes)
        };
        parsed.map_err(|e| e.at(path))
    }

    fn projector(&mut self, path: &Path) -> Result<ProjectorParams> {
        let bytes = self.read(path)?;
        format::decode_projector(&bytes).map_err(|e| e.at(path))
    }

    fn chain(&mut self, path: &Path) -> Result<ReflectorChain> {
        let rows = self.matrix(path)?;
        ReflectorChain::from_rows(&rows).map_err(|e| Error::from(e).at(path))
    }

    fn vector(&mut self, path: &Path) -> Result<Vec<f64>> {
        let m = self.matrix(path)?;
        if m.rows() == 1 || m.cols() == 1 {
            Ok(m.into_vec())
        } else {
            Err(Error::malformed(format!(
                "expected a single row or column, found {}x{}",
                m.rows(),
                m.cols()
            ))
            .at(path))
        }
    }

    /// A projector or a plain weight matrix as a generator.
    fn generator(&mut self, path: &Path) -> Result<Loaded> {
        if format::is_projector_path(path) {
            Ok(Loaded::Projector(self.projector(path)?))
        } else {
            Ok(Loaded::Linear(LinearGenerator(self.matrix(path)?)))
        }
    }
}

enum Loaded {
    Projector(ProjectorParams),
    Linear(LinearGenerator),
}

impl Loaded {
    fn as_generator(&self) -> &dyn Generator {
        match self {
            Loaded::Projector(p) => p,
            Loaded::Linear(g) => g,
        }
    }

    /// The generator's own directions: the parameter basis for projectors,
    /// eigenvectors of `AᵀA` for matrices.
    fn default_directions(&self) -> Result<DirectionSet> {
        match self {
            Loaded::Projector(p) => Ok(p.directions()),
            Loaded::Linear(g) => Ok(sefa_directions(&g.0, g.0.cols())?),
        }
    }
}

fn workers_checked(w: usize) -> Result<usize> {
    if w == 0 {
        return Err(Error::Usage("--workers must be at least 1".into()));
    }
    Ok(w)
}

fn distance(args: &SamplingArgs, output_dim: usize) -> Box<dyn Distance> {
    match args.distance {
        DistanceArg::SquaredL2 => Box::new(SquaredL2),
        DistanceArg::Mse => Box::new(MeanSquared),
        DistanceArg::RandomProjection => Box::new(RandomProjection::new(output_dim, args.features, args.seed)),
    }
}

fn output_dim(g: &dyn Generator) -> usize {
    g.generate(&vec![0.0; g.latent_dim()]).len()
}

fn load_directions(inputs: &mut Inputs, dirs: &Option<PathBuf>, g: &Loaded) -> Result<(DirectionSet, String)> {
    match dirs {
        Some(path) => {
            let m = inputs.matrix(path)?;
            let set = DirectionSet::from_directions(m).map_err(|e| Error::from(e).at(path))?;
            Ok((set, path.display().to_string()))
        }
        None => Ok((g.default_directions()?, "generator".to_string())),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Runs one subcommand, returning its parameters and outputs.
fn execute(command: &Command, inputs: &mut Inputs) -> Result<(&'static str, Value, Value)> {
    match command {
        Command::Init(a) => {
            let layout = if a.truncated {
                ChainLayout::Truncated
            } else {
                ChainLayout::Full
            };
            let p = match &a.from {
                Some(path) => {
                    let m = inputs.matrix(path)?;
                    if a.rows.is_some_and(|r| r != m.rows()) || a.cols.is_some_and(|c| c != m.cols()) {
                        return Err(Error::malformed(format!(
                            "--rows/--cols disagree with the {}x{} matrix",
                            m.rows(),
                            m.cols()
                        ))
                        .at(path));
                    }
                    ProjectorParams::from_pretrained_with(&m, a.rank, layout)?.with_seed(a.seed)
                }
                None => {
                    let (Some(rows), Some(cols)) = (a.rows, a.cols) else {
                        return Err(Error::Usage("--rows and --cols are required without --from".into()));
                    };
                    ProjectorParams::random(rows, cols, a.rank, a.seed, layout)?
                }
            };
            format::save_projector(&a.output, &p)?;
            let spectrum_error = spectrum_error(&p)?;
            let out = json!({
                "path": a.output,
                "out_dim": p.out_dim(),
                "in_dim": p.in_dim(),
                "rank": p.rank(),
                "layout": if a.truncated { "truncated" } else { "full" },
                "u_reflectors": p.u_chain().len(),
                "v_reflectors": p.v_chain().len(),
                "spectrum_error": spectrum_error,
            });
            Ok(("init", to_value(a), out))
        }
        Command::Decompose(a) => {
            let m = inputs.matrix(&a.input)?;
            let chain = decompose_orthogonal(&m).map_err(|e| Error::from(e).at(&a.input))?;
            format::save_chain(&a.output, &chain)?;
            let err = frobenius_norm(&chain_accumulate(&chain).sub(&m)?);
            let out = json!({
                "path": a.output,
                "reflectors": chain.len(),
                "identity_placeholders": chain.identity_count(),
                "reconstruction_error": err,
            });
            Ok(("decompose", to_value(a), out))
        }
        Command::Reconstruct(a) => {
            let workers = workers_checked(a.workers)?;
            let m = if format::is_projector_path(&a.input) {
                inputs.projector(&a.input)?.forward()
            } else {
                accumulate(&inputs.chain(&a.input)?, a.method.into(), workers)?
            };
            format::save_matrix(&a.output, &m)?;
            let out = json!({
                "path": a.output,
                "rows": m.rows(),
                "cols": m.cols(),
                "orthogonality_error": orthogonality_error(&m),
                "checksum": checksum(&m),
            });
            Ok(("reconstruct", to_value(a), out))
        }
        Command::NearestOrth(a) => {
            let m = inputs.matrix(&a.input)?;
            let r = nearest_orthogonal(&m)?;
            format::save_matrix(&a.output, &r)?;
            let out = json!({
                "path": a.output,
                "distance": frobenius_norm(&r.sub(&m)?),
                "orthogonality_error": orthogonality_error(&r),
            });
            Ok(("nearest-orth", to_value(a), out))
        }
        Command::Discover(a) => {
            let set = if format::is_projector_path(&a.input) {
                let p = inputs.projector(&a.input)?;
                let top = a.top.unwrap_or(p.in_dim());
                if a.parameter_basis {
                    let all = p.directions();
                    if top > all.len() {
                        return Err(hproj_core::Error::IndexOutOfRange {
                            index: top,
                            len: all.len(),
                        }
                        .into());
                    }
                    truncate_set(&all, top)?
                } else {
                    sefa_directions(&p.forward(), top)?
                }
            } else {
                let m = inputs.matrix(&a.input)?;
                sefa_directions(&m, a.top.unwrap_or(m.cols()))?
            };
            let mut out = json!({
                "top": set.len(),
                "magnitudes": set.magnitudes(),
            });
            match &a.output {
                Some(path) => {
                    format::save_matrix(path, set.directions())?;
                    out["path"] = json!(path);
                }
                None => {
                    let cols: Vec<Vec<f64>> = (0..set.len()).map(|i| set.direction(i)).collect();
                    out["directions"] = json!(cols);
                }
            }
            Ok(("discover", to_value(a), out))
        }
        Command::Traverse(a) => {
            let g = inputs.generator(&a.proj)?;
            let (dirs, source) = load_directions(inputs, &a.dirs, &g)?;
            let gen = g.as_generator();
            let base = match &a.base {
                Some(p) => inputs.vector(p)?,
                None => gaussian_vec(&mut seeded(a.seed), gen.latent_dim()),
            };
            let strengths = a.alphas.clone().unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
            let traversal = TraversalSpec {
                direction_index: a.dir_index,
                strengths: strengths.clone(),
                base,
            };
            let outputs = traverse(gen, &traversal, &dirs)?;
            let m = Matrix::new(outputs.len(), outputs.first().map_or(0, Vec::len), outputs.concat())?;
            format::save_matrix(&a.output, &m)?;
            let out = json!({
                "path": a.output,
                "rows": m.rows(),
                "cols": m.cols(),
                "strengths": strengths,
                "directions": source,
            });
            Ok(("traverse", to_value(a), out))
        }
        Command::Metrics(MetricsCommand::Ppl(a)) => {
            let g = inputs.generator(&a.proj)?;
            let gen = g.as_generator();
            let dist = distance(&a.sampling, output_dim(gen));
            let est = ppl(gen, dist.as_ref(), a.eps, a.sampling.samples, a.sampling.seed)?;
            let out = json!({
                "metric": "ppl",
                "value": est.value,
                "stderr": est.stderr,
                "samples": est.samples,
                "eps": a.eps,
                "seed": a.sampling.seed,
            });
            Ok(("metrics", to_value(a), out))
        }
        Command::Metrics(MetricsCommand::Pipl(a)) => {
            let g = inputs.generator(&a.proj)?;
            let (dirs, source) = load_directions(inputs, &a.dirs, &g)?;
            let gen = g.as_generator();
            let dist = distance(&a.sampling, output_dim(gen));
            let est = pipl(gen, dist.as_ref(), &dirs, a.eps, a.sampling.samples, a.sampling.seed)?;
            let out = json!({
                "metric": "pipl",
                "value": est.value,
                "stderr": est.stderr,
                "samples": est.samples,
                "eps": a.eps,
                "seed": a.sampling.seed,
                "directions": source,
            });
            Ok(("metrics", to_value(a), out))
        }
        Command::Metrics(MetricsCommand::Fid(a)) => {
            let fa = inputs.matrix(&a.a)?;
            let fb = inputs.matrix(&a.b)?;
            let pa = GaussianStats::from_samples(&fa).map_err(|e| Error::from(e).at(&a.a))?;
            let pb = GaussianStats::from_samples(&fb).map_err(|e| Error::from(e).at(&a.b))?;
            let value = frechet_distance(&pa, &pb)?;
            let out = json!({
                "metric": "fid",
                "value": value,
                "stderr": null,
                "samples": [fa.rows(), fb.rows()],
                "eps": null,
                "seed": null,
            });
            Ok(("metrics", to_value(a), out))
        }
        Command::Metrics(MetricsCommand::Pearson(a)) => {
            let x = inputs.vector(&a.steps)?;
            let y = inputs.vector(&a.preds)?;
            let value = pearson_correlation(&x, &y)?;
            let out = json!({
                "metric": "pearson",
                "value": value,
                "stderr": null,
                "samples": x.len(),
                "eps": null,
                "seed": null,
            });
            Ok(("metrics", to_value(a), out))
        }
        Command::Bench(a) => {
            let workers = workers_checked(a.workers)?;
            let r = bench_accumulation(a.dim, a.count, a.method.into(), workers, a.reps, a.seed)?;
            Ok(("bench", to_value(a), to_value(&r)))
        }
        Command::ToyTrain(a) => {
            let out_dim = a.out_dim.unwrap_or(a.dim);
            let gt = make_ground_truth(a.dim, a.factors, out_dim, a.seed)?.with_noise(a.noise)?;
            let init = match a.init {
                InitArg::Random => Init::Random,
                InitArg::Nearest => Init::Nearest,
            };
            let cfg = TrainConfig {
                batch: a.batch,
                ..TrainConfig::new(a.seed, a.steps, a.lr, a.rank, init)
            };
            let (g, history) = train_toy(&gt, &cfg)?;
            let alignment = evaluate_recovery(&g, &gt)?;
            let run = json!({
                "config": {
                    "dim": a.dim,
                    "factors": a.factors,
                    "out_dim": out_dim,
                    "rank": a.rank,
                    "steps": a.steps,
                    "lr": a.lr,
                    "batch": a.batch,
                    "noise": a.noise,
                    "seed": a.seed,
                    "init": init.as_str(),
                },
                "loss": history.loss,
                "final_loss": history.final_loss,
                "orthogonality": history.orthogonality,
                "alignment": {
                    "per_factor": alignment.per_factor,
                    "matched": alignment.matched,
                    "mean": alignment.mean,
                },
            });
            let text = serde_json::to_string_pretty(&run).expect("serializable");
            format::write_bytes(&a.output, text.as_bytes())?;
            let max_orth = history.orthogonality.iter().copied().fold(0.0, f64::max);
            let out = json!({
                "path": a.output,
                "initial_loss": history.loss[0],
                "final_loss": history.final_loss,
                "max_orthogonality_error": max_orth,
                "recovery_mean": alignment.mean,
            });
            Ok(("toy-train", to_value(a), out))
        }
    }
}

fn truncate_set(set: &DirectionSet, k: usize) -> Result<DirectionSet> {
    let cols: Vec<Vec<f64>> = (0..k).map(|i| set.direction(i)).collect();
    let m = if k == 0 {
        Matrix::zeros(set.dim(), 0)
    } else {
        Matrix::from_columns(&cols)?
    };
    Ok(DirectionSet::new(m, set.magnitudes()[..k].to_vec())?)
}

/// Largest deviation of the singular values of `A` from `rank` ones and
/// zeros elsewhere.
fn spectrum_error(p: &ProjectorParams) -> Result<f64> {
    let a = p.forward();
    let s = hproj_core::linalg::svd(&a)?;
    Ok(s.s
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - if i < p.rank() { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max))
}

/// Runs a parsed command line, returning the report it emits.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (name, parameters, outputs) = execute(&cli.command, &mut inputs)?;
    Ok(RunReport {
        subcommand: name.to_string(),
        inputs: inputs.0,
        parameters,
        outputs,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Parses `argv` (including the program name), runs it and prints the
/// report. Returns the process exit code: 0 on success, 1 on a domain or
/// validation error, 2 on a usage error.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli).and_then(|report| emit(&cli, &report)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, report: &RunReport) -> Result<()> {
    let text = if cli.pretty {
        render_table(report)
    } else {
        let mut s = serde_json::to_string(report).expect("serializable");
        s.push('\n');
        s
    };
    match &cli.report {
        Some(path) => format::write_bytes(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
