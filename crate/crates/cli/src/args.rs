use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use unmix_core::{Component, QNorm};

#[derive(Debug, Parser)]
#[command(name = "unmix", version, about = "Sparse signal / noise unmixing by multi-penalty thresholding")]
pub struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for outputs that are not given an explicit path.
    #[arg(long, global = true, env = "UNMIX_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw random measurement problems and write them as JSON.
    Generate(GenerateArgs),
    /// Run the alternating solver on one problem.
    Solve(SolveArgs),
    /// Sweep the (alpha, beta) grid for one (p, q).
    Sweep(SweepArgs),
    /// Compare best multi-penalty results against single-penalty thresholding.
    Compare(CompareArgs),
    /// Project saved sweep solutions to 2-D with PCA.
    Pca(PcaArgs),
    /// Re-run the command recorded in a run manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpecArgs {
    /// Number of measurements.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Signal length.
    #[arg(long = "n", default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub sparsity: usize,
    /// Nonzeros of the sparse part are drawn from [-amplitude, amplitude].
    #[arg(long, default_value_t = 3.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    pub min_magnitude: f64,
    /// Euclidean norm of the noise part.
    #[arg(long, default_value_t = 0.7)]
    pub noise: f64,
    /// Operator norm after rescaling.
    #[arg(long, default_value_t = 0.99)]
    pub target_norm: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of problems, seeds `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Output file (single problem only).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RegArgs {
    /// Sparsity exponent, 0 <= p <= 1.
    #[arg(long, value_parser = parse_p)]
    pub p: Option<f64>,
    /// Noise exponent, q >= 2 or `inf`.
    #[arg(long, value_parser = parse_q)]
    pub q: Option<QNorm>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem JSON written by `generate`.
    #[arg(long, required_unless_present = "demo_2d", conflicts_with = "demo_2d")]
    pub problem: Option<PathBuf>,
    /// Planar example: T = I, y = (0.3, 1.35), p = 1, q = inf, alpha = 0.4, beta = 0.5.
    #[arg(long)]
    pub demo_2d: bool,
    #[command(flatten)]
    pub reg: RegArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Inner u-steps per outer iteration.
    #[arg(long = "inner-u", short = 'L', default_value_t = 20)]
    pub inner_u: usize,
    /// Inner v-steps per outer iteration.
    #[arg(long = "inner-v", short = 'M', default_value_t = 20)]
    pub inner_v: usize,
    #[arg(long)]
    pub max_outer: Option<usize>,
    #[arg(long)]
    pub stop_tol: Option<f64>,
    /// Output prefix; writes `<prefix>.solution.json` and `<prefix>.trace.jsonl`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Use the protocol grid (overrides the other grid flags).
    #[arg(long)]
    pub grid_default: bool,
    #[arg(long, default_value_t = 0.0009)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 0.0005)]
    pub beta0: f64,
    #[arg(long, default_value_t = 1.25)]
    pub ratio: f64,
    /// Largest grid index; the grid has (count + 1)^2 cells.
    #[arg(long, default_value_t = 30)]
    pub count: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LoopArgs {
    #[arg(long = "inner-u", short = 'L', default_value_t = 20)]
    pub inner_u: usize,
    #[arg(long = "inner-v", short = 'M', default_value_t = 20)]
    pub inner_v: usize,
    /// Outer iterations per cell.
    #[arg(long, default_value_t = 40)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub stop_tol: f64,
    /// Residual bound of the feasibility rule.
    #[arg(long, default_value_t = 0.1)]
    pub residual_threshold: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Problem JSON; when absent a problem is generated from the problem flags.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_p, default_value = "0.5")]
    pub p: f64,
    #[arg(long, value_parser = parse_q, default_value = "2")]
    pub q: QNorm,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub loops: LoopArgs,
    /// Also write every cell with its solution vectors as JSON lines (input for `pca`).
    #[arg(long)]
    pub save_solutions: bool,
    /// Results CSV path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 20)]
    pub problems: usize,
    /// First seed; problem k uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_p, default_value = "0,0.3,0.5,0.8,1")]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_q, default_value = "2,4,inf")]
    pub q: Vec<QNorm>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub loops: LoopArgs,
    /// Iteration cap of the single-penalty runs.
    #[arg(long, default_value_t = 4000)]
    pub mono_max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub mono_stop_tol: f64,
    /// Stats JSON path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    /// JSON-lines results written by `sweep --save-solutions`.
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long, value_parser = parse_component, default_value = "u")]
    pub component: Component,
    /// Keep only feasible cells.
    #[arg(long)]
    pub feasible_only: bool,
    /// Problem JSON whose ground truth is projected as an extra row.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Coordinates CSV path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn parse_p(s: &str) -> Result<f64, String> {
    let p: f64 = s.trim().parse().map_err(|_| format!("invalid number {s:?}"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("p must lie in [0, 1], got {p}"));
    }
    Ok(p)
}

fn parse_q(s: &str) -> Result<QNorm, String> {
    s.parse().map_err(|e: unmix_core::Error| e.to_string())
}

fn parse_component(s: &str) -> Result<Component, String> {
    s.parse().map_err(|e: unmix_core::Error| e.to_string())
}
