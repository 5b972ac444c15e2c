//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsg_core::strata::Stratum;
use qsg_core::tensors::TensorKind;

#[derive(Debug, Clone, Parser)]
#[command(name = "qsg", version, about = "Geometry of Hermitian operators and quantum states")]
pub struct Cli {
    /// RNG seed for every randomized step.
    #[arg(long, global = true, env = "QSG_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Run sequentially even when built with the `parallel` feature.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Poisson and Riemann-Jordan tensors.
    #[command(subcommand)]
    Tensors(TensorsCommand),
    /// Rank strata of positive matrices.
    #[command(subcommand)]
    Strata(StrataCommand),
    /// Kähler structure of unitary orbits.
    #[command(subcommand)]
    Kahler(KahlerCommand),
    /// Bipartite systems and the convex-roof measure.
    #[command(subcommand)]
    Entangle(EntangleCommand),
    /// Invariant batteries.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Lambda,
    R,
    Complex,
}

impl From<KindArg> for TensorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Lambda => TensorKind::Lambda,
            KindArg::R => TensorKind::R,
            KindArg::Complex => TensorKind::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StratumArg {
    Cone,
    Density,
}

impl From<StratumArg> for Stratum {
    fn from(s: StratumArg) -> Self {
        match s {
            StratumArg::Cone => Stratum::Cone,
            StratumArg::Density => Stratum::Density,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum TensorsCommand {
    /// Evaluate a tensor at a point on two covectors.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// `lambda` (Poisson), `r` (Jordan) or `complex` (`R + i Lambda`).
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Base point `xi` (matrix JSON).
    #[arg(long)]
    pub point: PathBuf,
    /// First covector (matrix JSON).
    #[arg(long)]
    pub a: PathBuf,
    /// Second covector (matrix JSON).
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Debug, Clone, Subcommand)]
pub enum StrataCommand {
    /// Chart coordinates, round trip and Jacobian rank at a base point.
    Chart(ChartArgs),
    /// Tangency of a sampled curve to its rank stratum.
    Tangency(TangencyArgs),
    /// Real dimension of the rank-k stratum of n x n matrices.
    Dim {
        /// Matrix size.
        n: usize,
        /// Rank.
        k: usize,
        #[arg(value_enum)]
        stratum: StratumArg,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ChartArgs {
    /// Base point: PSD matrix of rank |J| (matrix JSON).
    #[arg(long)]
    pub base: PathBuf,
    /// 1-based chart indices, comma separated.
    #[arg(long = "J", value_delimiter = ',', required = true)]
    pub j: Vec<usize>,
    /// Point to chart; defaults to the base.
    #[arg(long)]
    pub point: Option<PathBuf>,
    /// Finite-difference step of the Jacobian, relative to the smallest
    /// eigenvalue of the base J-block.
    #[arg(long, default_value_t = crate::batteries::JACOBIAN_STEP)]
    pub h: f64,
    /// Round-trip tolerance.
    #[arg(long, default_value_t = crate::batteries::CHART_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TangencyArgs {
    /// JSON lines of `{"t": .., "matrix": {..}}`, uniformly spaced in t.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long, value_enum, default_value_t = StratumArg::Cone)]
    pub stratum: StratumArg,
    /// Largest accepted kernel-block residual per sample.
    #[arg(long, default_value_t = crate::batteries::TANGENCY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum KahlerCommand {
    /// Run the Kähler battery at a point with random generators.
    Verify {
        /// Orbit point `xi` (matrix JSON).
        #[arg(long)]
        point: PathBuf,
        /// Random generator pairs.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Dimension of the first factor.
    #[arg(long, default_value_t = 2)]
    pub n1: usize,
    /// Defaults to `dim / n1`.
    #[arg(long)]
    pub n2: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum EntangleCommand {
    /// Upper bound on the convex roof with its realizing decomposition.
    Estimate {
        /// Density matrix (matrix JSON).
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        system: SystemArgs,
        /// Independent optimizer runs.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Iterations per run.
        #[arg(long, default_value_t = 2000)]
        max_iter: usize,
    },
    /// A random separable state.
    SampleSeparable {
        /// Dimension of the first factor.
        #[arg(long)]
        n1: usize,
        /// Dimension of the second factor.
        #[arg(long)]
        n2: usize,
        /// Number of product terms.
        #[arg(long)]
        terms: usize,
    },
    /// Positivity of the partial transpose on the second factor.
    Ppt {
        /// Density matrix (matrix JSON).
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        system: SystemArgs,
        /// Eigenvalues above `-tol` count as non-negative.
        #[arg(long, default_value_t = crate::batteries::PPT_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum VerifyCommand {
    /// Every module battery at dimension n.
    All {
        /// Matrix size for the single-space batteries.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Random trials per battery.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Convex-roof restarts.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
}
