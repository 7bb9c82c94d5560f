use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::range::Span;

/// Datasets for the delayed self-coupled theta neuron.
///
/// Analytic commands work in units with |I| = 1.
#[derive(Debug, Parser)]
#[command(name = "thetadelay", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branches of periodic solutions (n, tau, T, gamma, stability).
    Branches(BranchesArgs),
    /// Saddle-node, homoclinic and cusp curves in the (kappa, tau) plane.
    Sncurves(SncurvesArgs),
    /// Floquet multipliers, the roots of the characteristic polynomial.
    Multipliers(MultipliersArgs),
    /// Spike trains from the event-driven or the smooth-pulse model.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    /// Excitable, I = -1.
    Neg,
    /// Oscillatory, I = +1.
    Pos,
}

impl Regime {
    pub fn current(self) -> f64 {
        match self {
            Regime::Neg => -1.0,
            Regime::Pos => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Neg => "neg",
            Regime::Pos => "pos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Delta,
    Smooth,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Delta => "delta",
            Model::Smooth => "smooth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    /// Integration step (default min(1e-4 tau, 1e-3)).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Exponent m of the pulse (1 - cos theta)^m.
    #[arg(long, default_value_t = 5)]
    pub pulse_exponent: u32,
}

#[derive(Debug, Args)]
pub struct BranchesArgs {
    #[arg(long, value_enum)]
    pub regime: Regime,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Largest branch index.
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Delay window `a:b`. The smooth model traces from a to b.
    #[arg(long, default_value = "0:10", allow_hyphen_values = true)]
    pub tau: Span,
    /// Points per branch (delta) or delays traced (smooth).
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "delta")]
    pub model: Model,
    /// Smooth model: spikes in the initial history.
    #[arg(long, default_value_t = 1)]
    pub seed_spikes: usize,
    /// Smooth model: integration chunk per delay value.
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    /// Smooth model: chunks allowed per delay before giving up.
    #[arg(long, default_value_t = 20)]
    pub max_chunks: usize,
    #[command(flatten)]
    pub smooth: SmoothArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SncurvesArgs {
    #[arg(long, value_enum)]
    pub regime: Regime,
    /// Comma-separated branch indices.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub n: Vec<usize>,
    /// Coupling window `a:b`.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Span,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MultipliersArgs {
    /// Branch index for a gamma sweep.
    #[arg(long)]
    pub n: Option<usize>,
    /// A value or a window `a:b` swept over `--grid` points.
    #[arg(long)]
    pub gamma: Option<Span>,
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// Branch-point mode: multipliers of every solution n = 0..=nmax.
    #[arg(long, value_enum)]
    pub regime: Option<Regime>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "delta")]
    pub model: Model,
    /// Bias current I (any sign, not zero).
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub current: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long)]
    pub tau: f64,
    /// Spikes in the initial history, equally spaced over the delay.
    #[arg(long, default_value_t = 1)]
    pub seed_spikes: usize,
    /// End time (default 200 tau for delta, 1000 for smooth).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Time discarded before measuring (default half the horizon).
    #[arg(long)]
    pub transient: Option<f64>,
    /// Also emit wrapped phase samples at this spacing.
    #[arg(long)]
    pub sample_dt: Option<f64>,
    #[command(flatten)]
    pub smooth: SmoothArgs,
    #[command(flatten)]
    pub output: Output,
}
