mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use boundary_steering::detector::Alignment;
use boundary_steering::sweep::{FigureId, Objective, SweepVariable};

/// Directional EPR steering harvested by two static detectors near a
/// perfectly reflecting plane. All quantities are in units of the switching
/// width σ.
#[derive(Parser)]
#[command(name = "boundary-steering", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration.
    Compute(ComputeOpts),
    /// Evaluate a one-dimensional grid of configurations.
    Sweep(SweepOpts),
    /// Locate a steering peak or a sudden death/birth point.
    Optimize(OptimizeOpts),
    /// Compare the closed forms with the brute-force integrals.
    Verify(VerifyOpts),
    /// Write the curve datasets of a preset plot, one file per curve.
    Figure(FigureOpts),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignmentArg {
    Parallel,
    Orthogonal,
}

impl From<AlignmentArg> for Alignment {
    fn from(a: AlignmentArg) -> Self {
        match a {
            AlignmentArg::Parallel => Alignment::Parallel,
            AlignmentArg::Orthogonal => Alignment::Orthogonal,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    /// Detector separation L.
    L,
    /// Distance Δz of detector A from the mirror.
    Dz,
    /// Energy gap of detector B.
    OmegaB,
}

impl From<AxisArg> for SweepVariable {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::L => SweepVariable::Separation,
            AxisArg::Dz => SweepVariable::BoundaryDistance,
            AxisArg::OmegaB => SweepVariable::OmegaB,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Sab,
    Sba,
    Asym,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Sab => Objective::Sab,
            ObjectiveArg::Sba => Objective::Sba,
            ObjectiveArg::Asym => Objective::Asymmetry,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    /// Steering from A to B.
    Ab,
    /// Steering from B to A.
    Ba,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl From<FigureArg> for FigureId {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig2 => FigureId::Fig2,
            FigureArg::Fig4 => FigureId::Fig4,
            FigureArg::Fig5 => FigureId::Fig5,
            FigureArg::Fig6 => FigureId::Fig6,
            FigureArg::Fig7 => FigureId::Fig7,
        }
    }
}

/// Physical parameters. Only the coupling has a default.
#[derive(Args, Clone)]
struct PhysicsOpts {
    #[arg(long, value_enum)]
    alignment: Option<AlignmentArg>,
    /// Energy gap of detector A.
    #[arg(long = "omega-a", allow_hyphen_values = true)]
    omega_a: Option<f64>,
    /// Energy gap of detector B; must not be smaller than the gap of A.
    #[arg(long = "omega-b", allow_hyphen_values = true)]
    omega_b: Option<f64>,
    /// Detector separation.
    #[arg(long = "l", allow_hyphen_values = true)]
    l: Option<f64>,
    /// Distance of detector A from the mirror.
    #[arg(long = "dz", allow_hyphen_values = true)]
    dz: Option<f64>,
    /// Coupling strength [default: 1].
    #[arg(long = "lambda", allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Swap the detector labels when --omega-b is smaller than --omega-a.
    #[arg(long)]
    relabel: bool,
}

#[derive(Args)]
struct OutputOpts {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComputeOpts {
    #[command(flatten)]
    physics: PhysicsOpts,
    /// Take the configuration from a JSON record written by `compute`.
    #[arg(long, conflicts_with_all = ["alignment", "omega_a", "omega_b", "l", "dz", "lambda"])]
    from: Option<PathBuf>,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct AxisOpts {
    /// Variable to sweep; its fixed-value flag is ignored.
    #[arg(long, value_enum)]
    axis: AxisArg,
}

#[derive(Args)]
struct SweepOpts {
    #[command(flatten)]
    physics: PhysicsOpts,
    #[command(flatten)]
    axis: AxisOpts,
    #[arg(long, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Logarithmic spacing.
    #[arg(long)]
    log: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeOpts {
    #[command(flatten)]
    physics: PhysicsOpts,
    #[command(flatten)]
    axis: AxisOpts,
    /// Search interval as `a,b`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    bracket: Vec<f64>,
    /// Quantity to maximise.
    #[arg(long, value_enum, required_unless_present = "transition")]
    objective: Option<ObjectiveArg>,
    /// Locate where steering in this direction dies or is born instead.
    #[arg(long, value_enum, conflicts_with = "objective")]
    transition: Option<DirectionArg>,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    /// Twenty points over both alignments.
    Default,
    /// Four points, for smoke tests.
    Small,
}

#[derive(Args)]
struct VerifyOpts {
    #[arg(long, value_enum, default_value = "default")]
    grid: GridArg,
    /// Half-width of the proper-time box.
    #[arg(long, default_value_t = 8.0)]
    truncation: f64,
    /// Gauss-Legendre nodes per axis.
    #[arg(long, default_value_t = 400)]
    nodes: usize,
    /// Regulator values, strictly decreasing.
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.01,0.005")]
    epsilons: Vec<f64>,
    /// Largest acceptable relative deviation.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Also write the deviations as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureOpts {
    #[arg(value_enum)]
    figure: FigureArg,
    /// Directory receiving one file per curve.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Energy gap of detector A.
    #[arg(long = "omega-a", default_value_t = 0.1)]
    omega_a: f64,
    /// Gaps of detector B, one curve each; per-figure presets when absent.
    #[arg(long = "omega-b", value_delimiter = ',')]
    omega_b: Option<Vec<f64>>,
    /// Boundary distance of the separation and gap sweeps.
    #[arg(long = "dz", default_value_t = 1.0)]
    dz: f64,
    /// Separation of the boundary-distance sweeps.
    #[arg(long = "small-l", default_value_t = 0.05)]
    small_l: f64,
    /// Separations of the gap sweeps.
    #[arg(long = "gap-sweep-l", value_delimiter = ',', default_value = "0.05,2")]
    gap_sweep_l: Vec<f64>,
    #[arg(long = "lambda", default_value_t = 1.0)]
    lambda: f64,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compute(opts) => commands::compute(opts),
        Command::Sweep(opts) => commands::sweep(opts),
        Command::Optimize(opts) => commands::optimize(opts),
        Command::Verify(opts) => commands::verify(opts),
        Command::Figure(opts) => commands::figure(opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
