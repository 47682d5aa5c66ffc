use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liouville_core::units::MassUnit;

/// Parse a float, accepting a trailing `pi` as a factor (`12.6pi`, `pi`).
pub fn num(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (body, factor) = match s.strip_suffix("pi") {
        Some(b) => (b.trim_end_matches('*'), std::f64::consts::PI),
        None => (s, 1.0),
    };
    let v = match body {
        "" => 1.0,
        "-" => -1.0,
        b => b.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?,
    };
    Ok(v * factor)
}

#[derive(Parser, Debug)]
#[command(name = "liouville-lab", version, about = "Numerical experiments for weighted Liouville equations")]
#[command(allow_negative_numbers = true, propagate_version = true)]
pub struct Cli {
    /// Flat `key = value` file mirroring the flags; flags given on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, env = "LIOUVILLE_LAB_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for parallel sweeps
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Unit of masses read and written
    #[arg(long, global = true, value_enum, default_value_t = Units::Beta)]
    pub units: Units,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Rho,
    Beta,
}

impl From<Units> for MassUnit {
    fn from(u: Units) -> Self {
        match u {
            Units::Rho => MassUnit::Rho,
            Units::Beta => MassUnit::Beta,
        }
    }
}

pub const SUBCOMMANDS: [&str; 12] = [
    "shoot",
    "beta",
    "mass-curve",
    "rho-bar",
    "classify",
    "collapse",
    "limit-profile",
    "blowup-points",
    "masses",
    "height",
    "disk-solve",
    "scaling",
];

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate one radial solution and write its trace
    Shoot(PointArgs),
    /// Total mass of one radial solution
    Beta(BetaArgs),
    /// Sample a -> beta(a) and locate its minimum
    MassCurve(MassCurveArgs),
    /// Minimum of the mass curve
    RhoBar(SweepArgs),
    /// Solvable range and number of radial solutions
    Classify(ClassifyArgs),
    /// Fixed-mass branch under a vanishing regularization
    Collapse(CollapseArgs),
    /// Regular part of the singular limit of the collapse branch
    LimitProfile(LimitArgs),
    /// Blow-up point configuration
    BlowupPoints(BlowupArgs),
    /// Admissible local masses
    Masses(MassesArgs),
    /// Evaluate the height formula on JSON inputs
    Height(HeightArgs),
    /// Solve the local equation on the unit disk
    DiskSolve(DiskArgs),
    /// Continue the disk solution in t and record the height scaling
    Scaling(ScalingArgs),
}

/// Weight `(eps + r^2)^p (1 + r^2)^q`; `--alpha` alone gives `(1 + r^2)^alpha`.
#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct WeightArgs {
    #[arg(long, value_parser = num, default_value = "0")]
    pub alpha: f64,
    #[arg(long, value_parser = num)]
    pub eps: Option<f64>,
    #[arg(long, value_parser = num)]
    pub p: Option<f64>,
    #[arg(long, value_parser = num)]
    pub q: Option<f64>,
    /// Tight integration tolerances
    #[arg(long)]
    pub fine: bool,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct PointArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Central value v(0)
    #[arg(long, value_parser = num)]
    pub a: f64,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct BetaArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Also report beta'(a) from the linearized equation
    #[arg(long)]
    pub derivative: bool,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long, value_parser = num)]
    pub alpha: f64,
    #[arg(long, value_parser = num, default_value = "-30")]
    pub a_lo: f64,
    #[arg(long, value_parser = num, default_value = "30")]
    pub a_hi: f64,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long)]
    pub fine: bool,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct MassCurveArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Solve beta(a) = target (in the chosen units)
    #[arg(long, value_parser = num)]
    pub target: Option<f64>,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Probed targets for the multiplicity map
    #[arg(long, default_value_t = 60)]
    pub targets: usize,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct CollapseArgs {
    #[arg(long, value_parser = num, default_value = "2")]
    pub alpha: f64,
    /// Total mass in rho units (`12.6pi` accepted)
    #[arg(long, value_parser = num)]
    pub rho: f64,
    #[arg(long, value_parser = num, value_delimiter = ',', default_value = "1e-2,1e-4,1e-6,1e-8,1e-10,1e-12")]
    pub schedule: Vec<f64>,
    #[arg(long, value_parser = num, default_value = "0")]
    pub center: f64,
    #[arg(long, value_parser = num, default_value = "10")]
    pub below: f64,
    #[arg(long, value_parser = num, default_value = "50")]
    pub above: f64,
    #[arg(long, default_value_t = 32)]
    pub points: usize,
    #[arg(long)]
    pub fine: bool,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct LimitArgs {
    #[arg(long, value_parser = num, default_value = "2")]
    pub alpha: f64,
    #[arg(long, value_parser = num)]
    pub rho: f64,
    #[arg(long)]
    pub fine: bool,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct BlowupArgs {
    #[arg(long, value_parser = num)]
    pub alpha1: f64,
    #[arg(long, value_parser = num)]
    pub alpha2: f64,
    #[arg(long)]
    pub m: usize,
    /// Angle of the vortex axis; points are rotated by it on output
    #[arg(long, value_parser = num, default_value = "0")]
    pub rotation: f64,
    /// Allow non-integer strengths (no guarantee attached)
    #[arg(long)]
    pub extrapolate: bool,
    /// Cross-check with Newton from this many random starts (uses --seed)
    #[arg(long, default_value_t = 0)]
    pub oracle_starts: usize,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct MassesArgs {
    #[arg(long)]
    pub alpha1: u32,
    #[arg(long)]
    pub alpha2: u32,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct HeightArgs {
    /// JSON file holding the height inputs
    #[arg(long)]
    pub input: PathBuf,
    /// Point index; all points when omitted
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskCase {
    /// Two vortices at (±t, 0)
    Vortex,
    /// Manufactured regular bubble with W = 1
    Bubble,
    /// Manufactured singular bubble with W = |x|^2
    Singular,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Bubble,
    Zero,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct MeshArgs {
    /// Radial spacing in log r
    #[arg(long, value_parser = num, default_value = "0.05")]
    pub h: f64,
    #[arg(long, default_value_t = 32)]
    pub n_theta: usize,
    #[arg(long, value_parser = num, default_value = "1e-10")]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Dirichlet value on the unit circle
    #[arg(long, value_parser = num, default_value = "0")]
    pub boundary: f64,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct DiskArgs {
    #[arg(long, value_enum, default_value_t = DiskCase::Vortex)]
    pub case: DiskCase,
    #[arg(long, default_value_t = 1)]
    pub alpha1: u32,
    #[arg(long, default_value_t = 1)]
    pub alpha2: u32,
    #[arg(long, value_parser = num, default_value = "0.1")]
    pub t: f64,
    /// Scale of the manufactured bubble
    #[arg(long, value_parser = num, default_value = "2")]
    pub mu: f64,
    /// Innermost log-radius; fixed by t when omitted
    #[arg(long, value_parser = num)]
    pub t_min: Option<f64>,
    /// Number of radial intervals; overrides --h
    #[arg(long)]
    pub n_r: Option<usize>,
    #[arg(long, value_enum, default_value_t = Init::Bubble)]
    pub init: Init,
    #[command(flatten)]
    pub mesh: MeshArgs,
}

#[derive(Args, Debug, Clone)]
#[command(allow_negative_numbers = true)]
pub struct ScalingArgs {
    /// Common strength alpha1 = alpha2
    #[arg(long, default_value_t = 1)]
    pub alpha: u32,
    #[arg(long, value_parser = num, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub schedule: Vec<f64>,
    /// Maxima closer than this in y = x / t count once
    #[arg(long, value_parser = num, default_value = "0.5")]
    pub separation: f64,
    #[arg(long, value_parser = num, default_value = "0.5")]
    pub pohozaev_radius: f64,
    /// Start every step from the bubble guess
    #[arg(long)]
    pub cold: bool,
    #[command(flatten)]
    pub mesh: MeshArgs,
}
