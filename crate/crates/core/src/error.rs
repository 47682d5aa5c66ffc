use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the numerical core can report.
///
/// Variants fall in two classes, see [`Error::is_numerical`]: validation
/// errors (bad parameters) and numerical failures (a solver did not converge).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid control: {0}")]
    InvalidControl(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid inputs: {0}")]
    InvalidInputs(String),
    #[error("step size underflow at log-radius {t}")]
    DivergedStep { t: f64 },
    #[error("mass did not converge: slope {slope} at log-radius {t} (needs > {threshold})")]
    NotConverged { t: f64, slope: f64, threshold: f64 },
    #[error("no interior minimum on the sampled curve")]
    NoInteriorMin,
    #[error("target mass {target} is outside the sampled image")]
    NoSolution { target: f64 },
    #[error("no bracket for target mass {target} at eps = {eps}")]
    NoBracket { eps: f64, target: f64 },
    #[error("empty window: lower {lower} >= upper {upper}")]
    EmptyWindow { lower: f64, upper: f64 },
    #[error("residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("singular jacobian at row {row}")]
    SingularJacobian { row: usize },
    #[error("continuation branch lost at t = {t}")]
    BranchLost { t: f64 },
    #[error("zero structure incomplete: {zeros} zeros, {crits} critical points")]
    MissingZero { zeros: usize, crits: usize },
}

impl Error {
    /// True for failures of a numerical method, false for rejected inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidWeight(_)
                | Error::InvalidControl(_)
                | Error::InvalidParams(_)
                | Error::InvalidInputs(_)
                | Error::EmptyWindow { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::InvalidControl(_) => "InvalidControl",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidInputs(_) => "InvalidInputs",
            Error::DivergedStep { .. } => "DivergedStep",
            Error::NotConverged { .. } => "NotConverged",
            Error::NoInteriorMin => "NoInteriorMin",
            Error::NoSolution { .. } => "NoSolution",
            Error::NoBracket { .. } => "NoBracket",
            Error::EmptyWindow { .. } => "EmptyWindow",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::SingularJacobian { .. } => "SingularJacobian",
            Error::BranchLost { .. } => "BranchLost",
            Error::MissingZero { .. } => "MissingZero",
        }
    }
}
