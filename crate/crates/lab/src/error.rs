use std::path::PathBuf;

/// Failures of a lab run, each with a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] liouville_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Invalid(String),
    #[error("newton oracle disagrees: {0}")]
    OracleDisagrees(String),
    #[error("{0}")]
    Usage(String),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// `1` for rejected inputs, `2` for numerical or IO failures, `64` for usage.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(e) if !e.is_numerical() => 1,
            LabError::Json(e) if e.is_data() || e.is_syntax() || e.is_eof() => 1,
            LabError::Config(_) | LabError::Invalid(_) => 1,
            LabError::Usage(_) => 64,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Core(e) => e.kind(),
            LabError::Io { .. } => "Io",
            LabError::Json(_) => "Json",
            LabError::Csv(_) => "Csv",
            LabError::Config(_) => "Config",
            LabError::Invalid(_) => "Invalid",
            LabError::OracleDisagrees(_) => "OracleDisagrees",
            LabError::Usage(_) => "Usage",
        }
    }

    /// One-line stderr record: `error kind=<Kind> code=<n> msg="<text>"`.
    pub fn record(&self) -> String {
        record(self.kind(), self.exit_code(), &self.to_string())
    }
}

pub fn record(kind: &str, code: i32, msg: &str) -> String {
    let msg: String = msg.lines().next().unwrap_or("").chars().flat_map(|c| c.escape_default()).collect();
    format!("error kind={kind} code={code} msg=\"{msg}\"")
}

pub type LabResult<T> = Result<T, LabError>;
