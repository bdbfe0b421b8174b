use thiserror::Error;

/// Errors raised by the solver and its diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TecnoError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("ghost layer width {requested} not supported (must be 1 or 2 and at most {limit})")]
    GhostWidth { requested: usize, limit: usize },
    #[error("dissipation increment {0:e} is negative: ENO sign property breached")]
    SignPropertyBreach(f64),
    #[error("unknown flux `{0}`")]
    UnknownFlux(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("entropy pair has unbounded second derivative on [{lo}, {hi}]")]
    UnboundedEntropyCurvature { lo: f64, hi: f64 },
    #[error("problem `{0}` has no exact solution valid at the requested time")]
    NoOracle(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for TecnoError {
    fn from(e: std::io::Error) -> Self {
        TecnoError::Io(e.to_string())
    }
}

pub type Result<T, E = TecnoError> = std::result::Result<T, E>;
