use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("CFL violation: {0}")]
    Cfl(String),
    #[error("insufficient data: {0}")]
    Data(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("{message} (residual {residual:e})")]
    Solver { message: String, residual: f64 },
    #[error("decomposition failed: heat residual {residual:e} exceeds {tolerance:e}")]
    Decomposition { residual: f64, tolerance: f64 },
    #[error("config error: {message}")]
    Config { key: Option<String>, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: Some(key.into()),
            message: message.into(),
        }
    }

    /// Short machine-readable tag used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Dimension(_) => "dimension",
            Error::Domain(_) => "domain",
            Error::Singular(_) => "singular",
            Error::Geometry(_) => "geometry",
            Error::Shape(_) => "shape",
            Error::Parity(_) => "parity",
            Error::Cfl(_) => "cfl",
            Error::Data(_) => "data",
            Error::Fit(_) => "fit",
            Error::Accuracy(_) => "accuracy",
            Error::Solver { .. } => "solver",
            Error::Decomposition { .. } => "decomposition",
            Error::Config { .. } => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 for rejected input or configuration, 3 for failures
    /// that happen while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Solver { .. }
            | Error::Decomposition { .. }
            | Error::Accuracy(_)
            | Error::Fit(_)
            | Error::Data(_)
            | Error::Io(_) => 3,
            _ => 2,
        }
    }
}
