use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Vectors that must share a dimension do not.
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    Dimension {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    /// Adaptive quadrature gave up before reaching the requested tolerance.
    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error:e} > target {target:e} after {panels} panels"
    )]
    Quadrature {
        value: f64,
        error: f64,
        target: f64,
        panels: usize,
    },

    /// A fitted constant or slope could not be determined.
    #[error("fit failure in {op}: {detail}")]
    Fit { op: &'static str, detail: String },

    /// Bad run configuration (CLI flags or config file).
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn fit(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Fit {
            op,
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::Dimension { .. } => "dimension",
            Error::Quadrature { .. } => "quadrature",
            Error::Fit { .. } => "fit",
            Error::Config(_) => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
