use thiserror::Error;

/// Errors produced anywhere in the anomaly pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid potential spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0} has no closed-form Fourier transform")]
    NotRepresentable(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error_estimate:e}")]
    Unconverged { value: f64, error_estimate: f64 },

    #[error("samples change sign; a power-law fit is meaningless")]
    MixedSign,

    #[error("power-law fit needs {needed} samples spanning a decade, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("fit residual {residual:.3e} too large for a power-law description")]
    NotPowerLaw { residual: f64 },

    #[error("channel terms do not decrease; tail fit impossible")]
    TailDivergent,

    #[error("empty lambda grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
