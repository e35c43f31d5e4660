use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument zeta = {zeta} lies outside the series domain |zeta| <= {bound}")]
    SeriesDomain { zeta: f64, bound: f64 },

    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("order kappa = {0} is outside the extension family |kappa| < 1")]
    NotExtensionOrder(f64),

    #[error("radial coordinate must be positive and finite, got {0}")]
    NonPositiveRadius(f64),

    #[error("radial function carries no analytic second derivative")]
    MissingSecondDerivative,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
