use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("position out of bounds: {0}")]
    OutOfBounds(String),

    #[error("empty equilibrium set")]
    EmptyEquilibriumSet,

    /// Price of anarchy / misinformation with a non-positive welfare
    /// denominator; reported as a typed error instead of a signed infinity.
    #[error("undefined metric: worst-case social welfare {0} is not positive")]
    UndefinedMetric(String),

    #[error("degenerate game: {0} (pass allow_degenerate to accept vertex equilibria)")]
    DegenerateGame(String),

    #[error("misinformation game is not canonical: {0}; run the inflation process first")]
    NonCanonical(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
