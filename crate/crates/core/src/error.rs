use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CpsError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters violate an assumption the requested formula relies on.
    #[error("unsupported regime: {0}")]
    Regime(String),

    /// A numerical contract was not met; carries the achieved residual.
    #[error("numerical error: {what} (residual {residual:.3e})")]
    Numerical { what: String, residual: f64 },

    /// Characteristic roots too close for the plain Vandermonde solve.
    #[error("degenerate sector: roots {0:?} coincide within tolerance")]
    DegenerateSector([f64; 3]),

    /// Conditional state is undefined because the branch has zero probability.
    #[error("conditional state undefined: outcome probability is zero")]
    ZeroProbability,

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CpsError>;

impl From<std::io::Error> for CpsError {
    fn from(e: std::io::Error) -> Self {
        CpsError::Io(e.to_string())
    }
}
