use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: lower limit must be below the upper limit")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid decay scale {0}: must be positive")]
    InvalidDecayScale(f64),

    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tolerance:e} after {evaluations} evaluations")]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        evaluations: usize,
    },

    #[error("contour tail not negligible at |Im s| = {cutoff}: integrand magnitude {tail:e}")]
    TailNotNegligible { cutoff: f64, tail: f64 },

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("unsupported parabolic cylinder order {0}: only negative orders are available")]
    Order(f64),

    #[error("contour integral is not real: re = {re:e}, im = {im:e}")]
    RealnessViolation { re: f64, im: f64 },

    #[error("index n = {n} exceeds the {mode} precision cap of {cap}")]
    PrecisionBudgetExceeded { n: u32, cap: u32, mode: String },

    #[error("integrand does not decay near the origin: {0}")]
    Integrability(String),

    #[error("unknown check id `{0}`")]
    UnknownCheckId(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
