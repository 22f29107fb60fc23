use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Bargmann index must be a positive finite number, got {0}")]
    InvalidBargmannIndex(f64),

    #[error("truncation dimension {got} is below the minimum {min}")]
    DimensionTooSmall { got: usize, min: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Bargmann index mismatch: {left} vs {right}")]
    IndexMismatch { left: f64, right: f64 },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("level {n} lies outside the usable window of {limit} levels")]
    LevelOutOfRange { n: usize, limit: usize },

    #[error("series does not converge for |zeta| = {0} (requires |zeta| < 1)")]
    NotConvergent(f64),

    #[error("truncation too small: tail mass {tail_mass:e} exceeds tolerance {tol:e}")]
    TruncationLeak { tail_mass: f64, tol: f64 },

    #[error(
        "above threshold: tilting undefined (f = {f}, 2*gamma = {two_gamma}); requires f > 2*gamma"
    )]
    AboveThreshold { f: f64, two_gamma: f64 },

    #[error("closed form singular: sigma = 1 within 1e-12; use the series route")]
    SingularClosedForm,

    #[error("state parameters differ from tilt parameters by {0:e}")]
    ParameterMismatch(f64),

    #[error("invalid quantum numbers N = {total}, m = {m}: {reason}")]
    InvalidQuantumNumbers {
        total: i64,
        m: i64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Physics-domain failures (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::AboveThreshold { .. } | Error::SingularClosedForm | Error::NotConvergent(_)
        )
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}
