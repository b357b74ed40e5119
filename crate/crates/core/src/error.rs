use thiserror::Error;

/// Errors raised across the simulation and analysis toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("observation undefined at non-positive height z = {z}")]
    ObservationUndefined { z: f64 },

    #[error("non-positive time delta {dt} between observations")]
    NonPositiveTimeDelta { dt: f64 },

    #[error("covariance window not full ({len}/{capacity})")]
    WindowNotFull { len: usize, capacity: usize },

    #[error("singular estimate: denominator {denominator} too close to zero")]
    SingularEstimate { denominator: f64 },

    #[error("drag model requires p > 0, got p = {p}")]
    DragRegime { p: f64 },

    #[error("unstable-gain denominator is non-positive ({denominator})")]
    NonPositiveDenominator { denominator: f64 },

    #[error("no {what} crossing found within the gain grid (max K = {k_max})")]
    NoCrossing { what: &'static str, k_max: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("simulation did not converge within t_max = {t_max} s")]
    NotConverged { t_max: f64 },

    #[error("touchdown during hover phase at t = {t} s")]
    TouchdownInHover { t: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from user-supplied configuration rather than
    /// from the numerics of a run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::Config(_) | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
