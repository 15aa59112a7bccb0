use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// A truncated pmf could not reach the requested tail tolerance.
    #[error("truncation at M={m} too small: deficit {deficit:.3e} exceeds tolerance {tolerance:.3e}")]
    TruncationTooSmall {
        m: usize,
        deficit: f64,
        tolerance: f64,
    },

    /// A recursion was asked to step without enough history values.
    #[error("insufficient history: need {need} {what} values, got {got}")]
    InsufficientHistory {
        what: &'static str,
        need: usize,
        got: usize,
    },

    /// The requested conversion has no representation in the target
    /// parameterization (e.g. an initial pool rate eta_m <= 0).
    #[error("not representable: {0}")]
    Boundary(String),

    /// An operation that requires a subcritical regime was called on a
    /// supercritical (or critical) model.
    #[error("supercritical model: offspring mean {offspring_mean} (kappa*mu_psi = {kappa_mu}) is not < 1")]
    Supercritical { offspring_mean: f64, kappa_mu: f64 },

    /// A configuration file failed schema or invariant validation.
    /// `pointer` is a JSON pointer to the offending field.
    #[error("config error at `{pointer}`: {message}")]
    Config { pointer: String, message: String },

    /// A statistical check could not obtain a usable history.
    #[error("degenerate history after {retries} retries: {reason}")]
    DegenerateHistory { retries: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
