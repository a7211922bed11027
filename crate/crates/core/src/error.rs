use std::fmt;

/// Errors raised by the engine solvers, the sweep driver and the config parser.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "step size underflow at t = {t:e} (h = {h:e}); problem too stiff for tolerance {tol:e}"
    )]
    Stiffness { t: f64, h: f64, tol: f64 },

    #[error("steady state not reached by t = {t_max:e}: last stroboscopic delta {last_delta:e}")]
    Convergence { t_max: f64, last_delta: f64 },

    #[error("orbit has {samples} samples; at least {required} needed")]
    Resolution { samples: usize, required: usize },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("singular closed form at {point}: {what}")]
    Singular { what: &'static str, point: String },

    #[error("efficiency undefined: Qdot_h + P_c = {denominator:e}")]
    UndefinedEfficiency { denominator: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(line: usize, column: usize, message: impl fmt::Display) -> Self {
        Error::Config {
            line,
            column,
            message: message.to_string(),
        }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl fmt::Display) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.to_string(),
        }
    }
}
