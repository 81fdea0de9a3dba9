use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {abs_tol:e} within {max_subdivisions} subdivisions (estimated error {estimated_error:e})")]
    NonConvergence {
        abs_tol: f64,
        max_subdivisions: usize,
        estimated_error: f64,
    },

    /// The plug-in normaliser had fewer than ten expected successes.
    #[error("normaliser estimate {c_hat} from n = {n} draws is too small to divide by")]
    DegenerateNormalizer { c_hat: f64, n: usize },

    #[error("target unachievable: {0}")]
    Unachievable(String),

    #[error("iteration budget of {0} exhausted")]
    BudgetExceeded(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::UnknownPreset(_) | Error::Json(_) => 2,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 3,
        }
    }
}
