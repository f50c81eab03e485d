use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("refractive index is not differentiable at the branch seam ({thz} THz)")]
    RefractiveSeam { thz: f64 },

    #[error("frequency domain violation: {0}")]
    FrequencyDomain(String),

    #[error("decomposition requires the squeezing regime (commutator norm {kappa:+.6})")]
    UnsupportedRegime { kappa: f64 },

    #[error(
        "quadrature did not converge: estimate {estimate:.6e}, error {error:.3e} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("grid too coarse: commutator norm {kappa:+.6} deviates from ±1 by more than 1e-3")]
    GridResolution { kappa: f64 },

    #[error("numeric overflow in {0}")]
    Overflow(&'static str),

    #[error("smoothing parameters ({s_x}, {s_y}) exceed s̃ = {s_tilde}: covariance not positive definite")]
    NotPositiveDefinite { s_x: f64, s_y: f64, s_tilde: f64 },

    #[error("lattice extent too small: truncated mass {truncated_mass:.3e} ≥ 1e-3")]
    ExtentTooSmall { truncated_mass: f64 },

    #[error("analytic moments are not available for the {0} state; use lattice summation")]
    UnsupportedMoments(&'static str),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("statistics: {0}")]
    Statistics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 2 config/schema, 3 numerical non-convergence,
    /// 4 fit/statistics failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::InvalidParameter { .. }
            | Error::RefractiveSeam { .. }
            | Error::FrequencyDomain(_)
            | Error::UnsupportedRegime { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::UnsupportedMoments(_) => 2,
            Error::QuadratureNonConvergence { .. }
            | Error::GridResolution { .. }
            | Error::Overflow(_)
            | Error::ExtentTooSmall { .. } => 3,
            Error::Fit(_) | Error::Statistics(_) => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Io(std::io::Error::other(format!("csv: {other:?}"))),
        }
    }
}
