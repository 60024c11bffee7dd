use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the evaluated function.
    #[error("{what}: argument {value} outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: String,
    },

    /// A profile or parameter set violates a structural requirement.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// A call-site precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Time below the large-time threshold of the two-sided estimates.
    #[error("time t = {t} is not above the large-time threshold 30·t_b = {threshold}")]
    TimeBelowThreshold { t: f64, threshold: f64 },

    /// No regime-simplified estimate covers the requested point.
    #[error("outside simplified coverage: {0}; use the theorem-level envelope instead")]
    OutsideSimplifiedCoverage(String),

    /// Spatial grid too coarse for the requested Fourier inversion.
    #[error(
        "grid resolves frequencies only up to {nyquist:.4} but t·ψ reaches 36 at ξ = {required_xi:.4}; \
         need spacing ≤ {required_spacing:.3e}, i.e. at least {required_points} points on the same extent"
    )]
    Nyquist {
        nyquist: f64,
        required_xi: f64,
        required_spacing: f64,
        required_points: usize,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, expected: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            expected: expected.into(),
        }
    }

    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
