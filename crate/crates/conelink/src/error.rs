use thiserror::Error;

/// Errors raised by the channel model, solvers, and simulation loop.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The requested minimum bit rate exceeds what the channel supports even
    /// at the near end of the search bracket.
    #[error(
        "unreachable rate: requested {min_bit_rate} bit/s but the channel peaks at \
         {max_achievable} bit/s over the bracket"
    )]
    UnreachableRate {
        min_bit_rate: f64,
        max_achievable: f64,
    },

    /// The root-finding bracket does not straddle the target value.
    #[error("bracket failure: no sign change over [{lo} m, {hi} m]")]
    BracketFailure { lo: f64, hi: f64 },

    /// A state component became non-finite during integration.
    #[error("divergence: state component `{component}` became non-finite")]
    NonFinite { component: &'static str },

    /// Divergence observed by the scenario loop, with the failing timestamp.
    #[error("divergence at t = {t} s: state component `{component}` became non-finite")]
    Divergence { component: &'static str, t: f64 },

    /// A metric window selects no samples.
    #[error("empty window: [{start} s, {end} s] selects no samples")]
    EmptyWindow { start: f64, end: f64 },

    /// A parameter set violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
