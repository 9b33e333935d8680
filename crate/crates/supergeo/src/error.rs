use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two Grassmann numbers (or superfunctions) over different generator
    /// counts were combined.
    #[error("generator count mismatch: {0} vs {1}")]
    GeneratorMismatch(usize, usize),

    /// Inversion of a Grassmann number whose body (degree-0 part) vanishes.
    #[error("not invertible: body of the Grassmann number is zero")]
    ZeroBody,

    /// A coordinate index was outside the chart/algebra dimensions.
    #[error("axis {axis} out of range (n={n}, m={m})")]
    AxisOutOfRange { axis: usize, n: usize, m: usize },

    /// An opaque coefficient was asked for a derivative order it cannot supply.
    #[error("opaque coefficient has no derivative access beyond order {max}")]
    NoDerivativeAccess { max: usize },

    /// Dimension mismatch between two objects that must agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Invalid parameters passed to a family constructor or solver.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A matrix that was expected to lie in the span of a basis did not.
    #[error("matrix not in basis span (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    /// An operation that requires a matrix realization was called on an
    /// algebra given by structure constants only.
    #[error("operation requires a matrix realization, but `{0}` has none")]
    NoRealization(String),

    /// A candidate metric failed validation.
    #[error("invalid graded metric: {0}")]
    InvalidMetric(String),

    /// The body of the metric Gram matrix was singular at an evaluation point.
    #[error("metric is degenerate at the evaluation point: {0}")]
    SingularMetric(String),

    /// A candidate involution failed one of its defining properties.
    #[error("invalid involution: {reason} (residual {residual:.3e})")]
    InvalidInvolution { reason: String, residual: f64 },

    /// A structural hypothesis of a theorem-backed construction failed.
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    /// A linear system that the theory predicts to be solvable was
    /// inconsistent or under-determined.
    #[error("linear system {0}")]
    BadLinearSystem(String),

    /// State blow-up or NaN during ODE integration.
    #[error("integration produced a non-finite state at t={t}")]
    NonFiniteState { t: f64 },

    /// Unknown catalog example.
    #[error("unknown catalog example `{0}`")]
    UnknownExample(String),

    /// Malformed input file or JSON document.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
