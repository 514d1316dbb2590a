use thiserror::Error;

/// Crate-wide error type. Every fallible operation returns one of these
/// variants; the CLI maps them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Kahler metric failed its positive-definiteness check at an evaluation point.
    #[error("Kahler metric is not positive definite at the requested point: {0}")]
    NonPositiveDefinite(String),

    /// Re f(phi) is singular, so the black-hole potential matrix cannot be formed.
    #[error("gauge coupling matrix h = Re f is singular at the requested point")]
    SingularH,

    /// 1 - 4 V_BH V < 0: the effective potential would leave the real branch.
    #[error("effective potential discriminant is negative ({disc:e}); real branch unavailable")]
    ComplexBranch { disc: f64 },

    /// A background was queried outside its declared radial domain.
    #[error("radius {r} lies outside the background domain [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    /// A near-horizon background was queried at (or inside) its horizon radius.
    #[error("radius {r} hits the horizon singularity at r_h = {r_h}")]
    HorizonSingularity { r: f64, r_h: f64 },

    /// The asymptotic lapse has a zero or sign change inside the declared domain.
    #[error("lapse function is non-positive at r = {r} (value {value:e})")]
    NonPositiveLambda { r: f64, value: f64 },

    /// Background construction data violates a structural requirement.
    #[error("invalid background: {0}")]
    InvalidBackground(String),

    /// No contracting step width could be certified at this start radius.
    #[error("no contraction certificate: {0}")]
    NoContraction(String),

    /// Fixed-point iteration hit its iteration cap before reaching tolerance.
    #[error("fixed-point iteration did not reach tolerance within {iters} iterations (last distance {last:e})")]
    MaxIters { iters: usize, last: f64 },

    /// An iterate left the certified state-space ball.
    #[error("iterate escaped the certified ball of radius {ball} (norm {norm})")]
    BallEscape { norm: f64, ball: f64 },

    /// Adaptive step-size control collapsed below the representable minimum.
    #[error("step size underflow at r = {r} (step {h:e})")]
    StepUnderflow { r: f64, h: f64 },

    /// Least-squares basis was too ill-conditioned to trust the fit.
    #[error("asymptotic fit design matrix is ill conditioned (cond = {cond:e})")]
    IllConditionedFit { cond: f64 },

    /// A profile does not cover the radial range an operation needs.
    #[error("profile does not cover the required range: {0}")]
    ProfileGap(String),

    /// Newton search failed to converge.
    #[error("critical point search did not converge: {0}")]
    NoConvergence(String),

    /// A sampling-based estimator received no usable sample pairs.
    #[error("sampling produced no usable pairs ({0})")]
    EmptySample(String),

    /// A quantity that must be strictly positive was not.
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },

    /// Config text could not be parsed.
    #[error("config parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    /// Config parsed but violates the schema.
    #[error("config validation error in [{section}] {key}: {msg}")]
    ValidationError {
        section: String,
        key: String,
        msg: String,
    },

    /// Filesystem failure while reading inputs or writing artifacts.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
