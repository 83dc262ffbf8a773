use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {index} is mapped to infinity (denominator {denominator:e})")]
    PointAtInfinity { index: usize, denominator: f64 },

    #[error("invalid index triple ({i}, {j}, {k}) for a configuration of {n} points")]
    IndexError { i: usize, j: usize, k: usize, n: usize },

    #[error("degenerate configuration: {quantity} vanishes ({value:e})")]
    DegenerateConfiguration { quantity: String, value: f64 },

    #[error("singular homography: |det| = {det:e}")]
    SingularHomography { det: f64 },

    #[error("normalization system is rank deficient (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("moving frame could not be computed: {0}")]
    FrameSolveFailure(String),

    #[error("division by zero while evaluating {0}")]
    DivisionByZero(String),

    #[error("coboundary of arity {0} is not supported (k must be 1, 2 or 3)")]
    UnsupportedArity(usize),

    #[error("cochain of arity {expected} received {got} group elements")]
    ArityMismatch { expected: usize, got: usize },

    #[error("fractional power of a negative base ({base:e}^{exponent})")]
    FractionalPowerOfNegative { base: f64, exponent: f64 },

    #[error("evaluation error: {0}")]
    EvaluationError(String),

    #[error("configuration needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("parse error at byte {offset}: {message}")]
    ParseError { offset: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("the line at infinity of the homography crosses the image support")]
    HorizonCrossesSupport,

    #[error("invalid integral spec: {0}")]
    InvalidSpec(String),

    #[error("only {accepted:.3} of the sampled tuples were accepted (minimum 0.5)")]
    InsufficientAcceptance { accepted: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
