use thiserror::Error;

/// Errors produced anywhere in the construction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed braid word token `{0}`")]
    MalformedWord(String),
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("empty braid word requires an explicit strand count")]
    TrivialNeedsStrands,
    #[error("interpolation needs at least one data point")]
    EmptyData,
    #[error("duplicate interpolation node at t = {0}")]
    DuplicateNode(f64),
    #[error("interpolation parameter alpha = {0} coincides with a data node")]
    SingularAlpha(f64),
    #[error("trigonometric polynomial not real on the line: imaginary residual {0:e}")]
    SymmetryViolation(f64),
    #[error("crossing at t = {t0} lies within {dist:e} of an interval boundary")]
    BoundaryCrossing { t0: f64, dist: f64 },
    #[error("conflicting data values at node t' = {0}")]
    DegenerateCrossing(f64),
    #[error("fractional exponent {numerator}/{denominator} survived expansion with relative magnitude {magnitude:e}")]
    CancellationFailure {
        numerator: i64,
        denominator: usize,
        magnitude: f64,
    },
    #[error("polynomial root solver failed to converge")]
    RootSolverFailure,
    #[error("root curves too close to separate; increase samples")]
    IncreaseSamples,
    #[error("verification failed at stage `{0}`")]
    VerificationFailure(String),
    #[error("delta search failed: {0}")]
    DeltaSearchFailure(String),
    #[error("no integer scale up to {0} meets the perturbation threshold")]
    IntegerizeFailure(u64),
    #[error("rescale target must be positive, got {0}")]
    InvalidScale(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            MalformedWord(_) | IndexOutOfRange { .. } | TrivialNeedsStrands | EmptyData
            | DuplicateNode(_) | SingularAlpha(_) | InvalidConfig(_) | InvalidInput(_)
            | InvalidScale(_) | Io(_) => 2,
            SymmetryViolation(_) | BoundaryCrossing { .. } | DegenerateCrossing(_)
            | CancellationFailure { .. } | RootSolverFailure | IncreaseSamples
            | VerificationFailure(_) | DeltaSearchFailure(_) => 3,
            IntegerizeFailure(_) => 4,
        }
    }
}
