use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the forward and inverse pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid function: {0}")]
    InvalidGrid(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("propagation produced non-finite values at lambda = {lambda} (grid too coarse?)")]
    StepFailure { lambda: f64 },

    #[error("eigenvalue numbering is ambiguous: {0}")]
    NumberingAmbiguity(String),

    #[error(
        "assumption (iii) violated: S_{edge}(pi, lambda_{n}{k}) vanishes together with another \
         edge, the eigenvalue carries no information about q_1"
    )]
    AssumptionThreeViolation { edge: usize, n: usize, k: usize },

    #[error("too many exceptional g values ({count} > {limit}) in the first {window} entries of family k = 1")]
    TooManyExceptional { count: usize, limit: usize, window: usize },

    #[error("missing eigenvalue lambda_{n}{k} required by the moment system")]
    MissingEigenvalue { n: usize, k: usize },

    #[error("assumption (ii) violated: lambda_{n}{k} = {lambda} is not positive")]
    NonPositiveEigenvalue { n: usize, k: usize, lambda: f64 },

    #[error("vectors do not form a basis (min eig {min_eig:e}, max eig {max_eig:e}): {cause}")]
    NotABasis { min_eig: f64, max_eig: f64, cause: String },

    #[error("least-squares residual {residual:e} exceeds {limit:e}")]
    IllConditioned { residual: f64, limit: f64 },

    #[error("integral of K differs from omega by {mismatch:e}")]
    OmegaMismatch { mismatch: f64 },

    #[error("two spectra do not interlace: {0}")]
    InterlacingViolation(String),

    #[error("potential fit did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("algorithm step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with the index of the algorithm step that raised it.
    pub fn at_step(self, step: usize) -> Error {
        Error::AtStep { step, source: Box::new(self) }
    }

    /// The innermost error, with step wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn step(&self) -> Option<usize> {
        match self {
            Error::AtStep { step, .. } => Some(*step),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
