use thiserror::Error;

/// Errors raised by the numerical kernels and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("division by zero entry at index {0}")]
    DivisionByZero(usize),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("singular matrix")]
    Singular,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown method `{given}`; valid methods: {valid}")]
    UnknownMethod { given: String, valid: String },

    #[error("singular support matrix for support set {0:?}")]
    SingularSupport(Vec<usize>),

    #[error("linear program {0}")]
    LpFailure(String),

    #[error("kernel of A_z is trivial with |Z| = {zeros} < n = {n}")]
    EmptyKernel { zeros: usize, n: usize },

    #[error("instance too large for exhaustive search: m = {m} (max {max_m}), n = {n} (max {max_n})")]
    TooLarge {
        m: usize,
        n: usize,
        max_m: usize,
        max_n: usize,
    },

    #[error("every row subset is singular")]
    AllSubsetsSingular,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
