use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a run of the level-ratio estimator gave up.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AbortReason {
    /// The current weight multiplier left `[(2 Σw)^-1, 2 q(N)]`.
    AlphaOutOfRange { alpha: f64, lower: f64, upper: f64 },
    /// No sample landed in the level with `level` edges.
    EmptyLevel { level: usize },
}

impl std::fmt::Display for AbortReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbortReason::AlphaOutOfRange { alpha, lower, upper } => {
                write!(f, "alpha {alpha:.6e} outside [{lower:.6e}, {upper:.6e}]")
            }
            AbortReason::EmptyLevel { level } => {
                write!(f, "no sampled matching had {level} edges")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Qubit labels are 1-based, as in the Hamiltonian file.
    #[error("coupling ({i},{j}) is not ferromagnetic: |c| = {c_abs} > b = {b}")]
    NotFerromagnetic { i: usize, j: usize, b: f64, c_abs: f64 },

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: String,
        value: f64,
        range: &'static str,
    },

    #[error("inconsistent input: {0}")]
    InconsistentSize(String),

    #[error("{n} qubits exceed the dense cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },

    #[error("symmetric eigensolver did not converge")]
    EigensolveFailure,

    #[error("matrix logarithm needs a positive-definite input (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph with {vertices} vertices exceeds the exact-oracle cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },

    #[error("graph has more than {limit} matchings")]
    TooManyMatchings { limit: usize },

    #[error("graph has an odd number of vertices ({0})")]
    OddVertexCount(usize),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("invalid edge ({u},{v}): {reason}")]
    InvalidEdge { u: usize, v: usize, reason: String },

    #[error("circuit has no gates")]
    EmptyCircuit,

    #[error("estimator aborted at level {level}: {reason}")]
    AbortedAtLevel { level: usize, reason: AbortReason },

    #[error("{aborted} of {trials} independent runs aborted")]
    MajorityAborted { aborted: usize, trials: usize },

    #[error("projected work {projected:.3e} chain steps exceeds the budget {budget:.3e}; use practical mode")]
    BudgetExceeded { projected: f64, budget: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the randomized estimator (as opposed to bad input).
    pub fn is_abort(&self) -> bool {
        matches!(
            self,
            Error::AbortedAtLevel { .. } | Error::MajorityAborted { .. }
        )
    }
}
