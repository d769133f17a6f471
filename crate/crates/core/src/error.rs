use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit index {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("qubit list must not be empty")]
    EmptyQubitList,

    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("projector {index} is invalid: {reason}")]
    InvalidProjector { index: usize, reason: String },

    #[error("projectors do not sum to identity (max deviation {deviation:e})")]
    IncompleteProjectors { deviation: f64 },

    #[error("every outcome has probability below the degeneracy threshold")]
    DegenerateMeasurement,

    #[error("rng sample {0} outside [0, 1)")]
    RngSampleOutOfRange(f64),

    #[error("probability {name}={value} outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("requested factor is entangled with the rest of the state (purity {purity})")]
    NotProductState { purity: f64 },

    #[error("{observable} does not have {state} as eigenvector (residual {residual:e})")]
    EigenTableViolation {
        state: String,
        observable: String,
        residual: f64,
    },

    #[error("eigenvalue signature ({sz_sq}, {sx_sq}) matches no Bell state")]
    UnknownSignature { sz_sq: f64, sx_sq: f64 },
}
