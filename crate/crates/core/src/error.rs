use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("qubit index {index} out of range 1..={num_qubits}")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("invalid subset: {0}")]
    InvalidSubset(&'static str),
    #[error("bit string length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),
    #[error("invalid game instance: {0}")]
    InvalidGame(&'static str),
    #[error("n = {n} exceeds the exhaustive enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("accuracy {0} is not a power of two 2^-r with 1 <= r <= 62")]
    NonDyadicAccuracy(f64),
    #[error("decoded amplitude vector has zero norm")]
    ZeroNorm,
    #[error("no outcome reaches the acceptance threshold {threshold}")]
    NoCandidate { threshold: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("bound not applicable: value {value} is vacuous (>= 1)")]
    BoundNotApplicable { value: f64 },
    #[error("malformed payload: {0}")]
    MalformedPayload(&'static str),
    #[error("parse error: {0}")]
    Parse(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
