use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("power {requested} exceeds the configured limit {limit}")]
    PowerLimit { requested: u32, limit: u32 },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("parameter {0} is not bound to any gate")]
    UnboundParameter(usize),

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("expectation value has imaginary part {0:e}; operator is not Hermitian")]
    NonHermitian(f64),

    #[error("basis is not orthonormal (Gram deviation {0:e})")]
    NonOrthonormal(f64),

    #[error("{n_qubits} qubits exceeds the dense limit of {limit}")]
    SizeLimit { n_qubits: usize, limit: usize },

    #[error("moment matrix is numerically singular (condition number {cond:e})")]
    SingularMoments { cond: f64 },

    #[error("polynomial has complex roots (imaginary residue {residue:e})")]
    ComplexRoots { residue: f64 },

    #[error("derivative of the PDS polynomial vanishes at the selected root ({0:e})")]
    VanishingDenominator(f64),

    #[error("moment table holds orders up to {available}, need {required}")]
    MissingMoments { required: usize, available: usize },

    #[error("moment table carries no parameter gradients")]
    MissingGradients,

    #[error("gate at position {0} cannot be differentiated with the shift rule")]
    NotShiftable(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerical pipeline (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMoments { .. }
                | Error::ComplexRoots { .. }
                | Error::VanishingDenominator(_)
                | Error::NonHermitian(_)
        )
    }
}
