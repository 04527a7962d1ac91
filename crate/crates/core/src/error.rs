use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {n}-qubit register")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("CNOT({control},{target}) is not an available ring pair on {n} qubits")]
    NonAdjacentCnot { control: usize, target: usize, n: usize },

    #[error("{n} qubits exceeds the configured maximum of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter count mismatch: expected {expected}, found {found}")]
    ParameterMismatch { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown built-in hamiltonian `{0}`")]
    UnknownHamiltonian(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("search-space budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
