use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Validation failures shared by every module.
///
/// Each variant names the violated constraint so the CLI can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),
    #[error("register of {0} qubits exceeds the supported maximum of {1}")]
    TooManyQubits(usize, usize),
    #[error("non-finite rotation angle {0}")]
    NonFiniteAngle(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("insufficient data: {0}")]
    Underdetermined(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Checks that `value` lies in `[0, 1]`.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(name, format!("{value} is not a probability in [0, 1]")))
    }
}
