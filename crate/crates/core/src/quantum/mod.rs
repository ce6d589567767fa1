//! Small exact simulator: dense state vectors, density matrices and the
//! one-qubit + CNOT gate set. Everything else in the crate checks itself
//! against this module.
//!
//! Ordering convention: qubit 0 is the most significant bit of a basis index.
//! Logical encoding: atom |e⟩ ↔ 0, |g⟩ ↔ 1; photon |H⟩ ↔ 0, |V⟩ ↔ 1.

mod density;
mod gate;
mod state;
mod unitary;

pub use density::{fidelity_states, partial_trace, DensityMatrix};
pub use gate::{Gate, GateKind, Mat2};
pub use state::{apply_gate, StateVector};
pub use unitary::{
    best_phase, gates_unitary, max_deviation_up_to_phase, swap_matrix, unitarity_defect, MAX_UNITARY_QUBITS,
};

/// Norm tolerance for "normalized" states.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("{kind} takes {expected} operand(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} takes {expected} parameter(s), got {got}")]
    ParamCount {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("operand {0} used twice in one gate")]
    DuplicateOperand(usize),
    #[error("non-finite gate parameter {0}")]
    NonFiniteParam(f64),
    #[error("{n_qubits} qubits exceeds the dense budget of {max}")]
    TooManyQubits { n_qubits: usize, max: usize },
    #[error("length {0} is not a positive power of two")]
    BadLength(usize),
    #[error("state norm² {0} is not admissible")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeep,
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} is not one")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
}
