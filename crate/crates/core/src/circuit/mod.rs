//! Circuit IR with typed qubits, a line-oriented text format, the rewrite
//! passes that bring any CNOT circuit into special form (every CNOT
//! atom-controlled and photon-targeted), an equivalence checker and a
//! multi-atom depth scheduler.

mod rewrite;
mod schedule;
mod text;
mod verify;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::quantum::{gates_unitary, Gate, QuantumError, StateVector};

pub use rewrite::{cancel_adjacent_hadamards, relocate_control, swap_direction, to_special_form};
pub use schedule::{paired_benchmark, schedule, Layer, LayerKind, Schedule};
pub use text::{parse_circuit, serialize_circuit};
pub use verify::{verify_equivalent, Equivalence, EQUIVALENCE_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown gate `{name}`")]
    UnknownGate { line: usize, column: usize, name: String },
    #[error("line {line}, column {column}: undeclared qubit `{name}`")]
    UndeclaredQubit { line: usize, column: usize, name: String },
    #[error("duplicate qubit declaration `{0}`")]
    DuplicateQubit(String),
    #[error("invalid qubit name `{0}`")]
    InvalidName(String),
    #[error("qubit `{name}`: {kind} cannot start in {initial}")]
    KindMismatch {
        name: String,
        kind: QubitKind,
        initial: BasisLabel,
    },
    #[error("gate operand {index} is not a declared qubit ({n_qubits} declared)")]
    OperandOutOfRange { index: usize, n_qubits: usize },
    #[error("expected a CNOT, got {0}")]
    NotCnot(String),
    #[error("relocation atom {0} is an operand of the gate")]
    AtomIsOperand(usize),
    #[error("CNOT between atoms `{0}` and `{1}` has no counterfactual realization")]
    AtomAtomCnot(String, String),
    #[error("qubit sets differ: {0}")]
    QubitSetMismatch(String),
    #[error("atom count must be at least 1")]
    NoAtoms,
    #[error("benchmark needs a positive even photon count, got {0}")]
    BadBenchmarkSize(usize),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitKind {
    Atom,
    Photon,
}

impl fmt::Display for QubitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QubitKind::Atom => "atom",
            QubitKind::Photon => "photon",
        })
    }
}

impl FromStr for QubitKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "atom" => Ok(QubitKind::Atom),
            "photon" => Ok(QubitKind::Photon),
            _ => Err(()),
        }
    }
}

/// Initial basis label. `E`/`H` encode logical 0, `G`/`V` logical 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    E,
    G,
    H,
    V,
}

impl BasisLabel {
    pub fn bit(self) -> u8 {
        match self {
            BasisLabel::E | BasisLabel::H => 0,
            BasisLabel::G | BasisLabel::V => 1,
        }
    }

    pub fn fits(self, kind: QubitKind) -> bool {
        matches!(
            (kind, self),
            (QubitKind::Atom, BasisLabel::E | BasisLabel::G) | (QubitKind::Photon, BasisLabel::H | BasisLabel::V)
        )
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisLabel::E => "e",
            BasisLabel::G => "g",
            BasisLabel::H => "H",
            BasisLabel::V => "V",
        })
    }
}

impl FromStr for BasisLabel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "e" => Ok(BasisLabel::E),
            "g" => Ok(BasisLabel::G),
            "H" => Ok(BasisLabel::H),
            "V" => Ok(BasisLabel::V),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitDecl {
    pub name: String,
    pub kind: QubitKind,
    pub initial: BasisLabel,
}

impl QubitDecl {
    pub fn atom(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            kind: QubitKind::Atom,
            initial: BasisLabel::E,
        }
    }

    pub fn photon(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            kind: QubitKind::Photon,
            initial: BasisLabel::H,
        }
    }

    pub fn is_atom(&self) -> bool {
        self.kind == QubitKind::Atom
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered qubit declarations plus a gate list over their indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: Vec<QubitDecl>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: Vec<QubitDecl>, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut seen = HashSet::new();
        for q in &qubits {
            if !is_identifier(&q.name) {
                return Err(CircuitError::InvalidName(q.name.clone()));
            }
            if !seen.insert(q.name.as_str()) {
                return Err(CircuitError::DuplicateQubit(q.name.clone()));
            }
            if !q.initial.fits(q.kind) {
                return Err(CircuitError::KindMismatch {
                    name: q.name.clone(),
                    kind: q.kind,
                    initial: q.initial,
                });
            }
        }
        for g in &gates {
            if let Some(&index) = g.operands().iter().find(|&&i| i >= qubits.len()) {
                return Err(CircuitError::OperandOutOfRange {
                    index,
                    n_qubits: qubits.len(),
                });
            }
        }
        Ok(Self { qubits, gates })
    }

    pub fn qubits(&self) -> &[QubitDecl] {
        &self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.qubits.iter().position(|q| q.name == name)
    }

    pub fn is_atom(&self, q: usize) -> bool {
        self.qubits[q].is_atom()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    /// Number of CNOTs whose control is a photon.
    pub fn photon_controlled_cnots(&self) -> usize {
        self.gates
            .iter()
            .filter_map(Gate::cnot_pair)
            .filter(|&(c, _)| !self.is_atom(c))
            .count()
    }

    /// Every CNOT has an atom control and a photon target.
    pub fn is_special_form(&self) -> bool {
        self.gates
            .iter()
            .filter_map(Gate::cnot_pair)
            .all(|(c, t)| self.is_atom(c) && !self.is_atom(t))
    }

    pub fn unitary(&self) -> Result<DMatrix<Complex64>, CircuitError> {
        Ok(gates_unitary(self.n_qubits(), &self.gates)?)
    }

    /// Product state of the declared initial labels.
    pub fn initial_state(&self) -> StateVector {
        let bits: Vec<u8> = self.qubits.iter().map(|q| q.initial.bit()).collect();
        StateVector::from_bits(&bits)
    }

    /// Runs the circuit on an arbitrary input state.
    pub fn run(&self, input: &StateVector) -> Result<StateVector, CircuitError> {
        if input.n_qubits() != self.n_qubits() {
            return Err(QuantumError::DimensionMismatch(1 << self.n_qubits(), input.dim()).into());
        }
        Ok(input.apply_all(&self.gates)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_labels() {
        let dup = Circuit::new(vec![QubitDecl::atom("a"), QubitDecl::photon("a")], vec![]);
        assert!(matches!(dup, Err(CircuitError::DuplicateQubit(_))));
        let bad = QubitDecl {
            name: "p".into(),
            kind: QubitKind::Photon,
            initial: BasisLabel::E,
        };
        assert!(matches!(
            Circuit::new(vec![bad], vec![]),
            Err(CircuitError::KindMismatch { .. })
        ));
        let range = Circuit::new(vec![QubitDecl::photon("p")], vec![Gate::h(1)]);
        assert!(matches!(range, Err(CircuitError::OperandOutOfRange { index: 1, .. })));
        assert!(matches!(
            Circuit::new(vec![QubitDecl::photon("1p")], vec![]),
            Err(CircuitError::InvalidName(_))
        ));
    }

    #[test]
    fn special_form_check() {
        let q = vec![QubitDecl::atom("a"), QubitDecl::photon("p")];
        assert!(Circuit::new(q.clone(), vec![Gate::cnot(0, 1)])
            .unwrap()
            .is_special_form());
        let rev = Circuit::new(q, vec![Gate::cnot(1, 0)]).unwrap();
        assert!(!rev.is_special_form());
        assert_eq!(rev.photon_controlled_cnots(), 1);
    }

    #[test]
    fn initial_state_uses_labels() {
        let q = vec![
            QubitDecl {
                name: "a".into(),
                kind: QubitKind::Atom,
                initial: BasisLabel::G,
            },
            QubitDecl::photon("p"),
        ];
        let c = Circuit::new(q, vec![]).unwrap();
        assert_eq!(c.initial_state(), StateVector::from_bits(&[1, 0]));
    }
}
