use num_complex::Complex64;

use crate::quantum::{QuantumError, StateVector, MAX_UNITARY_QUBITS};

use super::{Circuit, CircuitError};

/// Max entrywise deviation below which two circuits count as equivalent.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub max_deviation: f64,
}

/// Compares the unitaries of `a` and `b` up to one global phase, aligning
/// qubits by name.
///
/// Without `restrict`, both circuits must declare the same qubits. With
/// `restrict`, `b` may declare extra atoms (ancillas), and the comparison
/// only covers inputs in which every atom of `b` is in its declared initial
/// state; ancillas must also end in that state.
pub fn verify_equivalent(a: &Circuit, b: &Circuit, restrict: bool) -> Result<Equivalence, CircuitError> {
    let mut a_to_b = Vec::with_capacity(a.n_qubits());
    for q in a.qubits() {
        let j = b
            .index_of(&q.name)
            .ok_or_else(|| CircuitError::QubitSetMismatch(format!("`{}` missing from the second circuit", q.name)))?;
        if b.qubits()[j].kind != q.kind {
            return Err(CircuitError::QubitSetMismatch(format!("`{}` changes kind", q.name)));
        }
        a_to_b.push(j);
    }
    let extras: Vec<usize> = (0..b.n_qubits()).filter(|j| !a_to_b.contains(j)).collect();
    for &j in &extras {
        let q = &b.qubits()[j];
        if !restrict || !q.is_atom() {
            return Err(CircuitError::QubitSetMismatch(format!("unexpected qubit `{}`", q.name)));
        }
    }

    let (na, nb) = (a.n_qubits(), b.n_qubits());
    for n in [na, nb] {
        if n > MAX_UNITARY_QUBITS {
            return Err(QuantumError::TooManyQubits {
                n_qubits: n,
                max: MAX_UNITARY_QUBITS,
            }
            .into());
        }
    }
    let b_bit = |j: usize| 1usize << (nb - 1 - j);
    let ancilla_bits = extras
        .iter()
        .filter(|&&j| b.qubits()[j].initial.bit() == 1)
        .fold(0usize, |acc, &j| acc | b_bit(j));
    let embed = |ia: usize| -> usize {
        (0..na).fold(ancilla_bits, |acc, q| {
            if ia >> (na - 1 - q) & 1 == 1 {
                acc | b_bit(a_to_b[q])
            } else {
                acc
            }
        })
    };
    let column_allowed = |ia: usize| -> bool {
        !restrict
            || (0..na).all(|q| {
                let decl = &a.qubits()[q];
                !decl.is_atom() || (ia >> (na - 1 - q) & 1) as u8 == decl.initial.bit()
            })
    };

    let mut pairs: Vec<(Complex64, Complex64)> = Vec::new();
    for ja in (0..1usize << na).filter(|&j| column_allowed(j)) {
        let col_a = StateVector::basis(na, ja).apply_all(a.gates())?;
        let col_b = StateVector::basis(nb, embed(ja)).apply_all(b.gates())?;
        let mut expected = vec![Complex64::new(0.0, 0.0); 1 << nb];
        for (ia, amp) in col_a.amplitudes().iter().enumerate() {
            expected[embed(ia)] = *amp;
        }
        pairs.extend(col_b.amplitudes().iter().copied().zip(expected));
    }
    let overlap: Complex64 = pairs.iter().map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let max_deviation = pairs.iter().map(|(x, y)| (x * phase - y).norm()).fold(0.0, f64::max);
    Ok(Equivalence {
        equivalent: max_deviation < EQUIVALENCE_TOL,
        max_deviation,
    })
}
