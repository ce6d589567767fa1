use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{apply_to_slice, check_operands};
use super::{Gate, QuantumError};

/// Resource guard for dense unitaries.
pub const MAX_UNITARY_QUBITS: usize = 12;

/// Dense unitary of a gate sequence on `n_qubits`, gates applied in order
/// (the first gate is the rightmost factor).
pub fn gates_unitary(n_qubits: usize, gates: &[Gate]) -> Result<DMatrix<Complex64>, QuantumError> {
    if n_qubits > MAX_UNITARY_QUBITS {
        return Err(QuantumError::TooManyQubits {
            n_qubits,
            max: MAX_UNITARY_QUBITS,
        });
    }
    for g in gates {
        check_operands(g, n_qubits)?;
    }
    let dim = 1usize << n_qubits;
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        column.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        column[j] = Complex64::new(1.0, 0.0);
        for g in gates {
            apply_to_slice(&mut column, n_qubits, g);
        }
        for (i, a) in column.iter().enumerate() {
            u[(i, j)] = *a;
        }
    }
    Ok(u)
}

/// Global phase `e^{iφ}` maximizing `Re tr(e^{iφ} A† B)`, i.e. the phase with
/// which `A` best matches `B`.
pub fn best_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Max entrywise |e^{iφ}A − B| for the best global phase φ.
pub fn max_deviation_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<f64, QuantumError> {
    if a.shape() != b.shape() {
        return Err(QuantumError::DimensionMismatch(a.nrows(), b.nrows()));
    }
    let phase = best_phase(a, b);
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max))
}

/// ‖U†U − I‖_max
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    (prod - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Canonical two-qubit SWAP.
pub fn swap_matrix() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, c)] = Complex64::new(1.0, 0.0);
    }
    m
}
