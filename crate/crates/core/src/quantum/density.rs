use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{QuantumError, StateVector};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Density matrix of `n_qubits` qubits, same index ordering as [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, QuantumError> {
        let dim = entries.nrows();
        if dim == 0 || entries.ncols() != dim || !dim.is_power_of_two() {
            return Err(QuantumError::BadLength(dim));
        }
        let asym = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(QuantumError::NotHermitian(asym));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(QuantumError::BadTrace(trace.re));
        }
        let min_eig = hermitian_eigenvalues(&entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(QuantumError::NotPositive(min_eig));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            entries,
        })
    }

    /// |ψ⟩⟨ψ| for a normalized state.
    pub fn from_pure(state: &StateVector) -> Result<Self, QuantumError> {
        if !state.is_normalized() {
            return Err(QuantumError::NotNormalized(state.norm_sqr()));
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok(Self {
            n_qubits: state.n_qubits(),
            entries: &v * v.adjoint(),
        })
    }

    /// Σ p_i |ψ_i⟩⟨ψ_i|; weights must sum to one.
    pub fn mixture(ensemble: &[(f64, StateVector)]) -> Result<Self, QuantumError> {
        let Some((_, first)) = ensemble.first() else {
            return Err(QuantumError::BadLength(0));
        };
        let dim = first.dim();
        let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, psi) in ensemble {
            if psi.dim() != dim {
                return Err(QuantumError::DimensionMismatch(dim, psi.dim()));
            }
            let pure = Self::from_pure(psi)?;
            entries += pure.entries * Complex64::new(*p, 0.0);
        }
        Self::new(entries)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            entries: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn expectation(&self, state: &StateVector) -> Result<f64, QuantumError> {
        if state.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch(self.dim(), state.dim()));
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok((v.adjoint() * &self.entries * &v)[(0, 0)].re)
    }

    /// ρ ↦ UρU†
    pub fn evolve(&self, unitary: &DMatrix<Complex64>) -> Result<Self, QuantumError> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(QuantumError::DimensionMismatch(self.dim(), unitary.nrows()));
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            entries: unitary * &self.entries * unitary.adjoint(),
        })
    }

    /// ρ ⊗ σ
    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            entries: self.entries.kronecker(&other.entries),
        }
    }

    /// Max entrywise deviation from another density matrix.
    pub fn max_deviation(&self, other: &DensityMatrix) -> Result<f64, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok((&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// slightly negative eigenvalues from rounding are clamped to zero.
fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let roots = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

/// Reduced state on the qubits in `keep` (sorted, duplicates ignored); the
/// result orders the kept qubits by their original index.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, QuantumError> {
    let n = rho.n_qubits;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(QuantumError::EmptyKeep);
    }
    if let Some(&q) = keep.iter().find(|&&q| q >= n) {
        return Err(QuantumError::QubitOutOfRange { index: q, n_qubits: n });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            if kept_bits >> (keep.len() - 1 - pos) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if traced_bits >> (traced.len() - 1 - pos) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        idx
    };
    let dim = 1usize << keep.len();
    let env = 1usize << traced.len();
    let entries = DMatrix::from_fn(dim, dim, |i, j| {
        (0..env)
            .map(|t| rho.entries[(compose(i, t), compose(j, t))])
            .sum::<Complex64>()
    });
    Ok(DensityMatrix {
        n_qubits: keep.len(),
        entries,
    })
}

/// Uhlmann fidelity (tr √(√a b √a))², the squared convention, so that for a
/// pure `b = |φ⟩⟨φ|` it equals ⟨φ|a|φ⟩.
pub fn fidelity_states(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, QuantumError> {
    if a.dim() != b.dim() {
        return Err(QuantumError::DimensionMismatch(a.dim(), b.dim()));
    }
    let sa = psd_sqrt(&a.entries);
    let inner = &sa * &b.entries * &sa;
    let root_trace: f64 = hermitian_eigenvalues(&inner)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pure(amps: &[f64]) -> DensityMatrix {
        let s = StateVector::from_amplitudes(amps.iter().map(|&a| c(a)).collect()).unwrap();
        DensityMatrix::from_pure(&s).unwrap()
    }

    #[test]
    fn trace_out_second_qubit_of_product() {
        let rho = pure(&[1.0, 0.0, 0.0, 0.0]);
        let reduced = partial_trace(&rho, &[0]).unwrap();
        assert!(reduced.max_deviation(&pure(&[1.0, 0.0])).unwrap() < 1e-15);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let rho = pure(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
        let reduced = partial_trace(&rho, &[0]).unwrap();
        assert!(reduced.max_deviation(&DensityMatrix::maximally_mixed(1)).unwrap() < 1e-15);
    }

    #[test]
    fn empty_keep_is_an_error() {
        let rho = pure(&[1.0, 0.0]);
        assert!(matches!(partial_trace(&rho, &[]), Err(QuantumError::EmptyKeep)));
    }

    #[test]
    fn keep_order_follows_qubit_index() {
        // |01⟩: qubit 0 is |0⟩, qubit 1 is |1⟩.
        let rho = pure(&[0.0, 1.0, 0.0, 0.0]);
        let q1 = partial_trace(&rho, &[1]).unwrap();
        assert!(q1.max_deviation(&pure(&[0.0, 1.0])).unwrap() < 1e-15);
        let both = partial_trace(&rho, &[1, 0]).unwrap();
        assert!(both.max_deviation(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let zero = pure(&[1.0, 0.0]);
        let one = pure(&[0.0, 1.0]);
        let plus = pure(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!((fidelity_states(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity_states(&zero, &one).unwrap().abs() < 1e-12);
        assert!((fidelity_states(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((fidelity_states(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity_states(&mixed, &plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(1);
        let b = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            fidelity_states(&a, &b),
            Err(QuantumError::DimensionMismatch(2, 4))
        ));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(QuantumError::NotHermitian(_))
        ));
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.6)]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(QuantumError::BadTrace(_))));
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(QuantumError::NotPositive(_))
        ));
    }
}
