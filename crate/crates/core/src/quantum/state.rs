use num_complex::Complex64;

use super::{Gate, QuantumError, NORM_TOL};

/// Pure (possibly unnormalized) state of `n_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the basis index, so for two
/// qubits the amplitudes are ordered |00⟩, |01⟩, |10⟩, |11⟩ with qubit 0
/// written first.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    ///
    /// # Panics
    /// If `index >= 2^n_qubits`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    /// Basis state from per-qubit bits, qubit 0 first.
    pub fn from_bits(bits: &[u8]) -> Self {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b != 0));
        Self::basis(bits.len(), index)
    }

    /// Wraps raw amplitudes. The length must be a power of two and the norm
    /// must not exceed one (sub-normalized conditional states are allowed).
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QuantumError::BadLength(len));
        }
        let state = Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if !norm.is_finite() || norm > 1.0 + NORM_TOL {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm.
    pub fn normalized_from(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QuantumError::NotNormalized(norm * norm));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |self⟩ ⊗ |other⟩, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Largest entrywise deviation after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64, QuantumError> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn apply(&self, gate: &Gate) -> Result<StateVector, QuantumError> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<(), QuantumError> {
        check_operands(gate, self.n_qubits)?;
        apply_to_slice(&mut self.amplitudes, self.n_qubits, gate);
        Ok(())
    }

    pub fn apply_all<'a>(&self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<StateVector, QuantumError> {
        let mut out = self.clone();
        for g in gates {
            out.apply_in_place(g)?;
        }
        Ok(out)
    }

    /// Applies an arbitrary (not necessarily unitary) 4x4 operator to the
    /// ordered qubit pair `(a, b)`, `a` being the high bit of the local index.
    pub fn apply_two_qubit_operator(
        &mut self,
        op: &nalgebra::Matrix4<Complex64>,
        a: usize,
        b: usize,
    ) -> Result<(), QuantumError> {
        for q in [a, b] {
            if q >= self.n_qubits {
                return Err(QuantumError::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if a == b {
            return Err(QuantumError::DuplicateOperand(a));
        }
        let ma = bit_mask(self.n_qubits, a);
        let mb = bit_mask(self.n_qubits, b);
        for base in 0..self.amplitudes.len() {
            if base & (ma | mb) != 0 {
                continue;
            }
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let v: [Complex64; 4] = idx.map(|i| self.amplitudes[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amplitudes[i] = (0..4).map(|c| op[(r, c)] * v[c]).sum();
            }
        }
        Ok(())
    }
}

pub(crate) fn bit_mask(n_qubits: usize, q: usize) -> usize {
    1usize << (n_qubits - 1 - q)
}

pub(crate) fn check_operands(gate: &Gate, n_qubits: usize) -> Result<(), QuantumError> {
    if let Some(&q) = gate.operands().iter().find(|&&q| q >= n_qubits) {
        return Err(QuantumError::QubitOutOfRange { index: q, n_qubits });
    }
    Ok(())
}

/// In-place gate application on a raw amplitude buffer; operands must already
/// be validated.
pub(crate) fn apply_to_slice(amps: &mut [Complex64], n_qubits: usize, gate: &Gate) {
    if let Some((c, t)) = gate.cnot_pair() {
        let mc = bit_mask(n_qubits, c);
        let mt = bit_mask(n_qubits, t);
        for i in 0..amps.len() {
            if i & mc != 0 && i & mt == 0 {
                amps.swap(i, i | mt);
            }
        }
        return;
    }
    let m = gate.single_qubit_matrix().expect("one-qubit gate");
    let mask = bit_mask(n_qubits, gate.operands()[0]);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (a0, a1) = (amps[i], amps[i | mask]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// Free-function form of [`StateVector::apply`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector, QuantumError> {
    state.apply(gate)
}
