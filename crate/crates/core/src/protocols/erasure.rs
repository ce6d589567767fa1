use num_complex::Complex64;

use crate::circuit::{to_special_form, verify_equivalent, Circuit, QubitDecl};
use crate::quantum::{Gate, StateVector};

use super::{Check, ProtocolError, VerificationReport, PROTOCOL_TOL};

const N_QUBITS: usize = 4;

/// A two-codeword 4-qubit code with its Hadamard-dual basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureCode {
    pub logical_zero: StateVector,
    pub logical_one: StateVector,
    pub dual_zero: StateVector,
    pub dual_one: StateVector,
}

fn signed_sum(terms: &[(i8, &str)]) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << N_QUBITS];
    for &(sign, bits) in terms {
        amps[usize::from_str_radix(bits, 2).expect("binary label")] += f64::from(sign);
    }
    StateVector::normalized_from(amps).expect("nonzero codeword")
}

fn hadamard_all(state: &StateVector) -> StateVector {
    state
        .apply_all(&(0..N_QUBITS).map(Gate::h).collect::<Vec<_>>())
        .expect("4-qubit state")
}

impl ErasureCode {
    /// `|0000⟩+|1111⟩` and `|1001⟩+|0110⟩`, with the dual basis written out
    /// term by term.
    pub fn standard() -> Self {
        Self {
            logical_zero: signed_sum(&[(1, "0000"), (1, "1111")]),
            logical_one: signed_sum(&[(1, "1001"), (1, "0110")]),
            dual_zero: signed_sum(&[
                (1, "0000"),
                (1, "0011"),
                (1, "0101"),
                (1, "0110"),
                (1, "1001"),
                (1, "1010"),
                (1, "1100"),
                (1, "1111"),
            ]),
            dual_one: signed_sum(&[
                (1, "0000"),
                (-1, "0011"),
                (-1, "0101"),
                (1, "0110"),
                (1, "1001"),
                (-1, "1010"),
                (-1, "1100"),
                (1, "1111"),
            ]),
        }
    }

    /// Arbitrary codewords; the duals are computed as H⊗4 of them.
    pub fn from_codewords(logical_zero: StateVector, logical_one: StateVector) -> Self {
        Self {
            dual_zero: hadamard_all(&logical_zero),
            dual_one: hadamard_all(&logical_one),
            logical_zero,
            logical_one,
        }
    }

    /// The standard code with `|1_L⟩` replaced by `|1000⟩+|0110⟩`.
    pub fn sabotaged() -> Self {
        Self::from_codewords(
            signed_sum(&[(1, "0000"), (1, "1111")]),
            signed_sum(&[(1, "1000"), (1, "0110")]),
        )
    }

    pub fn logical(&self) -> [&StateVector; 2] {
        [&self.logical_zero, &self.logical_one]
    }
}

fn paulis(q: usize) -> [Gate; 4] {
    [Gate::rz(q, 0.0), Gate::x(q), Gate::y(q), Gate::z(q)]
}

fn apply_on(state: &StateVector, gate: &Gate) -> StateVector {
    state.apply(gate).expect("operand in range")
}

/// Largest violation of ⟨i|E†E′|j⟩ = c·δᵢⱼ over E, E′ ∈ {I,X,Y,Z} on `q`.
fn kl_violation(code: &ErasureCode, q: usize) -> f64 {
    let [zero, one] = code.logical();
    let mut worst: f64 = 0.0;
    for e in paulis(q) {
        for e2 in paulis(q) {
            let m = |a: &StateVector, b: &StateVector| -> Complex64 {
                apply_on(a, &e).inner(&apply_on(b, &e2)).expect("same dimension")
            };
            worst = worst
                .max(m(zero, one).norm())
                .max(m(one, zero).norm())
                .max((m(zero, zero) - m(one, one)).norm());
        }
    }
    worst
}

fn odd_weight_mass(state: &StateVector) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() % 2 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Knill-Laflamme conditions for every single erased position, corroborated
/// by the even-parity and dual-basis relations.
pub fn verify_erasure_correctable(code: &ErasureCode) -> VerificationReport {
    let mut report = VerificationReport::default();
    let [zero, one] = code.logical();
    let orth = |a: &StateVector, b: &StateVector| {
        let ab = a.inner(b).expect("same dimension").norm();
        (a.norm_sqr() - 1.0).abs().max((b.norm_sqr() - 1.0).abs()).max(ab)
    };
    report.push(Check::within(
        "logical basis orthonormal",
        orth(zero, one),
        PROTOCOL_TOL,
    ));
    report.push(Check::within(
        "dual basis orthonormal",
        orth(&code.dual_zero, &code.dual_one),
        PROTOCOL_TOL,
    ));
    for q in 0..N_QUBITS {
        report.push(Check::within(
            format!("KL conditions, erasure at qubit {}", q + 1),
            kl_violation(code, q),
            PROTOCOL_TOL,
        ));
    }
    report.push(Check::within(
        "codewords have even parity",
        odd_weight_mass(zero).max(odd_weight_mass(one)),
        PROTOCOL_TOL,
    ));
    let dual_dev = hadamard_all(zero)
        .distance_up_to_phase(&code.dual_zero)
        .expect("same dimension")
        .max(
            hadamard_all(one)
                .distance_up_to_phase(&code.dual_one)
                .expect("same dimension"),
        );
    report.push(Check::within(
        "dual basis is H⊗4 of logical basis",
        dual_dev,
        PROTOCOL_TOL,
    ));
    report
}

/// Encodes qubit 1 into `α|0_L⟩ + β|1_L⟩`. Qubit 2 is the atom; the first
/// CNOT is photon-controlled unless `special_form` relocates it onto the atom.
pub fn build_erasure_encoder(special_form: bool) -> Circuit {
    let qubits = vec![
        QubitDecl::photon("q1"),
        QubitDecl::atom("q2"),
        QubitDecl::photon("q3"),
        QubitDecl::photon("q4"),
    ];
    let gates = vec![
        Gate::cnot(0, 3),
        Gate::h(1),
        Gate::cnot(1, 0),
        Gate::cnot(1, 2),
        Gate::cnot(1, 3),
    ];
    let circuit = Circuit::new(qubits, gates).expect("valid circuit");
    if special_form {
        to_special_form(&circuit).expect("encoder rewrites")
    } else {
        circuit
    }
}

/// Truth table of the encoder (both forms), the rewrite's equivalence, and
/// the encoder-then-H⊗4 relation to the dual basis.
pub fn verify_erasure_encoder() -> Result<VerificationReport, ProtocolError> {
    let code = ErasureCode::standard();
    let mut report = VerificationReport::default();
    let plain = build_erasure_encoder(false);
    let special = build_erasure_encoder(true);
    let hadamards: Vec<Gate> = (0..N_QUBITS).map(Gate::h).collect();
    for (label, circuit) in [("", &plain), (" (special form)", &special)] {
        for (input, expected, dual, name) in [
            (0b0000, &code.logical_zero, &code.dual_zero, "|0000>"),
            (0b1000, &code.logical_one, &code.dual_one, "|1000>"),
        ] {
            let out = circuit.run(&StateVector::basis(N_QUBITS, input))?;
            report.push(Check::within(
                format!("{name} encodes{label}"),
                out.distance_up_to_phase(expected)?,
                PROTOCOL_TOL,
            ));
            let dual_out = out.apply_all(&hadamards)?;
            report.push(Check::within(
                format!("{name} then H⊗4 gives dual{label}"),
                dual_out.distance_up_to_phase(dual)?,
                PROTOCOL_TOL,
            ));
        }
    }
    let eq = verify_equivalent(&plain, &special, true)?;
    report.push(Check::flag("special form equivalent", eq.equivalent, eq.max_deviation));
    report.push(Check::flag(
        "special form syntactic check",
        special.is_special_form(),
        0.0,
    ));
    Ok(report)
}
