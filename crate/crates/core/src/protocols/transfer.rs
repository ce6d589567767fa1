use crate::circuit::{Circuit, QubitDecl};
use crate::quantum::{
    fidelity_states, gates_unitary, max_deviation_up_to_phase, partial_trace, swap_matrix, DensityMatrix, Gate,
    StateVector, MAX_UNITARY_QUBITS,
};

use super::{Check, ProtocolError, VerificationReport, PROTOCOL_TOL};

/// Two CNOTs whose middle is direction-swapped by Hadamards: the atom's state
/// moves onto the photon and the atom returns to |e⟩.
pub fn build_communication_circuit() -> Circuit {
    let gates = vec![
        Gate::cnot(0, 1),
        Gate::h(0),
        Gate::h(1),
        Gate::cnot(0, 1),
        Gate::h(0),
        Gate::h(1),
    ];
    Circuit::new(vec![QubitDecl::atom("a"), QubitDecl::photon("p")], gates).expect("valid circuit")
}

pub fn build_swap_circuit() -> Circuit {
    let gates = vec![
        Gate::cnot(0, 1),
        Gate::h(0),
        Gate::h(1),
        Gate::cnot(0, 1),
        Gate::h(0),
        Gate::h(1),
        Gate::cnot(0, 1),
    ];
    Circuit::new(vec![QubitDecl::atom("a"), QubitDecl::photon("p")], gates).expect("valid circuit")
}

fn truth_case(circuit: &Circuit, input: usize, expected: usize) -> Result<Check, ProtocolError> {
    let n = circuit.n_qubits();
    let out = circuit.run(&StateVector::basis(n, input))?;
    let dev = out.distance_up_to_phase(&StateVector::basis(n, expected))?;
    let label = |i: usize| format!("{i:0n$b}");
    Ok(Check::within(
        format!("|{}> -> |{}>", label(input), label(expected)),
        dev,
        PROTOCOL_TOL,
    ))
}

pub fn verify_communication() -> Result<VerificationReport, ProtocolError> {
    let c = build_communication_circuit();
    let mut report = VerificationReport::default();
    report.push(truth_case(&c, 0b00, 0b00)?);
    report.push(truth_case(&c, 0b10, 0b01)?);
    report.push(Check::flag("special form", c.is_special_form(), 0.0));
    Ok(report)
}

pub fn verify_swap() -> Result<VerificationReport, ProtocolError> {
    let c = build_swap_circuit();
    let mut report = VerificationReport::default();
    for (input, expected) in [(0b00, 0b00), (0b01, 0b10), (0b10, 0b01), (0b11, 0b11)] {
        report.push(truth_case(&c, input, expected)?);
    }
    let dev = max_deviation_up_to_phase(&c.unitary()?, &swap_matrix())?;
    report.push(Check::within("unitary equals SWAP", dev, PROTOCOL_TOL));
    report.push(Check::flag("special form", c.is_special_form(), 0.0));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub input_state: DensityMatrix,
    pub output_state: DensityMatrix,
    pub transfer_fidelity: f64,
    pub atom_reset: bool,
}

/// Moves a `k`-qubit atom register onto `photons` fresh |H⟩ photons, one
/// communication circuit per pair. Qubits are ordered atoms first.
pub fn run_state_transfer(atom_state: &DensityMatrix, photons: usize) -> Result<TransferReport, ProtocolError> {
    let k = atom_state.n_qubits();
    if photons != k {
        return Err(ProtocolError::RegisterMismatch { atoms: k, photons });
    }
    if 2 * k > MAX_UNITARY_QUBITS {
        return Err(ProtocolError::TooManyQubits(2 * k));
    }
    let pair = build_communication_circuit();
    let gates: Vec<Gate> = (0..k)
        .flat_map(|i| {
            pair.gates()
                .iter()
                .map(move |g| g.remapped(|q| if q == 0 { i } else { k + i }))
        })
        .collect();
    let photon_register = DensityMatrix::from_pure(&StateVector::zero(k))?;
    let joint = atom_state
        .tensor(&photon_register)
        .evolve(&gates_unitary(2 * k, &gates)?)?;

    let atoms: Vec<usize> = (0..k).collect();
    let photon_qubits: Vec<usize> = (k..2 * k).collect();
    let output_state = partial_trace(&joint, &photon_qubits)?;
    let atom_left = partial_trace(&joint, &atoms)?;
    let ground = DensityMatrix::from_pure(&StateVector::zero(k))?;
    Ok(TransferReport {
        transfer_fidelity: fidelity_states(&output_state, atom_state)?,
        atom_reset: atom_left.max_deviation(&ground)? < PROTOCOL_TOL,
        input_state: atom_state.clone(),
        output_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn communication_truth_table() {
        let r = verify_communication().unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn communication_moves_superposition() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let input = StateVector::from_amplitudes(vec![beta, c(0.0, 0.0), alpha, c(0.0, 0.0)]).unwrap();
        let out = build_communication_circuit().run(&input).unwrap();
        let expected = StateVector::from_amplitudes(vec![beta, alpha, c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(out.distance_up_to_phase(&expected).unwrap() < 1e-12);
        let reference = gates_unitary(2, &[Gate::cnot(0, 1), Gate::cnot(1, 0)]).unwrap();
        let dev = max_deviation_up_to_phase(&build_communication_circuit().unitary().unwrap(), &reference).unwrap();
        assert!(dev < 1e-12);
    }

    #[test]
    fn swap_truth_table() {
        let r = verify_swap().unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.checks.len(), 6);
    }

    #[test]
    fn transfer_of_excited_atom() {
        let rho = DensityMatrix::from_pure(&StateVector::zero(1)).unwrap();
        let r = run_state_transfer(&rho, 1).unwrap();
        assert!(r.atom_reset);
        assert!((r.transfer_fidelity - 1.0).abs() < PROTOCOL_TOL);
    }

    #[test]
    fn transfer_of_classical_mixture() {
        let rho = DensityMatrix::mixture(&[(0.3, StateVector::basis(1, 0)), (0.7, StateVector::basis(1, 1))]).unwrap();
        let r = run_state_transfer(&rho, 1).unwrap();
        assert!((r.output_state.entries()[(0, 0)].re - 0.3).abs() < PROTOCOL_TOL);
        assert!((r.output_state.entries()[(1, 1)].re - 0.7).abs() < PROTOCOL_TOL);
        assert!(r.atom_reset);
    }

    #[test]
    fn transfer_of_bell_pair() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let rho = DensityMatrix::from_pure(&bell).unwrap();
        let r = run_state_transfer(&rho, 2).unwrap();
        assert!(r.output_state.max_deviation(&rho).unwrap() < PROTOCOL_TOL);
        assert!(r.atom_reset);
    }

    #[test]
    fn transfer_rejects_mismatched_register() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_eq!(
            run_state_transfer(&rho, 1),
            Err(ProtocolError::RegisterMismatch { atoms: 2, photons: 1 })
        );
        assert_eq!(
            run_state_transfer(&DensityMatrix::maximally_mixed(7), 7),
            Err(ProtocolError::TooManyQubits(14))
        );
    }

    fn state_2q() -> impl Strategy<Value = StateVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)
            .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
            .prop_map(|v| StateVector::normalized_from(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn swap_permutes_amplitudes(psi in state_2q()) {
            let out = build_swap_circuit().run(&psi).unwrap();
            let a = psi.amplitudes();
            let expected = StateVector::from_amplitudes(vec![a[0], a[2], a[1], a[3]]).unwrap();
            prop_assert!(out.distance_up_to_phase(&expected).unwrap() < PROTOCOL_TOL);
        }

        #[test]
        fn transfer_is_linear_on_ensembles(
            states in prop::collection::vec(state_2q(), 1..4),
            weights in prop::collection::vec(0.05f64..1.0, 4),
        ) {
            let total: f64 = weights[..states.len()].iter().sum();
            let ensemble: Vec<(f64, StateVector)> = states
                .iter()
                .zip(&weights)
                .map(|(s, w)| (w / total, s.clone()))
                .collect();
            let rho = DensityMatrix::mixture(&ensemble).unwrap();
            let r = run_state_transfer(&rho, 2).unwrap();
            prop_assert!((r.output_state.trace() - 1.0).abs() < PROTOCOL_TOL);
            prop_assert!(r.atom_reset);
            prop_assert!((r.transfer_fidelity - 1.0).abs() < PROTOCOL_TOL);

            let mut mixed = nalgebra::DMatrix::<Complex64>::zeros(4, 4);
            for (w, s) in &ensemble {
                let single = run_state_transfer(&DensityMatrix::from_pure(s).unwrap(), 2).unwrap();
                mixed += single.output_state.entries() * c(*w, 0.0);
            }
            let dev = (mixed - r.output_state.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(dev < PROTOCOL_TOL);
        }
    }
}
