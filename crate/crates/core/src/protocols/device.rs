use crate::circuit::{Circuit, QubitDecl};
use crate::gate_model::{
    compose_efficiency, compose_fidelity_bound, finite_map, gate_operator, AtomPhotonInput, CfGateParams, NoiseParams,
};
use crate::quantum::{Gate, StateVector};

use super::ProtocolError;

/// A special-form circuit rerun with every CNOT replaced by the finite gate.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceRun {
    /// Unnormalized conditional output.
    pub output: StateVector,
    pub ideal_output: StateVector,
    pub efficiency: f64,
    pub fidelity: f64,
    pub cnot_count: u32,
    /// Single-gate figures for the equal-superposition atom input.
    pub gate_efficiency: f64,
    pub gate_fidelity: f64,
    pub fidelity_bound: f64,
}

impl DeviceRun {
    /// `E_gate^K`, exact when every gate sees the equal-superposition input
    /// on an independent atom-photon pair.
    pub fn efficiency_product(&self) -> f64 {
        compose_efficiency(self.gate_efficiency, self.cnot_count)
    }
}

pub fn run_with_device(
    circuit: &Circuit,
    input: &StateVector,
    params: &CfGateParams,
    noise: &NoiseParams,
) -> Result<DeviceRun, ProtocolError> {
    let op = gate_operator(params, noise)?;
    let mut output = input.clone();
    for (i, gate) in circuit.gates().iter().enumerate() {
        match gate.cnot_pair() {
            Some((c, t)) if circuit.is_atom(c) && !circuit.is_atom(t) => {
                output.apply_two_qubit_operator(&op, c, t)?;
            }
            Some(_) => return Err(ProtocolError::NotSpecialForm(i)),
            None => output.apply_in_place(gate)?,
        }
    }
    let ideal_output = circuit.run(input)?;
    let efficiency = output.norm_sqr();
    let fidelity = if efficiency > 0.0 {
        (ideal_output.inner(&output)?.norm_sqr() / efficiency).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let gate = finite_map(&AtomPhotonInput::equal_superposition(), params, noise)?;
    let cnot_count = circuit.cnot_count() as u32;
    Ok(DeviceRun {
        output,
        ideal_output,
        efficiency,
        fidelity,
        cnot_count,
        gate_efficiency: gate.efficiency,
        gate_fidelity: gate.fidelity,
        fidelity_bound: compose_fidelity_bound(gate.fidelity, cnot_count),
    })
}

/// `k` independent pairs, each atom put into (|e⟩+|g⟩)/√2 and then used as
/// the control of one gate on its photon.
pub fn parallel_gate_circuit(k: usize) -> Circuit {
    let qubits = (0..k)
        .flat_map(|i| [QubitDecl::atom(&format!("a{i}")), QubitDecl::photon(&format!("p{i}"))])
        .collect();
    let gates = (0..k)
        .flat_map(|i| [Gate::h(2 * i), Gate::cnot(2 * i, 2 * i + 1)])
        .collect();
    Circuit::new(qubits, gates).expect("valid circuit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{build_communication_circuit, build_erasure_encoder, build_swap_circuit};

    fn device() -> (CfGateParams, NoiseParams) {
        (CfGateParams::new(10, 200).unwrap(), NoiseParams::IDEAL)
    }

    #[test]
    fn parallel_pairs_multiply_efficiency() {
        let (p, noise) = device();
        for k in 1..=3 {
            let c = parallel_gate_circuit(k);
            let run = run_with_device(&c, &c.initial_state(), &p, &noise).unwrap();
            assert!((run.efficiency - run.efficiency_product()).abs() < 1e-10);
            assert!((run.fidelity - run.gate_fidelity.powi(k as i32)).abs() < 1e-10);
            assert!(run.fidelity >= run.fidelity_bound - 1e-10);
        }
    }

    #[test]
    fn communication_on_device_meets_bound() {
        let (p, noise) = device();
        let c = build_communication_circuit();
        for idx in 0..4 {
            let run = run_with_device(&c, &StateVector::basis(2, idx), &p, &noise).unwrap();
            assert!(run.fidelity >= compose_fidelity_bound(run.gate_fidelity, 2) - 1e-10);
            assert!(run.efficiency <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn ideal_limit_reproduces_circuit() {
        let p = CfGateParams::new(2000, 200_000).unwrap();
        let c = build_swap_circuit();
        let run = run_with_device(&c, &StateVector::basis(2, 1), &p, &NoiseParams::IDEAL).unwrap();
        assert!(run.fidelity > 0.99);
    }

    #[test]
    fn rejects_photon_controlled_cnot() {
        let (p, noise) = device();
        let c = build_erasure_encoder(false);
        assert_eq!(
            run_with_device(&c, &c.initial_state(), &p, &noise),
            Err(ProtocolError::NotSpecialForm(0))
        );
    }
}
