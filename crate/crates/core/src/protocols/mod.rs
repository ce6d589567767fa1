//! Worked protocols on top of the circuit IR: atom-to-photon state transfer,
//! the counterfactual swap, the 4-qubit erasure code, and reruns of any
//! special-form circuit on the finite-device gate model.

mod device;
mod erasure;
mod transfer;

use std::fmt;

use crate::circuit::CircuitError;
use crate::gate_model::GateModelError;
use crate::quantum::QuantumError;

pub use device::{parallel_gate_circuit, run_with_device, DeviceRun};
pub use erasure::{build_erasure_encoder, verify_erasure_correctable, verify_erasure_encoder, ErasureCode};
pub use transfer::{
    build_communication_circuit, build_swap_circuit, run_state_transfer, verify_communication, verify_swap,
    TransferReport,
};

/// Tolerance for truth tables, KL conditions and transfer fidelity.
pub const PROTOCOL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("{photons} photon(s) cannot receive a {atoms}-qubit atom register")]
    RegisterMismatch { atoms: usize, photons: usize },
    #[error("state transfer of {0} qubits exceeds the dense simulation budget")]
    TooManyQubits(usize),
    #[error("gate {0} is a CNOT that is not atom-controlled and photon-targeted")]
    NotSpecialForm(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    GateModel(#[from] GateModelError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// One named check with its worst observed deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
}

impl Check {
    pub fn within(name: impl Into<String>, deviation: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: deviation < tol,
            max_deviation: deviation,
        }
    }

    /// A check that holds iff `passed`; `max_deviation` is informational.
    pub fn flag(name: impl Into<String>, passed: bool, max_deviation: f64) -> Self {
        Self {
            name: name.into(),
            passed,
            max_deviation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `check,result,max_deviation` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,result,max_deviation\n");
        for c in &self.checks {
            let result = if c.passed { "pass" } else { "fail" };
            out.push_str(&format!("{},{result},{:.16e}\n", csv_field(&c.name), c.max_deviation));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let result = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{result}  {}  (max deviation {:.3e})", c.name, c.max_deviation)?;
        }
        Ok(())
    }
}
