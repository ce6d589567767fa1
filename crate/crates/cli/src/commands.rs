use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use cfqc_core::circuit::{parse_circuit, schedule, serialize_circuit, to_special_form, verify_equivalent, Circuit};
use cfqc_core::gate_model::{CfGateParams, NoiseParams};
use cfqc_core::optics::{
    analyze_branch, build_interferometer, minimal_horizon, propagate, CertificationReport, GateVariant, OpticsError,
    ShutterState,
};
use cfqc_core::protocols::{
    build_communication_circuit, build_erasure_encoder, build_swap_circuit, run_with_device, verify_communication,
    verify_erasure_correctable, verify_erasure_encoder, verify_swap, ErasureCode, VerificationReport,
};
use cfqc_core::quantum::{StateVector, MAX_UNITARY_QUBITS};

use crate::{Code, Exit, Status};

pub struct CompileOptions<'a> {
    pub input: &'a Path,
    pub output: Option<&'a Path>,
    pub atoms: Option<usize>,
    pub verify: bool,
}

/// Returns the report and the circuit text to write.
pub fn compile(opts: &CompileOptions<'_>) -> Result<(String, String, bool), Exit> {
    let text = std::fs::read_to_string(opts.input)
        .with_context(|| format!("reading {}", opts.input.display()))
        .code(Status::Usage)?;
    let original = parse_circuit(&text)
        .with_context(|| opts.input.display().to_string())
        .code(Status::Usage)?;
    let (compiled, depth) = match opts.atoms {
        Some(k) => {
            let s = schedule(&original, k).code(Status::Usage)?;
            (s.lowered, Some((k, s.depth)))
        }
        None => (to_special_form(&original).code(Status::Usage)?, None),
    };

    let mut report = String::new();
    let _ = writeln!(
        report,
        "input: {} qubits, {} gates",
        original.n_qubits(),
        original.gates().len()
    );
    if original.is_special_form() && opts.atoms.is_none() {
        let _ = writeln!(
            report,
            "already special: every CNOT is atom-controlled and photon-targeted"
        );
    }
    let _ = writeln!(
        report,
        "CNOTs: {} before ({} photon-controlled), {} after",
        original.cnot_count(),
        original.photon_controlled_cnots(),
        compiled.cnot_count()
    );
    if compiled.n_qubits() > original.n_qubits() {
        let _ = writeln!(
            report,
            "ancilla atoms added: {}",
            compiled.n_qubits() - original.n_qubits()
        );
    }
    let mut verified = true;
    if !opts.verify {
        let _ = writeln!(report, "verification: skipped");
    } else if compiled.n_qubits() > MAX_UNITARY_QUBITS {
        let _ = writeln!(
            report,
            "verification: skipped ({} qubits exceeds {MAX_UNITARY_QUBITS})",
            compiled.n_qubits()
        );
    } else {
        let eq = verify_equivalent(&original, &compiled, true).code(Status::Verification)?;
        verified = eq.equivalent;
        let status = if eq.equivalent { "verified" } else { "FAILED" };
        let _ = writeln!(
            report,
            "verification: {status} (max deviation {:.3e})",
            eq.max_deviation
        );
    }
    if let Some((k, d)) = depth {
        let _ = writeln!(report, "schedule depth with {k} atom(s): {d} CNOT layers");
    }
    Ok((report, serialize_circuit(&compiled), verified))
}

/// Runs both switch branches concurrently and assembles the report.
pub fn certify(m: u32, n: u32, variant: GateVariant) -> Result<CertificationReport, Exit> {
    let params = CfGateParams::new(m, n).code(Status::Usage)?;
    let (block, pass) = rayon::join(
        || analyze_branch(&params, ShutterState::Block, variant),
        || analyze_branch(&params, ShutterState::Pass, variant),
    );
    let optics_code = |e: &OpticsError| match e {
        OpticsError::BudgetExceeded { .. } => Status::Budget,
        _ => Status::Usage,
    };
    let (block, pass) = match (block, pass) {
        (Ok(b), Ok(p)) => (b.2, p.2),
        (Err(e), _) | (_, Err(e)) => return Err(Exit::new(optics_code(&e), e.into())),
    };
    Ok(CertificationReport {
        params,
        variant,
        block,
        pass,
    })
}

/// Presence verdicts of the two reference interferometers.
pub fn interferometer_summary() -> Result<String, Exit> {
    let mut out = String::new();
    for (shutter, label) in [(true, "with blocking shutter"), (false, "open channel")] {
        let net = build_interferometer(shutter);
        let t = net
            .find("T")
            .ok_or_else(|| Exit::new(Status::Failure, anyhow!("no T detector")))?;
        let horizon = minimal_horizon(&net, t).code(Status::Failure)?;
        let map = propagate(&net, t, horizon).code(Status::Failure)?;
        let _ = writeln!(
            out,
            "interferometer {label}: {} channel presences",
            map.channel_presence(&net).len()
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExampleName {
    Communicate,
    Swap,
    Erasure,
}

pub struct Device {
    pub params: CfGateParams,
    pub noise: NoiseParams,
}

impl Device {
    pub fn parse(spec: &str) -> Result<Self, Exit> {
        let (m, n, gamma, eta) = crate::config::parse_device(spec).code(Status::Usage)?;
        Ok(Self {
            params: CfGateParams::new(m, n).code(Status::Usage)?,
            noise: NoiseParams::new(gamma, eta).code(Status::Usage)?,
        })
    }
}

fn example_circuit(name: ExampleName) -> (Circuit, Vec<usize>) {
    match name {
        ExampleName::Communicate => (build_communication_circuit(), vec![0b00, 0b10]),
        ExampleName::Swap => (build_swap_circuit(), vec![0b00, 0b01, 0b10, 0b11]),
        ExampleName::Erasure => (build_erasure_encoder(true), vec![0b0000, 0b1000]),
    }
}

pub fn example_report(name: ExampleName) -> Result<VerificationReport, Exit> {
    let report = match name {
        ExampleName::Communicate => verify_communication(),
        ExampleName::Swap => verify_swap(),
        ExampleName::Erasure => verify_erasure_encoder().map(|mut r| {
            r.extend(verify_erasure_correctable(&ErasureCode::standard()));
            r
        }),
    };
    report.code(Status::Failure)
}

/// Reruns the example's truth-table inputs on the finite device.
pub fn device_report(name: ExampleName, device: &Device) -> Result<String, Exit> {
    let (circuit, inputs) = example_circuit(name);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "device M={} N={} gamma={} eta={}",
        device.params.m(),
        device.params.n(),
        device.noise.gamma(),
        device.noise.eta()
    );
    for idx in inputs {
        let input = StateVector::basis(circuit.n_qubits(), idx);
        let run = run_with_device(&circuit, &input, &device.params, &device.noise).code(Status::Failure)?;
        let _ = writeln!(
            out,
            "input |{idx:0w$b}>: E = {:.6}, F = {:.6}, bound F >= {:.6} ({} gates, E_gate = {:.6}, F_gate = {:.6})",
            run.efficiency,
            run.fidelity,
            run.fidelity_bound,
            run.cnot_count,
            run.gate_efficiency,
            run.gate_fidelity,
            w = circuit.n_qubits()
        );
    }
    Ok(out)
}
