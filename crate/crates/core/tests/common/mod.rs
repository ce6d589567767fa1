#![allow(dead_code)]

use std::f64::consts::PI;

use cfqc_core::circuit::{Circuit, QubitDecl};
use cfqc_core::quantum::{Gate, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;

/// Any supported gate on `n` qubits (`n ≥ 2` for CNOTs to appear).
pub fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let angle = || -PI..PI;
    let one = (0..n, 0..10usize, angle(), angle(), angle()).prop_map(|(q, k, a, b, c)| match k {
        0 => Gate::h(q),
        1 => Gate::x(q),
        2 => Gate::y(q),
        3 => Gate::z(q),
        4 => Gate::s(q),
        5 => Gate::t(q),
        6 => Gate::rx(q, a),
        7 => Gate::ry(q, a),
        8 => Gate::rz(q, a),
        _ => Gate::u3(q, a, b, c),
    });
    if n < 2 {
        return one.boxed();
    }
    let cnot = (0..n, 1..n).prop_map(move |(c, d)| Gate::cnot(c, (c + d) % n));
    prop_oneof![2 => one, 1 => cnot].boxed()
}

pub fn gates(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Gate>> {
    prop::collection::vec(gate(n), 0..=max_len)
}

pub fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized_from(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

/// One atom `a` followed by 1..=3 photons, with up to 12 gates.
pub fn atom_photon_circuit() -> impl Strategy<Value = Circuit> {
    (1..=3usize).prop_flat_map(|photons| {
        let n = photons + 1;
        gates(n, 12).prop_map(move |gs| {
            let mut qubits = vec![QubitDecl::atom("a")];
            qubits.extend((0..photons).map(|i| QubitDecl::photon(&format!("p{i}"))));
            Circuit::new(qubits, gs).unwrap()
        })
    })
}
