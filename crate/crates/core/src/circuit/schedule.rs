use std::collections::BTreeMap;

use crate::quantum::Gate;

use super::rewrite::{cancel_adjacent_hadamards, fresh_atom_name, relocate_control, swap_direction};
use super::{BasisLabel, Circuit, CircuitError, QubitDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    /// One-qubit gates only; free in the depth count.
    Local,
    /// Counterfactual CNOTs; each such layer costs one unit of depth.
    Cnot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub kind: LayerKind,
    /// Indices into [`Schedule::lowered`]'s gate list.
    pub gates: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Original gate index of each relocated CNOT → name of its atom.
    pub assignment: BTreeMap<usize, String>,
    /// The special-form circuit that the layers refer to.
    pub lowered: Circuit,
    /// Non-empty layers in execution order; local and CNOT layers alternate.
    pub layers: Vec<Layer>,
    /// Number of CNOT layers.
    pub depth: usize,
}

/// Slot of a gate placed as early as possible after its operands' previous
/// gates. Even slots hold one-qubit gates, odd slots hold CNOTs.
fn place(gate: &Gate, last: &mut [Option<usize>]) -> usize {
    let ready = gate
        .operands()
        .iter()
        .filter_map(|&q| last[q])
        .max()
        .map_or(0, |s| s + 1);
    let parity = usize::from(gate.is_cnot());
    let slot = if ready % 2 == parity { ready } else { ready + 1 };
    for &q in gate.operands() {
        last[q] = Some(slot);
    }
    slot
}

/// Lowers a circuit onto `atom_count` relocation atoms and layers it.
///
/// The atom pool is the declared atoms that start in |e⟩ and are never used
/// by the circuit, topped up with ancillas `__atom0`, `__atom1`, … Each
/// photon–photon CNOT goes to the pool atom that becomes free earliest,
/// lowest index on ties.
pub fn schedule(circuit: &Circuit, atom_count: usize) -> Result<Schedule, CircuitError> {
    if atom_count == 0 {
        return Err(CircuitError::NoAtoms);
    }
    let mut qubits = circuit.qubits().to_vec();
    let mut pool: Vec<usize> = (0..circuit.n_qubits())
        .filter(|&a| {
            let q = &circuit.qubits()[a];
            q.is_atom() && q.initial == BasisLabel::E && !circuit.gates().iter().any(|g| g.acts_on(a))
        })
        .take(atom_count)
        .collect();
    let mut next_name = 0;
    while pool.len() < atom_count {
        let (name, i) = fresh_atom_name(circuit, next_name);
        next_name = i + 1;
        qubits.push(QubitDecl::atom(&name));
        pool.push(qubits.len() - 1);
    }

    let mut last = vec![None; qubits.len()];
    let mut lowered = Vec::new();
    let mut assignment = BTreeMap::new();
    let emit = |gates: Vec<Gate>, last: &mut Vec<Option<usize>>, lowered: &mut Vec<Gate>| {
        for g in gates {
            place(&g, last);
            lowered.push(g);
        }
    };
    for (idx, g) in circuit.gates().iter().enumerate() {
        let Some((c, t)) = g.cnot_pair() else {
            emit(vec![g.clone()], &mut last, &mut lowered);
            continue;
        };
        match (circuit.is_atom(c), circuit.is_atom(t)) {
            (true, false) => emit(vec![g.clone()], &mut last, &mut lowered),
            (false, true) => emit(swap_direction(g)?, &mut last, &mut lowered),
            (true, true) => {
                return Err(CircuitError::AtomAtomCnot(
                    qubits[c].name.clone(),
                    qubits[t].name.clone(),
                ));
            }
            (false, false) => {
                let atom = *pool
                    .iter()
                    .min_by_key(|&&a| last[a].map_or(0, |s| s + 1))
                    .expect("pool is non-empty");
                assignment.insert(idx, qubits[atom].name.clone());
                emit(relocate_control(g, atom)?, &mut last, &mut lowered);
            }
        }
    }

    let lowered = Circuit::new(qubits, cancel_adjacent_hadamards(&lowered))?;
    let mut last = vec![None; lowered.n_qubits()];
    let mut slots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, g) in lowered.gates().iter().enumerate() {
        slots.entry(place(g, &mut last)).or_default().push(i);
    }
    let layers: Vec<Layer> = slots
        .into_iter()
        .map(|(slot, gates)| Layer {
            kind: if slot % 2 == 1 {
                LayerKind::Cnot
            } else {
                LayerKind::Local
            },
            gates,
        })
        .collect();
    let depth = layers.iter().filter(|l| l.kind == LayerKind::Cnot).count();
    Ok(Schedule {
        assignment,
        lowered,
        layers,
        depth,
    })
}

/// `n` photons `p0…p{n-1}` with CNOTs `p0→p1, p2→p3, …`.
pub fn paired_benchmark(n: usize) -> Result<Circuit, CircuitError> {
    if n == 0 || n % 2 == 1 {
        return Err(CircuitError::BadBenchmarkSize(n));
    }
    let qubits = (0..n).map(|i| QubitDecl::photon(&format!("p{i}"))).collect();
    let gates = (0..n / 2).map(|i| Gate::cnot(2 * i, 2 * i + 1)).collect();
    Circuit::new(qubits, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::verify_equivalent;

    fn assert_valid(s: &Schedule) {
        let mut order = Vec::new();
        for layer in &s.layers {
            let mut used = Vec::new();
            for &i in &layer.gates {
                let g = &s.lowered.gates()[i];
                assert_eq!(g.is_cnot(), layer.kind == LayerKind::Cnot);
                for &q in g.operands() {
                    assert!(!used.contains(&q), "qubit {q} used twice in a layer");
                    used.push(q);
                }
                order.push(i);
            }
        }
        let reordered: Vec<Gate> = order.iter().map(|&i| s.lowered.gates()[i].clone()).collect();
        let by_layers = Circuit::new(s.lowered.qubits().to_vec(), reordered).unwrap();
        assert!(verify_equivalent(&s.lowered, &by_layers, false).unwrap().equivalent);
    }

    #[test]
    fn benchmark_depths() {
        let c = paired_benchmark(8).unwrap();
        let four = schedule(&c, 4).unwrap();
        assert_eq!(four.depth, 3);
        assert_valid(&four);
        let one = schedule(&c, 1).unwrap();
        assert_eq!(one.depth, 12);
        assert_valid(&one);
        assert!(one.assignment.values().all(|a| a == "__atom0"));
        assert!(verify_equivalent(&c, &four.lowered, true).unwrap().equivalent);
        assert!(four.lowered.is_special_form());
    }

    #[test]
    fn depth_scales_with_atoms() {
        let c = paired_benchmark(8).unwrap();
        assert_eq!(schedule(&c, 2).unwrap().depth, 6);
        assert_eq!(schedule(&c, 8).unwrap().depth, 3);
    }

    #[test]
    fn empty_circuit_has_depth_zero() {
        let c = Circuit::new(vec![], vec![]).unwrap();
        let s = schedule(&c, 1).unwrap();
        assert_eq!(s.depth, 0);
        assert!(s.layers.is_empty());
    }

    #[test]
    fn errors() {
        let c = paired_benchmark(2).unwrap();
        assert!(matches!(schedule(&c, 0), Err(CircuitError::NoAtoms)));
        assert!(matches!(paired_benchmark(3), Err(CircuitError::BadBenchmarkSize(3))));
    }

    #[test]
    fn idle_declared_atom_is_used_first() {
        let mut q = vec![QubitDecl::atom("a")];
        q.extend((0..2).map(|i| QubitDecl::photon(&format!("p{i}"))));
        let c = Circuit::new(q, vec![Gate::cnot(1, 2)]).unwrap();
        let s = schedule(&c, 1).unwrap();
        assert_eq!(s.assignment[&0], "a");
        assert_eq!(s.lowered.n_qubits(), 3);
    }
}
