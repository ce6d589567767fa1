use crate::quantum::{Gate, GateKind};

use super::{BasisLabel, Circuit, CircuitError, QubitDecl};

fn expect_cnot(gate: &Gate) -> Result<(usize, usize), CircuitError> {
    gate.cnot_pair()
        .ok_or_else(|| CircuitError::NotCnot(gate.kind().to_string()))
}

/// `CNOT(c→t)` as `H t, H c, CNOT(t→c), H t, H c`.
pub fn swap_direction(gate: &Gate) -> Result<Vec<Gate>, CircuitError> {
    let (c, t) = expect_cnot(gate)?;
    Ok(vec![Gate::h(t), Gate::h(c), Gate::cnot(t, c), Gate::h(t), Gate::h(c)])
}

/// `CNOT(c→t)` routed through an ancilla atom that starts and ends in |e⟩:
/// `CNOT(c→atom); CNOT(atom→t); CNOT(c→atom)`, with the outer two reversed
/// so that every control is the atom.
pub fn relocate_control(gate: &Gate, atom: usize) -> Result<Vec<Gate>, CircuitError> {
    let (c, t) = expect_cnot(gate)?;
    if atom == c || atom == t {
        return Err(CircuitError::AtomIsOperand(atom));
    }
    let copy = swap_direction(&Gate::cnot(c, atom))?;
    let mut out = copy.clone();
    out.push(Gate::cnot(atom, t));
    out.extend(copy);
    Ok(out)
}

/// Removes pairs of Hadamards on the same qubit with no gate on that qubit
/// in between.
pub fn cancel_adjacent_hadamards(gates: &[Gate]) -> Vec<Gate> {
    let n = gates
        .iter()
        .flat_map(|g| g.operands().iter().copied())
        .max()
        .map_or(0, |m| m + 1);
    let mut kept: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); n];
    for g in gates {
        if g.kind() == GateKind::H {
            let q = g.operands()[0];
            if let Some(&last) = on_qubit[q].last() {
                if kept[last].as_ref().is_some_and(|p| p.kind() == GateKind::H) {
                    kept[last] = None;
                    on_qubit[q].pop();
                    continue;
                }
            }
        }
        for &q in g.operands() {
            on_qubit[q].push(kept.len());
        }
        kept.push(Some(g.clone()));
    }
    kept.into_iter().flatten().collect()
}

pub(crate) fn fresh_atom_name(circuit: &Circuit, start: usize) -> (String, usize) {
    let mut i = start;
    loop {
        let name = format!("__atom{i}");
        if circuit.index_of(&name).is_none() {
            return (name, i);
        }
        i += 1;
    }
}

/// Rewrites a circuit so that every CNOT is atom-controlled and
/// photon-targeted. Circuits already in special form are returned as is.
///
/// Photon→atom CNOTs are reversed. Photon–photon CNOTs are relocated onto
/// the first declared atom that starts in |e⟩ and is not touched by any
/// original gate before that point; if there is none, an ancilla `__atom0`
/// in |e⟩ is appended. Adjacent Hadamard pairs are then cancelled.
pub fn to_special_form(circuit: &Circuit) -> Result<Circuit, CircuitError> {
    if circuit.is_special_form() {
        return Ok(circuit.clone());
    }
    let mut qubits = circuit.qubits().to_vec();
    let mut touched = vec![false; qubits.len()];
    let mut ancilla: Option<usize> = None;
    let mut out = Vec::new();

    for g in circuit.gates() {
        match g.cnot_pair() {
            None => out.push(g.clone()),
            Some((c, t)) => match (circuit.is_atom(c), circuit.is_atom(t)) {
                (true, false) => out.push(g.clone()),
                (false, true) => out.extend(swap_direction(g)?),
                (true, true) => {
                    return Err(CircuitError::AtomAtomCnot(
                        qubits[c].name.clone(),
                        qubits[t].name.clone(),
                    ))
                }
                (false, false) => {
                    let candidate = (0..circuit.n_qubits()).find(|&a| {
                        let q = &circuit.qubits()[a];
                        q.is_atom() && q.initial == BasisLabel::E && !touched[a]
                    });
                    let atom = match candidate {
                        Some(a) => a,
                        None => *ancilla.get_or_insert_with(|| {
                            let (name, _) = fresh_atom_name(circuit, 0);
                            qubits.push(QubitDecl::atom(&name));
                            qubits.len() - 1
                        }),
                    };
                    out.extend(relocate_control(g, atom)?);
                }
            },
        }
        for &q in g.operands() {
            touched[q] = true;
        }
    }
    Circuit::new(qubits, cancel_adjacent_hadamards(&out))
}
