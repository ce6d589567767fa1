use std::collections::HashMap;
use std::fmt::Write as _;

use crate::quantum::{Gate, GateKind};

use super::{is_identifier, BasisLabel, Circuit, CircuitError, QubitDecl, QubitKind};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

/// Parses the line-oriented circuit format:
///
/// ```text
/// qubit <name> <atom|photon> <e|g|H|V>
/// <h|x|y|z|s|t> <qubit>
/// <rx|ry|rz> <qubit> <angle>
/// u3 <qubit> <theta> <phi> <lambda>
/// cnot <control> <target>
/// ```
///
/// `#` starts a comment. Qubits must be declared before use.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut qubits: Vec<QubitDecl> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut gates = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line = line_no + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(head) = tokens.first() else { continue };
        let syntax = |column: usize, message: String| CircuitError::Syntax { line, column, message };

        if head.text == "qubit" {
            if tokens.len() != 4 {
                return Err(syntax(
                    head.column,
                    format!("`qubit` takes 3 fields, got {}", tokens.len() - 1),
                ));
            }
            let name = &tokens[1];
            if !is_identifier(name.text) {
                return Err(syntax(name.column, format!("invalid qubit name `{}`", name.text)));
            }
            if index.contains_key(name.text) {
                return Err(syntax(name.column, format!("duplicate declaration of `{}`", name.text)));
            }
            let kind: QubitKind = tokens[2].text.parse().map_err(|_| {
                syntax(
                    tokens[2].column,
                    format!("expected atom or photon, got `{}`", tokens[2].text),
                )
            })?;
            let initial: BasisLabel = tokens[3].text.parse().map_err(|_| {
                syntax(
                    tokens[3].column,
                    format!("expected e, g, H or V, got `{}`", tokens[3].text),
                )
            })?;
            if !initial.fits(kind) {
                return Err(syntax(tokens[3].column, format!("{kind} cannot start in {initial}")));
            }
            index.insert(name.text.to_owned(), qubits.len());
            qubits.push(QubitDecl {
                name: name.text.to_owned(),
                kind,
                initial,
            });
            continue;
        }

        let kind = GateKind::from_name(head.text).ok_or_else(|| CircuitError::UnknownGate {
            line,
            column: head.column,
            name: head.text.to_owned(),
        })?;
        let (arity, n_params) = (kind.arity(), kind.param_count());
        let expected = arity + n_params;
        if tokens.len() - 1 != expected {
            return Err(syntax(
                head.column,
                format!("`{}` takes {expected} field(s), got {}", head.text, tokens.len() - 1),
            ));
        }
        let mut operands = Vec::with_capacity(arity);
        for tok in &tokens[1..=arity] {
            let q = index.get(tok.text).ok_or_else(|| CircuitError::UndeclaredQubit {
                line,
                column: tok.column,
                name: tok.text.to_owned(),
            })?;
            operands.push(*q);
        }
        let mut params = Vec::with_capacity(n_params);
        for tok in &tokens[1 + arity..] {
            let v: f64 = tok
                .text
                .parse()
                .map_err(|_| syntax(tok.column, format!("invalid angle `{}`", tok.text)))?;
            params.push(v);
        }
        let gate = Gate::new(kind, params, operands).map_err(|e| syntax(head.column, e.to_string()))?;
        gates.push(gate);
    }
    Circuit::new(qubits, gates)
}

/// Canonical text: declarations first, then one gate per line, lowercase,
/// single spaces, angles in shortest round-trip form.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    for q in circuit.qubits() {
        let _ = writeln!(out, "qubit {} {} {}", q.name, q.kind, q.initial);
    }
    for g in circuit.gates() {
        out.push_str(g.kind().name());
        for &q in g.operands() {
            out.push(' ');
            out.push_str(&circuit.qubits()[q].name);
        }
        for p in g.params() {
            let _ = write!(out, " {p}");
        }
        out.push('\n');
    }
    out
}
