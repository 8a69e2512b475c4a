//! Circuit files: one gate per line.
//!
//! ```text
//! qubits 3
//! H 0
//! CNOT 0 1
//! CP 1.5707963267948966 2 0
//! X 2
//! ```
//!
//! `qubits N` is optional; without it the register is one past the highest
//! qubit named. `#` starts a comment.

use std::fmt::Write;

use thiserror::Error;
use wcflobdd::quantum::{Circuit, Gate};

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct CircuitError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError { line, message: message.into() }
}

fn qubit(text: Option<&str>, line: usize) -> Result<usize, CircuitError> {
    let t = text.ok_or_else(|| err(line, "missing qubit index"))?;
    t.parse().map_err(|_| err(line, format!("bad qubit index `{t}`")))
}

fn angle(text: Option<&str>, line: usize) -> Result<f64, CircuitError> {
    let t = text.ok_or_else(|| err(line, "missing angle"))?;
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(err(line, format!("bad angle `{t}`"))),
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut gates: Vec<(usize, Gate)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        let mut tok = content.split_whitespace();
        let op = tok.next().unwrap_or_default();
        let gate = match op.to_ascii_uppercase().as_str() {
            "QUBITS" => {
                if declared.is_some() || !gates.is_empty() {
                    return Err(err(line, "`qubits` must come first and only once"));
                }
                let n = qubit(tok.next(), line)?;
                if n == 0 {
                    return Err(err(line, "a circuit needs at least one qubit"));
                }
                declared = Some((n, line));
                None
            }
            "H" => Some(Gate::H(qubit(tok.next(), line)?)),
            "X" => Some(Gate::X(qubit(tok.next(), line)?)),
            "CNOT" | "CX" => Some(Gate::Cnot(qubit(tok.next(), line)?, qubit(tok.next(), line)?)),
            "CP" => {
                let theta = angle(tok.next(), line)?;
                Some(Gate::Cp(theta, qubit(tok.next(), line)?, qubit(tok.next(), line)?))
            }
            _ => return Err(err(line, format!("unknown gate `{op}`"))),
        };
        if tok.next().is_some() {
            return Err(err(line, "trailing tokens"));
        }
        if let Some(g) = gate {
            if let Gate::Cnot(a, b) | Gate::Cp(_, a, b) = g {
                if a == b {
                    return Err(err(line, "control and target must differ"));
                }
            }
            gates.push((line, g));
        }
    }
    let highest = gates
        .iter()
        .flat_map(|(_, g)| match *g {
            Gate::H(q) | Gate::X(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cp(_, a, b) => vec![a, b],
            _ => vec![],
        })
        .max();
    let qubits = match (declared, highest) {
        (Some((n, _)), Some(h)) if h >= n => {
            let line = gates.iter().find(|(_, g)| mentions(g, h)).map_or(1, |(l, _)| *l);
            return Err(err(line, format!("qubit {h} is outside the {n}-qubit register")));
        }
        (Some((n, _)), _) => n,
        (None, Some(h)) => h + 1,
        (None, None) => return Err(err(1, "no gates and no `qubits` line")),
    };
    let mut circuit = Circuit::new(qubits);
    circuit.gates = gates.into_iter().map(|(_, g)| g).collect();
    Ok(circuit)
}

fn mentions(g: &Gate, q: usize) -> bool {
    match *g {
        Gate::H(a) | Gate::X(a) => a == q,
        Gate::Cnot(a, b) | Gate::Cp(_, a, b) => a == q || b == q,
        _ => false,
    }
}

/// Canonical text of a parsed circuit; parsing it gives the circuit back.
pub fn echo_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {}\n", c.qubits);
    for g in &c.gates {
        let _ = match *g {
            Gate::H(q) => writeln!(out, "H {q}"),
            Gate::X(q) => writeln!(out, "X {q}"),
            Gate::Cnot(a, b) => writeln!(out, "CNOT {a} {b}"),
            Gate::Cp(t, a, b) => writeln!(out, "CP {t:?} {a} {b}"),
            Gate::I => Ok(()),
            Gate::Phase(t, q) => writeln!(out, "# phase {t:?} on {q}"),
            Gate::Dense(_) => writeln!(out, "# dense gate"),
        };
    }
    out
}
