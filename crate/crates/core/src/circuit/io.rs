//! Line-oriented circuit text.
//!
//! ```text
//! # circuit inversion-d4 qubits=3
//! CNOT 0 1 polarity=0
//! TOFFOLI 0 2 1 polarity=01
//! CRZ 3 0 theta=-0.5
//! ORACLE 4 5 6 xor=1:3,1
//! ```
//!
//! Controls are listed before targets; the number of controls is implied by
//! the gate name. `polarity` is omitted when every control fires on 1.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use super::{Circuit, Control, Gate, GateKind, OracleTable, Polarity};
use crate::error::{Error, Result};

pub fn format_gate(gate: &Gate) -> String {
    let mut line = gate.name();
    for q in gate.qubits() {
        let _ = write!(line, " {q}");
    }
    match &gate.kind {
        GateKind::Oracle(table) => match table.as_ref() {
            OracleTable::Permutation(p) => {
                let _ = write!(line, " perm={}", join(p));
            }
            OracleTable::XorTable { inputs, values } => {
                let _ = write!(line, " xor={inputs}:{}", join(values));
            }
            OracleTable::Diagonal(ph) => {
                let _ = write!(line, " diag={}", join(ph));
            }
        },
        kind => {
            if let Some(theta) = kind.theta() {
                let _ = write!(line, " theta={theta}");
            }
        }
    }
    if gate.controls.iter().any(|c| c.polarity == Polarity::Zero) {
        let bits: String = gate
            .controls
            .iter()
            .map(|c| if c.polarity == Polarity::One { '1' } else { '0' })
            .collect();
        let _ = write!(line, " polarity={bits}");
    }
    line
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn format_circuit(circuit: &Circuit) -> String {
    let label: String = circuit
        .label
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    let mut out = format!("# circuit {label} qubits={}\n", circuit.qubit_count());
    for gate in circuit.gates() {
        out.push_str(&format_gate(gate));
        out.push('\n');
    }
    out
}

const BASES: [&str; 9] = ["ORACLE", "PHASE", "SWAP", "RZ", "RX", "XY", "X", "Z", "H"];

fn split_name(name: &str) -> Option<(&'static str, usize)> {
    match name {
        "CNOT" => return Some(("X", 1)),
        "TOFFOLI" => return Some(("X", 2)),
        _ => {}
    }
    for base in BASES {
        if let Some(prefix) = name.strip_suffix(base) {
            let controls = if prefix.is_empty() {
                0
            } else if prefix.chars().all(|c| c == 'C') {
                prefix.len()
            } else if let Some(digits) = prefix.strip_prefix('C') {
                match digits.parse() {
                    Ok(k) => k,
                    Err(_) => continue,
                }
            } else {
                continue;
            };
            return Some((base, controls));
        }
    }
    None
}

fn parse_list<T: std::str::FromStr>(text: &str, line: usize) -> Result<Vec<T>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.parse().map_err(|_| Error::Parse { line, message: format!("bad list entry `{t}`") }))
        .collect()
}

pub fn parse_gate(text: &str, line: usize) -> Result<Gate> {
    let err = |message: String| Error::Parse { line, message };
    let mut words = text.split_whitespace();
    let name = words.next().ok_or_else(|| err("empty gate line".into()))?;
    let (base, n_controls) = split_name(name).ok_or_else(|| err(format!("unknown gate `{name}`")))?;
    let mut qubits = Vec::new();
    let mut theta = None;
    let mut polarity = None;
    let mut table = None;
    for word in words {
        if let Some((key, value)) = word.split_once('=') {
            match key {
                "theta" => theta = Some(value.parse::<f64>().map_err(|_| err(format!("bad theta `{value}`")))?),
                "polarity" => polarity = Some(value.to_string()),
                "perm" => table = Some(OracleTable::Permutation(parse_list(value, line)?)),
                "diag" => table = Some(OracleTable::Diagonal(parse_list(value, line)?)),
                "xor" => {
                    let (inputs, values) =
                        value.split_once(':').ok_or_else(|| err("xor table needs `inputs:values`".into()))?;
                    let inputs = inputs.parse().map_err(|_| err(format!("bad input width `{inputs}`")))?;
                    table = Some(OracleTable::XorTable { inputs, values: parse_list(values, line)? });
                }
                _ => return Err(err(format!("unknown attribute `{key}`"))),
            }
        } else {
            qubits.push(word.parse::<usize>().map_err(|_| err(format!("bad qubit index `{word}`")))?);
        }
    }
    if qubits.len() <= n_controls {
        return Err(err(format!("{name} needs more than {n_controls} qubit(s)")));
    }
    let need_theta = || theta.ok_or_else(|| err(format!("{name} requires theta=")));
    let kind = match base {
        "X" => GateKind::X,
        "Z" => GateKind::Z,
        "H" => GateKind::H,
        "SWAP" => GateKind::Swap,
        "PHASE" => GateKind::Phase(need_theta()?),
        "RZ" => GateKind::Rz(need_theta()?),
        "XY" => GateKind::XY(need_theta()?),
        "RX" => {
            let turns = need_theta()? / FRAC_PI_2;
            if (turns - turns.round()).abs() > 1e-9 {
                return Err(err("RX angle must be a multiple of pi/2".into()));
            }
            GateKind::Rx { quarter_turns: turns.round().rem_euclid(8.0) as u8 }
        }
        "ORACLE" => GateKind::Oracle(std::sync::Arc::new(
            table.ok_or_else(|| err("ORACLE requires perm=, xor= or diag=".into()))?,
        )),
        _ => unreachable!(),
    };
    let polarities: Vec<Polarity> = match polarity {
        None => vec![Polarity::One; n_controls],
        Some(bits) => bits
            .chars()
            .map(|c| match c {
                '0' => Ok(Polarity::Zero),
                '1' => Ok(Polarity::One),
                _ => Err(err(format!("bad polarity bit `{c}`"))),
            })
            .collect::<Result<_>>()?,
    };
    if polarities.len() != n_controls {
        return Err(err(format!("{name} has {n_controls} control(s) but polarity lists {}", polarities.len())));
    }
    let controls = qubits[..n_controls]
        .iter()
        .zip(polarities)
        .map(|(&qubit, polarity)| Control { qubit, polarity })
        .collect();
    Ok(Gate { kind, targets: qubits[n_controls..].to_vec(), controls })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut declared = None;
    let mut label = String::new();
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("circuit") {
                for w in words {
                    match w.strip_prefix("qubits=") {
                        Some(n) => {
                            declared = Some(n.parse::<usize>().map_err(|_| Error::Parse {
                                line: i + 1,
                                message: format!("bad qubit count `{n}`"),
                            })?)
                        }
                        None => label = w.to_string(),
                    }
                }
            }
            continue;
        }
        gates.push((i + 1, parse_gate(line, i + 1)?));
    }
    let width = declared.unwrap_or_else(|| {
        gates.iter().flat_map(|(_, g)| g.qubits()).max().map_or(0, |q| q + 1)
    });
    let mut circuit = Circuit::new(width, label);
    for (line, gate) in gates {
        circuit.push(gate).map_err(|e| Error::Parse { line, message: e.to_string() })?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_every_field() {
        let mut c = Circuit::new(7, "demo circuit");
        c.add(Gate::cnot(0, 1).with_controls(&[]));
        c.add(Gate::x(2).with_controls(&[Control::on0(0), Control::on1(1)]));
        c.add(Gate::rz(3, -0.123456789012345).controlled_by(Control::on0(4)));
        c.add(Gate::rx(5, 3));
        c.add(Gate::xy(5, 6, 0.25));
        c.add(Gate::ccphase(0, 1, 2, std::f64::consts::PI));
        c.add(Gate::oracle(OracleTable::XorTable { inputs: 1, values: vec![3, 1] }, vec![4, 5, 6]));
        c.add(Gate::oracle(OracleTable::Permutation(vec![1, 0, 3, 2]), vec![0, 1]));
        c.add(Gate::oracle(OracleTable::Diagonal(vec![0.0, 0.5]), vec![2]).controlled_by(Control::on1(3)));
        c.add(Gate::x(6).with_controls(&[Control::on1(0), Control::on0(1), Control::on1(2)]));
        let text = format_circuit(&c);
        assert!(text.starts_with("# circuit demo_circuit qubits=7\n"));
        assert!(text.contains("CRZ 4 3 theta=-0.123456789012345 polarity=0"));
        assert!(text.contains("C3X 0 1 2 6 polarity=101"));
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back.gates(), c.gates());
        assert_eq!(back.qubit_count(), 7);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "# circuit x qubits=2\nCNOT 0 1\nFOO 1\n";
        assert!(matches!(parse_circuit(bad), Err(Error::Parse { line: 3, .. })));
        let missing = "RZ 0\n";
        assert!(matches!(parse_circuit(missing), Err(Error::Parse { line: 1, .. })));
        let out_of_range = "# circuit x qubits=2\nCNOT 0 2\n";
        assert!(matches!(parse_circuit(out_of_range), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn width_inferred_without_header() {
        let c = parse_circuit("H 0\nCNOT 0 3\n").unwrap();
        assert_eq!(c.qubit_count(), 4);
    }
}
