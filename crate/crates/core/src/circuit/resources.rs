use std::collections::BTreeMap;

use serde::Serialize;

use super::Circuit;

/// Gate tallies for a circuit.
///
/// `two_qubit_equivalents` counts every two-qubit gate once and every
/// three-qubit gate as six. Oracles and gates on four or more qubits are
/// tallied in `oracles` and `wide_gates` and left out of the sum.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub counts: BTreeMap<String, usize>,
    pub total_gates: usize,
    pub single_qubit: usize,
    pub two_qubit: usize,
    pub three_qubit: usize,
    pub wide_gates: usize,
    pub oracles: usize,
    pub two_qubit_equivalents: usize,
    pub depth: usize,
}

pub fn resource_count(circuit: &Circuit) -> ResourceCount {
    let mut rc = ResourceCount::default();
    // earliest free layer per qubit
    let mut frontier = vec![0usize; circuit.qubit_count()];
    for gate in circuit.gates() {
        *rc.counts.entry(gate.name()).or_insert(0) += 1;
        rc.total_gates += 1;
        if gate.is_oracle() {
            rc.oracles += 1;
        } else {
            match gate.arity() {
                1 => rc.single_qubit += 1,
                2 => rc.two_qubit += 1,
                3 => rc.three_qubit += 1,
                _ => rc.wide_gates += 1,
            }
        }
        let layer = gate.qubits().map(|q| frontier[q]).max().unwrap_or(0);
        for q in gate.qubits() {
            frontier[q] = layer + 1;
        }
        rc.depth = rc.depth.max(layer + 1);
    }
    rc.two_qubit_equivalents = rc.two_qubit + 6 * rc.three_qubit;
    rc
}

impl ResourceCount {
    pub fn count(&self, name: &str) -> usize {
        self.counts.get(name).copied().unwrap_or(0)
    }

    /// Gates acting on two or more qubits, oracles excluded.
    pub fn entangling(&self) -> usize {
        self.two_qubit + self.three_qubit + self.wide_gates
    }
}
