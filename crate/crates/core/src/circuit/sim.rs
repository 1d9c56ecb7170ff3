//! Exact simulation: dense state vectors, dense unitaries, and a basis-state
//! tracker for circuits made only of permutation-with-phase gates.

use rayon::prelude::*;

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64, ONE, ZERO};

/// Widest register held as a dense state vector.
pub const STATE_QUBIT_CAP: usize = 16;
/// Widest circuit whose full unitary is materialised.
pub const UNITARY_QUBIT_CAP: usize = 12;
/// Widest register the basis tracker can index.
pub const BASIS_QUBIT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(qubits: usize) -> Result<Self> {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        check_state_cap(qubits)?;
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::domain(format!("basis index {index} out of range for {qubits} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::domain("state length must be a power of two"));
        }
        let qubits = amps.len().trailing_zeros() as usize;
        check_state_cap(qubits)?;
        Ok(StateVector { qubits, amps })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.amps)
    }
}

fn check_state_cap(qubits: usize) -> Result<()> {
    if qubits > STATE_QUBIT_CAP {
        return Err(Error::resource(format!(
            "{qubits} qubits exceeds the dense state cap of {STATE_QUBIT_CAP}"
        )));
    }
    Ok(())
}

/// Bit layout of one gate inside an `nq`-qubit register.
struct Placement {
    ctrl_mask: u64,
    ctrl_val: u64,
    target_bits: Vec<u32>,
    target_mask: u64,
}

impl Placement {
    fn new(gate: &Gate, nq: usize) -> Self {
        let bit = |q: usize| (nq - 1 - q) as u32;
        let mut ctrl_mask = 0;
        let mut ctrl_val = 0;
        for c in &gate.controls {
            ctrl_mask |= 1u64 << bit(c.qubit);
            ctrl_val |= c.polarity.bit() << bit(c.qubit);
        }
        let target_bits: Vec<u32> = gate.targets.iter().map(|&t| bit(t)).collect();
        let target_mask = target_bits.iter().fold(0, |m, &b| m | (1u64 << b));
        Placement { ctrl_mask, ctrl_val, target_bits, target_mask }
    }

    fn active(&self, index: u64) -> bool {
        index & self.ctrl_mask == self.ctrl_val
    }

    fn extract(&self, index: u64) -> u64 {
        self.target_bits.iter().fold(0, |acc, &b| (acc << 1) | ((index >> b) & 1))
    }

    fn deposit(&self, local: u64) -> u64 {
        let t = self.target_bits.len();
        self.target_bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (((local >> (t - 1 - i)) & 1) << b))
    }
}

fn apply_gate(gate: &Gate, nq: usize, amps: &mut Vec<C64>) {
    let place = Placement::new(gate, nq);
    let t = gate.targets.len();
    if gate.is_monomial() {
        let table: Vec<(u64, C64)> = (0..1u64 << t).map(|x| gate.map_basis(x)).collect();
        let mut out = vec![ZERO; amps.len()];
        for (idx, &a) in amps.iter().enumerate() {
            let idx = idx as u64;
            if a == ZERO {
                continue;
            }
            if !place.active(idx) {
                out[idx as usize] += a;
                continue;
            }
            let (img, ph) = table[place.extract(idx) as usize];
            let dest = (idx & !place.target_mask) | place.deposit(img);
            out[dest as usize] += ph * a;
        }
        *amps = out;
    } else {
        let m = gate.target_matrix();
        let offsets: Vec<usize> = (0..1u64 << t).map(|j| place.deposit(j) as usize).collect();
        let mut local = vec![ZERO; offsets.len()];
        for base in 0..amps.len() {
            let b = base as u64;
            if b & place.target_mask != 0 || !place.active(b) {
                continue;
            }
            for (j, &off) in offsets.iter().enumerate() {
                local[j] = amps[base | off];
            }
            for (i, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (j, &v) in local.iter().enumerate() {
                    acc += m[(i, j)] * v;
                }
                amps[base | off] = acc;
            }
        }
    }
}

/// Applies the circuit gate by gate to a copy of `state`.
pub fn apply(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    apply_in_place(circuit, &mut out)?;
    Ok(out)
}

pub fn apply_in_place(circuit: &Circuit, state: &mut StateVector) -> Result<()> {
    if circuit.qubit_count() != state.qubits {
        return Err(Error::domain(format!(
            "circuit acts on {} qubits but the state has {}",
            circuit.qubit_count(),
            state.qubits
        )));
    }
    for gate in circuit.gates() {
        apply_gate(gate, state.qubits, &mut state.amps);
    }
    Ok(())
}

/// Image of one basis state under a circuit made only of monomial gates.
pub fn apply_basis(circuit: &Circuit, index: u64) -> Result<(u64, C64)> {
    let nq = circuit.qubit_count();
    if nq > BASIS_QUBIT_CAP {
        return Err(Error::resource(format!("{nq} qubits exceeds the basis tracker cap")));
    }
    let mut idx = index;
    let mut phase = ONE;
    for gate in circuit.gates() {
        if !gate.is_monomial() {
            return Err(Error::domain(format!("{} does not map basis states to basis states", gate.name())));
        }
        let place = Placement::new(gate, nq);
        if !place.active(idx) {
            continue;
        }
        let (img, ph) = gate.map_basis(place.extract(idx));
        idx = (idx & !place.target_mask) | place.deposit(img);
        phase *= ph;
    }
    Ok((idx, phase))
}

pub fn is_monomial(circuit: &Circuit) -> bool {
    circuit.gates().iter().all(Gate::is_monomial)
}

/// Full unitary, column by column.
pub fn unitary_of(circuit: &Circuit) -> Result<DenseOperator> {
    let nq = circuit.qubit_count();
    if nq > UNITARY_QUBIT_CAP {
        return Err(Error::resource(format!(
            "{nq} qubits exceeds the dense unitary cap of {UNITARY_QUBIT_CAP}"
        )));
    }
    let data: Vec<usize> = (0..nq).collect();
    Ok(restricted_unitary(circuit, &data)?.0)
}

/// The block of the unitary with every qubit outside `data` prepared and
/// projected on |0>. `data[0]` is the leading bit of the block index. Also
/// returns the largest probability that any data basis input leaves the
/// ancilla-zero subspace.
pub fn restricted_unitary(circuit: &Circuit, data: &[usize]) -> Result<(DenseOperator, f64)> {
    let nq = circuit.qubit_count();
    for (i, &q) in data.iter().enumerate() {
        if q >= nq {
            return Err(Error::QubitOutOfRange { index: q, width: nq });
        }
        if data[..i].contains(&q) {
            return Err(Error::QubitCollision(q));
        }
    }
    if data.len() > UNITARY_QUBIT_CAP {
        return Err(Error::resource(format!("{} data qubits exceeds the unitary cap", data.len())));
    }
    let bit = |q: usize| nq - 1 - q;
    let embed = |local: usize| -> u64 {
        data.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &q)| acc | ((((local >> (data.len() - 1 - i)) & 1) as u64) << bit(q)))
    };
    let data_mask = embed((1 << data.len()) - 1);
    let project = |full: u64| -> Option<usize> {
        if full & !data_mask != 0 {
            return None;
        }
        Some(data.iter().fold(0usize, |acc, &q| (acc << 1) | ((full >> bit(q)) & 1) as usize))
    };
    let dim = 1usize << data.len();
    let monomial = is_monomial(circuit);
    if !monomial {
        check_state_cap(nq)?;
    }
    let columns: Vec<Result<(Vec<C64>, f64)>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let input = embed(col);
            let mut column = vec![ZERO; dim];
            let mut kept = 0.0;
            if monomial {
                let (out, ph) = apply_basis(circuit, input)?;
                if let Some(row) = project(out) {
                    column[row] = ph;
                    kept = 1.0;
                }
            } else {
                let mut state = StateVector::basis(nq, input as usize)?;
                apply_in_place(circuit, &mut state)?;
                for (full, &a) in state.amps.iter().enumerate() {
                    if let Some(row) = project(full as u64) {
                        column[row] = a;
                        kept += a.norm_sqr();
                    }
                }
            }
            Ok((column, 1.0 - kept))
        })
        .collect();
    let mut op = DenseOperator::from_element(dim, dim, ZERO);
    let mut leakage = 0.0f64;
    for (col, result) in columns.into_iter().enumerate() {
        let (column, leak) = result?;
        leakage = leakage.max(leak);
        for (row, v) in column.into_iter().enumerate() {
            op[(row, col)] = v;
        }
    }
    Ok((op, leakage))
}
