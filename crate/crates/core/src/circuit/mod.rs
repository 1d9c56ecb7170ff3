//! Gate-level intermediate representation.
//!
//! Qubit 0 is the most significant bit of every basis-state label, so a
//! register listed as `[m, k_{n-1}, ..., k_0]` reads in the same order as the
//! binary string of its basis index. Multi-qubit gate matrices use the same
//! convention over their target list: `targets[0]` is the leading bit.

pub mod io;
pub mod noise;
pub mod resources;
pub mod sim;

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{cis, DenseOperator, C64, ONE, ZERO};

pub use resources::{resource_count, ResourceCount};
pub use sim::{apply, apply_basis, unitary_of, StateVector};

/// Which control value enables a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Zero,
    One,
}

impl Polarity {
    pub fn bit(self) -> u64 {
        match self {
            Polarity::Zero => 0,
            Polarity::One => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn on1(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::One }
    }

    pub fn on0(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Zero }
    }
}

/// Classical tables realised as a single abstract gate.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleTable {
    /// `|x> -> |perm[x]>` on the target register.
    Permutation(Vec<u64>),
    /// `|x>|y> -> |x>|y xor values[x]>`, where the first `inputs` targets hold
    /// `x` and the remaining targets hold `y`. Self-inverse.
    XorTable { inputs: usize, values: Vec<u64> },
    /// `|x> -> e^{i phases[x]} |x>`.
    Diagonal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Z,
    H,
    /// diag(1, e^{i theta}).
    Phase(f64),
    /// exp(-i theta Z / 2).
    Rz(f64),
    /// exp(-i q (pi/2) X / 2) for `quarter_turns` q in 0..8 (period 4 pi).
    Rx { quarter_turns: u8 },
    Swap,
    /// Rotation by theta inside the {|01>, |10>} subspace.
    XY(f64),
    Oracle(Arc<OracleTable>),
}

impl GateKind {
    fn base_name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::Phase(_) => "PHASE",
            GateKind::Rz(_) => "RZ",
            GateKind::Rx { .. } => "RX",
            GateKind::Swap => "SWAP",
            GateKind::XY(_) => "XY",
            GateKind::Oracle(_) => "ORACLE",
        }
    }

    /// Rotation angle for parameterised kinds.
    pub fn theta(&self) -> Option<f64> {
        match self {
            GateKind::Phase(t) | GateKind::Rz(t) | GateKind::XY(t) => Some(*t),
            GateKind::Rx { quarter_turns } => {
                let q = *quarter_turns as i32;
                Some(if q > 4 { q - 8 } else { q } as f64 * PI / 2.0)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Gate { kind, targets, controls: Vec::new() }
    }

    pub fn x(t: usize) -> Self {
        Gate::new(GateKind::X, vec![t])
    }

    pub fn z(t: usize) -> Self {
        Gate::new(GateKind::Z, vec![t])
    }

    pub fn h(t: usize) -> Self {
        Gate::new(GateKind::H, vec![t])
    }

    pub fn phase(t: usize, theta: f64) -> Self {
        Gate::new(GateKind::Phase(theta), vec![t])
    }

    pub fn rz(t: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rz(theta), vec![t])
    }

    pub fn rx(t: usize, quarter_turns: u8) -> Self {
        Gate::new(GateKind::Rx { quarter_turns: quarter_turns % 8 }, vec![t])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b])
    }

    pub fn xy(a: usize, b: usize, theta: f64) -> Self {
        Gate::new(GateKind::XY(theta), vec![a, b])
    }

    pub fn cnot(c: usize, t: usize) -> Self {
        Gate::x(t).controlled_by(Control::on1(c))
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::z(b).controlled_by(Control::on1(a))
    }

    pub fn cphase(c: usize, t: usize, theta: f64) -> Self {
        Gate::phase(t, theta).controlled_by(Control::on1(c))
    }

    pub fn toffoli(c1: usize, c2: usize, t: usize) -> Self {
        Gate::x(t).controlled_by(Control::on1(c1)).controlled_by(Control::on1(c2))
    }

    pub fn ccphase(c1: usize, c2: usize, t: usize, theta: f64) -> Self {
        Gate::phase(t, theta).controlled_by(Control::on1(c1)).controlled_by(Control::on1(c2))
    }

    pub fn oracle(table: OracleTable, targets: Vec<usize>) -> Self {
        Gate::new(GateKind::Oracle(Arc::new(table)), targets)
    }

    pub fn controlled_by(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn with_controls(mut self, controls: &[Control]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    /// All qubits touched, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|c| c.qubit).chain(self.targets.iter().copied())
    }

    pub fn arity(&self) -> usize {
        self.controls.len() + self.targets.len()
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self.kind, GateKind::Oracle(_))
    }

    /// Conventional name: X with one control is CNOT, with two TOFFOLI;
    /// other kinds take one `C` per control (or `C<k>` beyond two).
    pub fn name(&self) -> String {
        let c = self.controls.len();
        match (&self.kind, c) {
            (GateKind::X, 1) => "CNOT".into(),
            (GateKind::X, 2) => "TOFFOLI".into(),
            (kind, 0) => kind.base_name().into(),
            (kind, 1) => format!("C{}", kind.base_name()),
            (kind, 2) => format!("CC{}", kind.base_name()),
            (kind, c) => format!("C{c}{}", kind.base_name()),
        }
    }

    fn expected_targets(&self) -> Option<usize> {
        match &self.kind {
            GateKind::Swap | GateKind::XY(_) => Some(2),
            GateKind::Oracle(_) => None,
            _ => Some(1),
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let mut seen = Vec::with_capacity(self.arity());
        for q in self.qubits() {
            if q >= width {
                return Err(Error::QubitOutOfRange { index: q, width });
            }
            if seen.contains(&q) {
                return Err(Error::QubitCollision(q));
            }
            seen.push(q);
        }
        if let Some(t) = self.expected_targets() {
            if self.targets.len() != t {
                return Err(Error::domain(format!(
                    "{} expects {t} target(s), got {}",
                    self.name(),
                    self.targets.len()
                )));
            }
        }
        if let GateKind::Oracle(table) = &self.kind {
            validate_table(table, self.targets.len())?;
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::Phase(t) => GateKind::Phase(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::XY(t) => GateKind::XY(-t),
            GateKind::Rx { quarter_turns } => GateKind::Rx { quarter_turns: (8 - quarter_turns) % 8 },
            GateKind::Oracle(table) => match table.as_ref() {
                OracleTable::Permutation(p) => {
                    let mut inv = vec![0; p.len()];
                    for (x, &y) in p.iter().enumerate() {
                        inv[y as usize] = x as u64;
                    }
                    GateKind::Oracle(Arc::new(OracleTable::Permutation(inv)))
                }
                OracleTable::XorTable { .. } => self.kind.clone(),
                OracleTable::Diagonal(ph) => {
                    GateKind::Oracle(Arc::new(OracleTable::Diagonal(ph.iter().map(|p| -p).collect())))
                }
            },
            other => other.clone(),
        };
        Gate { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// True when the gate maps each basis state to a single basis state.
    pub fn is_monomial(&self) -> bool {
        match &self.kind {
            GateKind::H | GateKind::XY(_) => false,
            GateKind::Rx { quarter_turns } => quarter_turns % 2 == 0,
            _ => true,
        }
    }

    /// Image and phase of a local target-register basis index for monomial
    /// gates. Panics on non-monomial kinds.
    pub fn map_basis(&self, local: u64) -> (u64, C64) {
        match &self.kind {
            GateKind::X => (local ^ 1, ONE),
            GateKind::Z => (local, if local & 1 == 1 { -ONE } else { ONE }),
            GateKind::Phase(t) => (local, if local & 1 == 1 { cis(*t) } else { ONE }),
            GateKind::Rz(t) => (local, cis(if local & 1 == 1 { t / 2.0 } else { -t / 2.0 })),
            GateKind::Rx { quarter_turns: 0 } => (local, ONE),
            GateKind::Rx { quarter_turns: 2 } => (local ^ 1, C64::new(0.0, -1.0)),
            GateKind::Rx { quarter_turns: 4 } => (local, -ONE),
            GateKind::Rx { quarter_turns: 6 } => (local ^ 1, C64::new(0.0, 1.0)),
            GateKind::Swap => (((local & 1) << 1) | (local >> 1), ONE),
            GateKind::Oracle(table) => match table.as_ref() {
                OracleTable::Permutation(p) => (p[local as usize], ONE),
                OracleTable::Diagonal(ph) => (local, cis(ph[local as usize])),
                OracleTable::XorTable { inputs, values } => {
                    let outputs = self.targets.len() - inputs;
                    let x = local >> outputs;
                    (local ^ values[x as usize], ONE)
                }
            },
            _ => panic!("{} is not a monomial gate", self.name()),
        }
    }

    /// Matrix of the gate on its targets alone (controls ignored).
    pub fn target_matrix(&self) -> DenseOperator {
        let t = self.targets.len();
        assert!(t <= 12, "target register too wide for a dense matrix");
        let dim = 1usize << t;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match &self.kind {
            GateKind::H => DenseOperator::from_row_slice(
                2,
                2,
                &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)],
            ),
            GateKind::Rx { quarter_turns } => {
                let half = *quarter_turns as f64 * FRAC_PI_4;
                let c = C64::new(half.cos(), 0.0);
                let ms = C64::new(0.0, -half.sin());
                DenseOperator::from_row_slice(2, 2, &[c, ms, ms, c])
            }
            GateKind::XY(theta) => {
                let c = C64::new((theta / 2.0).cos(), 0.0);
                let is = C64::new(0.0, (theta / 2.0).sin());
                let mut m = DenseOperator::identity(4, 4);
                m[(1, 1)] = c;
                m[(2, 2)] = c;
                m[(1, 2)] = is;
                m[(2, 1)] = is;
                m
            }
            _ => {
                let mut m = DenseOperator::from_element(dim, dim, ZERO);
                for x in 0..dim as u64 {
                    let (y, ph) = self.map_basis(x);
                    m[(y as usize, x as usize)] = ph;
                }
                m
            }
        }
    }
}

fn validate_table(table: &OracleTable, targets: usize) -> Result<()> {
    if targets >= 64 {
        return Err(Error::resource("oracle wider than 63 qubits"));
    }
    let dim = 1u64 << targets;
    match table {
        OracleTable::Permutation(p) => {
            if p.len() as u64 != dim {
                return Err(Error::domain(format!("permutation table needs {dim} entries, got {}", p.len())));
            }
            let mut seen = vec![false; p.len()];
            for &y in p {
                if y >= dim || seen[y as usize] {
                    return Err(Error::domain("permutation table is not a bijection"));
                }
                seen[y as usize] = true;
            }
        }
        OracleTable::Diagonal(ph) => {
            if ph.len() as u64 != dim {
                return Err(Error::domain(format!("diagonal table needs {dim} entries, got {}", ph.len())));
            }
        }
        OracleTable::XorTable { inputs, values } => {
            if *inputs > targets {
                return Err(Error::domain("xor table has more inputs than targets"));
            }
            if values.len() != 1usize << inputs {
                return Err(Error::domain(format!(
                    "xor table needs {} entries, got {}",
                    1usize << inputs,
                    values.len()
                )));
            }
            let outputs = targets - inputs;
            if values.iter().any(|&v| outputs < 64 && v >> outputs != 0) {
                return Err(Error::domain("xor table value wider than its output register"));
            }
        }
    }
    Ok(())
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&io::format_gate(self))
    }
}

/// How three-qubit Toffolis are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToffoliStyle {
    /// Keep TOFFOLI as a single gate.
    Abstract,
    /// H on the target around one CCPHASE(pi).
    CcphaseNative,
    /// The textbook network of six CNOTs and single-qubit T/T^dagger phases.
    CnotDecomposition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
    pub label: String,
}

impl Circuit {
    pub fn new(qubit_count: usize, label: impl Into<String>) -> Self {
        Circuit { qubit_count, gates: Vec::new(), label: label.into() }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Push for builders whose indices are correct by construction.
    pub(crate) fn add(&mut self, gate: Gate) {
        if let Err(e) = gate.validate(self.qubit_count) {
            panic!("builder produced an invalid gate {gate:?}: {e}");
        }
        self.gates.push(gate);
    }

    /// Appends `other`, sending its qubit `q` to `map[q]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.qubit_count {
            return Err(Error::domain(format!(
                "qubit map has {} entries for a {}-qubit circuit",
                map.len(),
                other.qubit_count
            )));
        }
        for gate in &other.gates {
            let mut g = gate.clone();
            for t in g.targets.iter_mut() {
                *t = map[*t];
            }
            for c in g.controls.iter_mut() {
                c.qubit = map[c.qubit];
            }
            self.push(g)?;
        }
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        let map: Vec<usize> = (0..other.qubit_count).collect();
        if other.qubit_count > self.qubit_count {
            return Err(Error::QubitOutOfRange { index: other.qubit_count - 1, width: self.qubit_count });
        }
        self.append_mapped(other, &map)
    }

    /// A copy on a wider register with the same gates.
    pub fn widened(&self, qubit_count: usize) -> Result<Circuit> {
        if qubit_count < self.qubit_count {
            return Err(Error::domain("cannot narrow a circuit"));
        }
        Ok(Circuit { qubit_count, gates: self.gates.clone(), label: self.label.clone() })
    }

    pub fn lower_toffolis(&self, style: ToffoliStyle) -> Circuit {
        let mut out = Circuit::new(self.qubit_count, self.label.clone());
        for gate in &self.gates {
            if gate.kind == GateKind::X && gate.controls.len() == 2 && style != ToffoliStyle::Abstract {
                let flips: Vec<usize> = gate
                    .controls
                    .iter()
                    .filter(|c| c.polarity == Polarity::Zero)
                    .map(|c| c.qubit)
                    .collect();
                for &q in &flips {
                    out.add(Gate::x(q));
                }
                let (a, b, t) = (gate.controls[0].qubit, gate.controls[1].qubit, gate.targets[0]);
                for g in toffoli_network(a, b, t, style) {
                    out.add(g);
                }
                for &q in &flips {
                    out.add(Gate::x(q));
                }
            } else {
                out.add(gate.clone());
            }
        }
        out
    }
}

fn toffoli_network(a: usize, b: usize, c: usize, style: ToffoliStyle) -> Vec<Gate> {
    let t = |q| Gate::phase(q, FRAC_PI_4);
    let tdg = |q| Gate::phase(q, -FRAC_PI_4);
    match style {
        ToffoliStyle::Abstract => vec![Gate::toffoli(a, b, c)],
        ToffoliStyle::CcphaseNative => vec![Gate::h(c), Gate::ccphase(a, b, c, PI), Gate::h(c)],
        ToffoliStyle::CnotDecomposition => vec![
            Gate::h(c),
            Gate::cnot(b, c),
            tdg(c),
            Gate::cnot(a, c),
            t(c),
            Gate::cnot(b, c),
            tdg(c),
            Gate::cnot(a, c),
            t(b),
            t(c),
            Gate::h(c),
            Gate::cnot(a, b),
            t(a),
            tdg(b),
            Gate::cnot(a, b),
        ],
    }
}

/// A three-qubit Toffoli (controls 0 and 1, target 2) in the given style.
pub fn compile_toffoli(style: ToffoliStyle) -> Circuit {
    let mut c = Circuit::new(3, format!("toffoli-{style:?}").to_lowercase());
    for g in toffoli_network(0, 1, 2, style) {
        c.add(g);
    }
    c
}

/// Gates reversed and individually inverted.
pub fn adjoint(circuit: &Circuit) -> Circuit {
    Circuit {
        qubit_count: circuit.qubit_count,
        gates: circuit.gates.iter().rev().map(Gate::adjoint).collect(),
        label: format!("{}-adjoint", circuit.label),
    }
}

/// Every gate gains `control`, so the whole circuit acts only when the
/// control qubit holds the selected value.
pub fn controlled(circuit: &Circuit, control: usize, polarity: Polarity) -> Result<Circuit> {
    if control >= circuit.qubit_count {
        return Err(Error::QubitOutOfRange { index: control, width: circuit.qubit_count });
    }
    let mut out = Circuit::new(circuit.qubit_count, format!("controlled-{}", circuit.label));
    for gate in &circuit.gates {
        out.push(gate.clone().controlled_by(Control { qubit: control, polarity }))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn names_follow_control_count() {
        assert_eq!(Gate::x(0).name(), "X");
        assert_eq!(Gate::cnot(0, 1).name(), "CNOT");
        assert_eq!(Gate::toffoli(0, 1, 2).name(), "TOFFOLI");
        assert_eq!(Gate::cz(0, 1).name(), "CZ");
        assert_eq!(Gate::ccphase(0, 1, 2, 1.0).name(), "CCPHASE");
        assert_eq!(Gate::rz(3, 1.0).controlled_by(Control::on0(0)).name(), "CRZ");
        let wide = Gate::x(3).with_controls(&[Control::on1(0), Control::on1(1), Control::on0(2)]);
        assert_eq!(wide.name(), "C3X");
    }

    #[test]
    fn validation_catches_bad_indices() {
        let mut c = Circuit::new(2, "t");
        assert_eq!(c.push(Gate::x(2)), Err(Error::QubitOutOfRange { index: 2, width: 2 }));
        assert_eq!(c.push(Gate::cnot(1, 1)), Err(Error::QubitCollision(1)));
        assert!(c.push(Gate::new(GateKind::Swap, vec![0])).is_err());
        let bad_perm = Gate::oracle(OracleTable::Permutation(vec![0, 0]), vec![0]);
        assert!(c.push(bad_perm).is_err());
        assert!(c.push(Gate::cnot(0, 1)).is_ok());
    }

    #[test]
    fn adjoint_negates_parameters() {
        assert_eq!(Gate::rz(0, 0.4).adjoint(), Gate::rz(0, -0.4));
        assert_eq!(Gate::cnot(0, 1).adjoint(), Gate::cnot(0, 1));
        assert_eq!(Gate::rx(0, 1).adjoint(), Gate::rx(0, 7));
        let mut c = Circuit::new(3, "c");
        c.add(Gate::h(0));
        c.add(Gate::cphase(0, 2, 0.3));
        c.add(Gate::xy(1, 2, 1.1));
        assert_eq!(adjoint(&adjoint(&c)).gates(), c.gates());
    }

    #[test]
    fn textbook_single_gate_matrices() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = |v: &[f64]| DenseOperator::from_row_slice(2, 2, &v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        assert!(max_abs_diff(&Gate::x(0).target_matrix(), &r(&[0.0, 1.0, 1.0, 0.0])) < 1e-15);
        assert!(max_abs_diff(&Gate::z(0).target_matrix(), &r(&[1.0, 0.0, 0.0, -1.0])) < 1e-15);
        assert!(max_abs_diff(&Gate::h(0).target_matrix(), &r(&[s, s, s, -s])) < 1e-15);
        let rz = Gate::rz(0, 0.8).target_matrix();
        assert!((rz[(0, 0)] - cis(-0.4)).norm() < 1e-15);
        assert!((rz[(1, 1)] - cis(0.4)).norm() < 1e-15);
        let rx = Gate::rx(0, 1).target_matrix();
        assert!((rx[(0, 1)] - C64::new(0.0, -s)).norm() < 1e-15);
        assert!((rx[(0, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
        // RX(pi) = -iX through both code paths
        let rx2 = Gate::rx(0, 2).target_matrix();
        assert!((rx2[(1, 0)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        let xy = Gate::xy(0, 1, PI).target_matrix();
        assert!((xy[(1, 2)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(xy[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn oracle_tables() {
        let g = Gate::oracle(OracleTable::XorTable { inputs: 1, values: vec![0b10, 0b11] }, vec![0, 1, 2]);
        assert_eq!(g.map_basis(0b100).0, 0b111);
        assert_eq!(g.map_basis(0b001).0, 0b011);
        let p = Gate::oracle(OracleTable::Permutation(vec![2, 0, 3, 1]), vec![0, 1]);
        let inv = p.adjoint();
        for x in 0..4 {
            assert_eq!(inv.map_basis(p.map_basis(x).0).0, x);
        }
    }
}
