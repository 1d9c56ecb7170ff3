//! Density-matrix simulation with depolarizing gate noise and classical
//! readout confusion.

use nalgebra::DMatrix;

use super::{unitary_of, Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64, ZERO};

/// Widest register simulated as a density matrix.
pub const DENSITY_QUBIT_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    rho: DenseOperator,
}

impl DensityMatrix {
    pub fn from_operator(rho: DenseOperator) -> Result<Self> {
        if rho.nrows() != rho.ncols() || !rho.nrows().is_power_of_two() {
            return Err(Error::domain("density matrix must be square with power-of-two size"));
        }
        let qubits = rho.nrows().trailing_zeros() as usize;
        if qubits > DENSITY_QUBIT_CAP {
            return Err(Error::resource(format!("{qubits} qubits exceeds the density cap of {DENSITY_QUBIT_CAP}")));
        }
        Ok(DensityMatrix { qubits, rho })
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits.min(DENSITY_QUBIT_CAP + 1);
        let mut rho = DenseOperator::from_element(dim, dim, ZERO);
        if index >= dim {
            return Err(Error::domain(format!("basis index {index} out of range")));
        }
        rho[(index, index)] = C64::new(1.0, 0.0);
        Self::from_operator(rho)
    }

    pub fn from_pure(amps: &[C64]) -> Result<Self> {
        let v = DMatrix::from_column_slice(amps.len(), 1, amps);
        Self::from_operator(&v * v.adjoint())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DenseOperator {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re.max(0.0)).collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let mut c = Circuit::new(self.qubits, "gate");
        c.push(gate.clone())?;
        let u = unitary_of(&c)?;
        self.rho = &u * &self.rho * u.adjoint();
        Ok(())
    }

    /// `(1-p) rho + p (I/d_S (x) Tr_S rho)` for the qubit subset S.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) -> Result<()> {
        check_probability(p)?;
        if p == 0.0 {
            return Ok(());
        }
        let nq = self.qubits;
        let mut mask = 0usize;
        for &q in qubits {
            if q >= nq {
                return Err(Error::QubitOutOfRange { index: q, width: nq });
            }
            mask |= 1 << (nq - 1 - q);
        }
        let subsets: Vec<usize> = subsets_of(mask);
        let ds = subsets.len() as f64;
        let dim = self.rho.nrows();
        let mut mixed = DenseOperator::from_element(dim, dim, ZERO);
        for i in 0..dim {
            for j in 0..dim {
                if i & mask != j & mask {
                    continue;
                }
                let (bi, bj) = (i & !mask, j & !mask);
                let traced: C64 = subsets.iter().map(|&a| self.rho[(bi | a, bj | a)]).sum();
                mixed[(i, j)] = traced / ds;
            }
        }
        self.rho = &self.rho * C64::new(1.0 - p, 0.0) + mixed * C64::new(p, 0.0);
        Ok(())
    }

    /// Reduced state on `keep`, with `keep[0]` as the leading bit.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let nq = self.qubits;
        let bit = |q: usize| nq - 1 - q;
        let kept_mask = keep.iter().fold(0usize, |m, &q| m | (1 << bit(q)));
        let traced_mask = ((1usize << nq) - 1) & !kept_mask;
        let rest = subsets_of(traced_mask);
        let dim = 1usize << keep.len();
        let embed = |local: usize| {
            keep.iter()
                .enumerate()
                .fold(0usize, |acc, (i, &q)| acc | (((local >> (keep.len() - 1 - i)) & 1) << bit(q)))
        };
        let mut out = DenseOperator::from_element(dim, dim, ZERO);
        for i in 0..dim {
            for j in 0..dim {
                let (ei, ej) = (embed(i), embed(j));
                out[(i, j)] = rest.iter().map(|&a| self.rho[(ei | a, ej | a)]).sum();
            }
        }
        DensityMatrix::from_operator(out)
    }
}

fn subsets_of(mask: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut sub = mask;
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & mask;
    }
    out
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Column-stochastic readout model, `matrix[(observed, prepared)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    matrix: DMatrix<f64>,
}

impl ConfusionMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_power_of_two() {
            return Err(Error::domain("confusion matrix must be square with power-of-two size"));
        }
        for col in matrix.column_iter() {
            if col.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::domain("confusion matrix entries must lie in [0, 1]"));
            }
            if (col.sum() - 1.0).abs() > 1e-12 {
                return Err(Error::domain("confusion matrix columns must sum to 1"));
            }
        }
        Ok(ConfusionMatrix { matrix })
    }

    pub fn identity(qubits: usize) -> Self {
        let d = 1 << qubits;
        ConfusionMatrix { matrix: DMatrix::identity(d, d) }
    }

    /// Every outcome equally likely whatever was prepared.
    pub fn uniform(qubits: usize) -> Self {
        let d = 1 << qubits;
        ConfusionMatrix { matrix: DMatrix::from_element(d, d, 1.0 / d as f64) }
    }

    /// Independent symmetric bit flips with probability `eps` on each qubit.
    pub fn symmetric_flip(qubits: usize, eps: f64) -> Result<Self> {
        check_probability(eps)?;
        let d = 1usize << qubits;
        let matrix = DMatrix::from_fn(d, d, |obs, prep| {
            let flips = (obs ^ prep).count_ones() as i32;
            eps.powi(flips) * (1.0 - eps).powi(qubits as i32 - flips)
        });
        Ok(ConfusionMatrix { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn qubit_count(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }

    pub fn apply(&self, distribution: &[f64]) -> Result<Vec<f64>> {
        if distribution.len() != self.matrix.ncols() {
            return Err(Error::domain("distribution length does not match confusion matrix"));
        }
        let v = nalgebra::DVector::from_column_slice(distribution);
        Ok((&self.matrix * v).iter().copied().collect())
    }
}

/// Per-gate depolarizing strengths plus an optional readout channel.
/// Single-qubit gates and oracles are noiseless; gates on three or more
/// qubits use `three_qubit`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub two_qubit: f64,
    pub three_qubit: f64,
    pub readout: Option<ConfusionMatrix>,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { two_qubit: 0.0, three_qubit: 0.0, readout: None }
    }

    pub fn depolarizing(p: f64) -> Self {
        NoiseModel { two_qubit: p, three_qubit: p, readout: None }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.two_qubit)?;
        check_probability(self.three_qubit)
    }
}

/// Runs `circuit` on `rho`, depolarizing the qubits of each multi-qubit gate
/// after it acts.
pub fn run_noisy(circuit: &Circuit, rho: &DensityMatrix, model: &NoiseModel) -> Result<DensityMatrix> {
    model.validate()?;
    if circuit.qubit_count() != rho.qubits {
        return Err(Error::domain("circuit and density matrix widths differ"));
    }
    let mut out = rho.clone();
    for gate in circuit.gates() {
        out.apply_gate(gate)?;
        if gate.is_oracle() {
            continue;
        }
        let p = match gate.arity() {
            0 | 1 => 0.0,
            2 => model.two_qubit,
            _ => model.three_qubit,
        };
        let qubits: Vec<usize> = gate.qubits().collect();
        out.depolarize(&qubits, p)?;
    }
    Ok(out)
}

/// Applies `model` to a state: gate noise is not defined without a circuit,
/// so only the readout channel acts, on the measured distribution.
pub fn apply_noise(rho: &DensityMatrix, model: &NoiseModel) -> Result<Vec<f64>> {
    model.validate()?;
    let probs = rho.probabilities();
    match &model.readout {
        Some(c) => c.apply(&probs),
        None => Ok(probs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn zero_noise_leaves_state_unchanged() {
        let mut rho = DensityMatrix::from_pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let before = rho.clone();
        rho.depolarize(&[0], 0.0).unwrap();
        assert_eq!(rho, before);
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed_qubit() {
        let mut rho = DensityMatrix::basis(1, 1).unwrap();
        rho.depolarize(&[0], 1.0).unwrap();
        let half = DenseOperator::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(max_abs_diff(rho.matrix(), &half) < 1e-15);
    }

    #[test]
    fn depolarizing_one_qubit_keeps_the_other() {
        let mut rho = DensityMatrix::basis(2, 0b01).unwrap();
        rho.depolarize(&[0], 1.0).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let kept = rho.partial_trace_keep(&[1]).unwrap();
        assert!((kept.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!((rho.probabilities()[0b11] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn noisy_run_preserves_trace() {
        let mut c = Circuit::new(3, "n");
        c.add(Gate::h(0));
        c.add(Gate::cnot(0, 1));
        c.add(Gate::toffoli(0, 1, 2));
        let model = NoiseModel { two_qubit: 0.1, three_qubit: 0.2, readout: None };
        let out = run_noisy(&c, &DensityMatrix::basis(3, 0).unwrap(), &model).unwrap();
        assert!((out.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(run_noisy(&c, &out, &NoiseModel::depolarizing(1.5)).is_err());
    }

    #[test]
    fn identity_confusion_leaves_distribution() {
        let d = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(ConfusionMatrix::identity(2).apply(&d).unwrap(), d.to_vec());
        let flip = ConfusionMatrix::symmetric_flip(2, 0.02).unwrap();
        let out = flip.apply(&d).unwrap();
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ConfusionMatrix::new(DMatrix::from_element(2, 2, 0.3)).is_err());
    }
}
