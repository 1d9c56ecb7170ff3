//! Process matrices, process fidelity, readout mitigation and bitstring
//! accuracy for small circuits under synthetic noise.

use nalgebra::{DMatrix, DVector};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use crate::circuit::noise::{ConfusionMatrix, DensityMatrix, NoiseModel};
use crate::circuit::noise::run_noisy;
use crate::circuit::{Circuit, ToffoliStyle};
use crate::error::{Error, Result};
use crate::gates::multiplication::{build_multiplication, build_multiplication_d4_specialized};
use crate::group::{group_table, DihedralOrder};
use crate::linalg::{DenseOperator, C64, ONE, ZERO};

/// Widest register for which a process matrix is formed.
pub const CHI_QUBIT_CAP: usize = 3;

/// Process matrix in the Pauli-product basis. Basis index `m` is read in
/// base 4 with qubit 0 most significant and digits `I, X, Y, Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    pub qubits: usize,
    pub entries: DenseOperator,
}

impl ChiMatrix {
    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Pauli label such as `IXZ` for basis index `m`.
    pub fn label(&self, m: usize) -> String {
        (0..self.qubits).map(|q| ['I', 'X', 'Y', 'Z'][(m >> (2 * (self.qubits - 1 - q))) & 3]).collect()
    }
}

/// `P[row][row ^ xmask]` for the Pauli string `m` on `q` qubits.
fn pauli_entry(m: usize, q: usize, row: usize) -> (usize, C64) {
    let mut col = row;
    let mut value = ONE;
    for qubit in 0..q {
        let digit = (m >> (2 * (q - 1 - qubit))) & 3;
        let bit = q - 1 - qubit;
        let r = (row >> bit) & 1;
        match digit {
            1 => col ^= 1 << bit,
            2 => {
                col ^= 1 << bit;
                value *= if r == 0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
            }
            3 if r == 1 => value = -value,
            _ => {}
        }
    }
    (col, value)
}

fn check_chi_width(q: usize) -> Result<()> {
    if q > CHI_QUBIT_CAP {
        return Err(Error::resource(format!("process matrices are limited to {CHI_QUBIT_CAP} qubits, got {q}")));
    }
    Ok(())
}

/// Superoperator on `data` with every other qubit prepared in `|0>` and
/// traced out at the end. Row-major vectorisation:
/// `S[(a d + b), (i d + j)] = E(|i><j|)_{ab}`.
pub fn superoperator(circuit: &Circuit, data: &[usize], model: &NoiseModel) -> Result<DenseOperator> {
    check_chi_width(data.len())?;
    let nq = circuit.qubit_count();
    let d = 1usize << data.len();
    let bit = |q: usize| nq - 1 - q;
    let embed = |local: usize| {
        data.iter().enumerate().fold(0usize, |acc, (i, &q)| acc | (((local >> (data.len() - 1 - i)) & 1) << bit(q)))
    };
    let columns: Vec<(usize, DenseOperator)> = (0..d * d)
        .into_par_iter()
        .map(|col| {
            let (i, j) = (col / d, col % d);
            let mut rho = DenseOperator::from_element(1 << nq, 1 << nq, ZERO);
            rho[(embed(i), embed(j))] = ONE;
            let out = run_noisy(circuit, &DensityMatrix::from_operator(rho)?, model)?;
            Ok((col, out.partial_trace_keep(data)?.matrix().clone()))
        })
        .collect::<Result<_>>()?;
    let mut s = DenseOperator::from_element(d * d, d * d, ZERO);
    for (col, out) in columns {
        for a in 0..d {
            for b in 0..d {
                s[(a * d + b, col)] = out[(a, b)];
            }
        }
    }
    Ok(s)
}

/// `chi_{mn} = Tr((P_m (x) P_n^*)^dagger S) / d^2`.
pub fn chi_from_superoperator(s: &DenseOperator) -> Result<ChiMatrix> {
    let d = (s.nrows() as f64).sqrt().round() as usize;
    if d * d != s.nrows() || !d.is_power_of_two() {
        return Err(Error::domain("superoperator size must be a square power of two"));
    }
    let q = d.trailing_zeros() as usize;
    check_chi_width(q)?;
    let paulis = d * d;
    let mut chi = DenseOperator::from_element(paulis, paulis, ZERO);
    for m in 0..paulis {
        for n in 0..paulis {
            let mut acc = ZERO;
            for a in 0..d {
                let (c, vm) = pauli_entry(m, q, a);
                for b in 0..d {
                    let (e, vn) = pauli_entry(n, q, b);
                    acc += (vm * vn.conj()).conj() * s[(a * d + b, c * d + e)];
                }
            }
            chi[(m, n)] = acc / (paulis as f64);
        }
    }
    Ok(ChiMatrix { qubits: q, entries: chi })
}

/// Process matrix of a noisy circuit restricted to `data`.
pub fn chi_matrix(circuit: &Circuit, data: &[usize], model: &NoiseModel) -> Result<ChiMatrix> {
    chi_from_superoperator(&superoperator(circuit, data, model)?)
}

/// `chi_{mn} = c_m conj(c_n)` with `c_m = Tr(P_m U) / d`.
pub fn chi_of_unitary(u: &DenseOperator) -> Result<ChiMatrix> {
    let d = u.nrows();
    if d != u.ncols() || !d.is_power_of_two() {
        return Err(Error::domain("unitary must be square with power-of-two size"));
    }
    let q = d.trailing_zeros() as usize;
    check_chi_width(q)?;
    let coeffs: Vec<C64> = (0..d * d)
        .map(|m| {
            (0..d)
                .map(|row| {
                    let (col, v) = pauli_entry(m, q, row);
                    v * u[(col, row)]
                })
                .sum::<C64>()
                / d as f64
        })
        .collect();
    let c = DVector::from_vec(coeffs);
    Ok(ChiMatrix { qubits: q, entries: &c * c.adjoint() })
}

/// `Re Tr(chi_target^dagger chi)` clipped to `[0, 1]`.
pub fn process_fidelity(chi: &ChiMatrix, target: &ChiMatrix) -> Result<f64> {
    if chi.entries.shape() != target.entries.shape() {
        return Err(Error::domain("process matrices have different sizes"));
    }
    Ok((target.entries.adjoint() * &chi.entries).trace().re.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub p: f64,
    pub fidelity: f64,
    pub iterations: usize,
}

/// Finds the uniform depolarizing strength in `[lo, hi]` at which the process
/// fidelity of `circuit` on `data` equals `target_fidelity`, by bisection.
pub fn calibrate_depolarizing(
    circuit: &Circuit,
    data: &[usize],
    target_fidelity: f64,
    (lo, hi): (f64, f64),
    tol: f64,
) -> Result<Calibration> {
    let ideal = chi_matrix(circuit, data, &NoiseModel::noiseless())?;
    let fid = |p: f64| -> Result<f64> { process_fidelity(&chi_matrix(circuit, data, &NoiseModel::depolarizing(p))?, &ideal) };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (fid(a)?, fid(b)?);
    if !(fb <= target_fidelity && target_fidelity <= fa) {
        return Err(Error::domain(format!(
            "fidelity {target_fidelity} not bracketed: f({a})={fa}, f({b})={fb}"
        )));
    }
    let mut iterations = 0;
    while b - a > tol && iterations < 200 {
        let mid = 0.5 * (a + b);
        if fid(mid)? > target_fidelity {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let p = 0.5 * (a + b);
    Ok(Calibration { p, fidelity: fid(p)?, iterations })
}

/// 2-norm condition number from the singular values.
pub fn condition_number(c: &ConfusionMatrix) -> f64 {
    let sv = c.matrix().clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `C^{-1} raw`, then negative entries clipped and the result renormalised.
pub fn mitigate_readout(raw: &[f64], c: &ConfusionMatrix) -> Result<Vec<f64>> {
    let m: &DMatrix<f64> = c.matrix();
    if raw.len() != m.nrows() {
        return Err(Error::domain("distribution length does not match confusion matrix"));
    }
    let solved = m
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(raw))
        .ok_or_else(|| Error::domain("confusion matrix is singular"))?;
    let clipped: Vec<f64> = solved.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::domain("mitigated distribution has no positive weight"));
    }
    Ok(clipped.into_iter().map(|v| v / total).collect())
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAccuracy {
    pub g: usize,
    pub h: usize,
    pub raw: f64,
    pub majority: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub mean_accuracy: f64,
    pub stddev: f64,
    pub majority_mean: Option<f64>,
    pub majority_stddev: Option<f64>,
    pub pairs: Vec<PairAccuracy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracySettings {
    pub shots: usize,
    /// Shots per plurality vote; `None` skips the vote.
    pub majority_window: Option<usize>,
    pub seed: u64,
    pub style: ToffoliStyle,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Multiplication circuit used for accuracy runs and its data qubits.
fn accuracy_circuit(order: DihedralOrder, style: ToffoliStyle) -> Result<(Circuit, Vec<usize>)> {
    let w = order.register_width();
    let circuit = if order.get() == 4 {
        build_multiplication_d4_specialized(style)
    } else {
        build_multiplication(order, style)?
    };
    Ok((circuit, (0..2 * w).collect()))
}

/// Fraction of sampled outputs equal to `|g>|gh>` for every input pair,
/// optionally also scored by plurality over windows of successive shots.
/// Pair `i` samples from stream `i` of the seeded generator.
pub fn multiplication_accuracy(
    order: DihedralOrder,
    model: &NoiseModel,
    settings: &AccuracySettings,
) -> Result<AccuracyReport> {
    if settings.shots == 0 {
        return Err(Error::domain("at least one shot is required"));
    }
    if let Some(w) = settings.majority_window {
        if w == 0 || w > settings.shots {
            return Err(Error::domain(format!("majority window {w} must lie in 1..={}", settings.shots)));
        }
    }
    let (circuit, data) = accuracy_circuit(order, settings.style)?;
    let nq = circuit.qubit_count();
    let anc = nq - data.len();
    let size = order.group_size();
    let w = order.register_width();
    let table = group_table(order)?;
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|g| (0..size).map(move |h| (g, h))).collect();

    let results: Vec<PairAccuracy> = pairs
        .par_iter()
        .enumerate()
        .map(|(stream, &(g, h))| {
            let input = ((g << w) | h) << anc;
            let out = run_noisy(&circuit, &DensityMatrix::basis(nq, input)?, model)?;
            let reduced = out.partial_trace_keep(&data)?;
            let probs = match &model.readout {
                Some(c) => c.apply(&reduced.probabilities())?,
                None => reduced.probabilities(),
            };
            let expected = (g << w) | table[g][h];
            let weights: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
            let dist = WeightedIndex::new(&weights).map_err(|e| Error::Consistency(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(stream as u64);
            let samples: Vec<usize> = (0..settings.shots).map(|_| dist.sample(&mut rng)).collect();
            let raw = samples.iter().filter(|&&s| s == expected).count() as f64 / settings.shots as f64;
            let majority = settings.majority_window.map(|win| {
                let windows: Vec<&[usize]> = samples.chunks_exact(win).collect();
                let wins = windows.iter().filter(|chunk| plurality(chunk, probs.len()) == expected).count();
                wins as f64 / windows.len() as f64
            });
            Ok(PairAccuracy { g, h, raw, majority })
        })
        .collect::<Result<_>>()?;

    let raw: Vec<f64> = results.iter().map(|p| p.raw).collect();
    let (mean_accuracy, stddev) = mean_std(&raw);
    let (majority_mean, majority_stddev) = match settings.majority_window {
        Some(_) => {
            let maj: Vec<f64> = results.iter().filter_map(|p| p.majority).collect();
            let (m, s) = mean_std(&maj);
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    Ok(AccuracyReport { mean_accuracy, stddev, majority_mean, majority_stddev, pairs: results })
}

/// Most frequent outcome; ties go to the smallest index.
fn plurality(samples: &[usize], outcomes: usize) -> usize {
    let mut counts = vec![0usize; outcomes];
    for &s in samples {
        counts[s] += 1;
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    counts.iter().position(|&c| c == best).unwrap_or(0)
}
