//! Second-order Trotter evolution of a single plaquette.
//!
//! The effective Hamiltonian on the four links is
//! `H = -(theta_K sum_l M_l + theta_V Re Tr(U_1 U_2 U_3^{-1} U_4^{-1}))`,
//! with `M` the single-link kinetic generator. One step is
//! `P(dt/2) K(dt) P(dt/2)` where `P` is the plaquette trace gate and `K`
//! applies `exp(i theta_K dt M)` to each link through the group Fourier
//! transform.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::sim::STATE_QUBIT_CAP;
use crate::circuit::{adjoint, apply, Circuit, Gate, OracleTable, StateVector, ToffoliStyle};
use crate::error::{Error, Result};
use crate::gates::fourier::{append_fourier, fourier_output_index, FOURIER_OMEGA};
use crate::gates::plaquette::{build_plaquette_trace, PlaquetteLayout};
use crate::group::{inverse, multiply, re_trace, DihedralOrder, GroupElement, IrrepLabel};
use crate::linalg::{norm, DenseOperator, C64, ZERO};
use crate::spectral::{kinetic_step, m_matrix};

/// Largest link-space dimension materialised as a dense operator.
pub const DENSE_EVOLUTION_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaquetteSystem {
    pub order: DihedralOrder,
    pub theta_k: f64,
    pub theta_v: f64,
}

impl PlaquetteSystem {
    pub fn new(order: DihedralOrder, theta_k: f64, theta_v: f64) -> Result<Self> {
        if !theta_k.is_finite() || !theta_v.is_finite() {
            return Err(Error::domain("couplings must be finite"));
        }
        let system = PlaquetteSystem { order, theta_k, theta_v };
        let width = system.qubit_count();
        if width > STATE_QUBIT_CAP {
            return Err(Error::resource(format!(
                "a plaquette of {order} needs {width} qubits, above the simulator cap of {STATE_QUBIT_CAP}"
            )));
        }
        Ok(system)
    }

    /// Qubits in the four link registers.
    pub fn link_qubits(&self) -> usize {
        4 * self.order.register_width()
    }

    /// Dimension of the link Hilbert space, `(2N)^4`.
    pub fn link_dimension(&self) -> usize {
        1 << self.link_qubits()
    }

    /// Links, work register and multiplication ancillas.
    pub fn qubit_count(&self) -> usize {
        PlaquetteLayout::new(self.order).qubit_count()
    }
}

/// One second-order step as a circuit on the plaquette layout. The Fourier
/// gadget borrows the first work qubit, which is `|0>` between the two
/// plaquette half steps.
pub fn trotter_step(system: &PlaquetteSystem, dt: f64) -> Result<Circuit> {
    if !dt.is_finite() {
        return Err(Error::domain("dt must be finite"));
    }
    let order = system.order;
    let layout = PlaquetteLayout::new(order);
    let width = layout.qubit_count();
    let half = build_plaquette_trace(order, system.theta_v * dt / 2.0, ToffoliStyle::Abstract)?;

    let step = kinetic_step(order, system.theta_k * dt)?;
    let mut phases = vec![0.0; order.group_size()];
    for (label, d) in IrrepLabel::all(order).into_iter().zip(&step.fourier_diagonal) {
        phases[fourier_output_index(order, label)?] = d.arg();
    }
    let table = std::sync::Arc::new(OracleTable::Diagonal(phases));

    let mut c = Circuit::new(width, format!("trotter-step-{order}"));
    c.append(&half)?;
    for link in &layout.links {
        let mut f = Circuit::new(width, "fourier");
        append_fourier(&mut f, link, layout.work.m, FOURIER_OMEGA);
        c.append(&f)?;
        c.push(Gate::new(crate::circuit::GateKind::Oracle(table.clone()), link.qubits()))?;
        c.append(&adjoint(&f))?;
    }
    c.append(&half)?;
    Ok(c)
}

/// `Re Tr U_p` for every link assignment, indexed with `U_1` most significant.
pub fn plaquette_traces(order: DihedralOrder) -> Vec<f64> {
    let size = order.group_size();
    let elements: Vec<GroupElement> = order.elements().collect();
    let mut out = Vec::with_capacity(size.pow(4));
    for &u1 in &elements {
        for &u2 in &elements {
            let u12 = multiply(u1, u2).expect("same order");
            for &u3 in &elements {
                let u123 = multiply(u12, inverse(u3)).expect("same order");
                for &u4 in &elements {
                    out.push(re_trace(multiply(u123, inverse(u4)).expect("same order")));
                }
            }
        }
    }
    out
}

/// Matrix-free action of the effective Hamiltonian on the link space.
#[derive(Debug, Clone)]
pub struct LinkHamiltonian {
    size: usize,
    m: Vec<f64>,
    traces: Vec<f64>,
    theta_k: f64,
    theta_v: f64,
}

impl LinkHamiltonian {
    pub fn new(system: &PlaquetteSystem) -> Result<Self> {
        let m = m_matrix(system.order)?;
        let size = system.order.group_size();
        Ok(LinkHamiltonian {
            size,
            m: (0..size * size).map(|i| m[(i / size, i % size)]).collect(),
            traces: plaquette_traces(system.order),
            theta_k: system.theta_k,
            theta_v: system.theta_v,
        })
    }

    pub fn dimension(&self) -> usize {
        self.traces.len()
    }

    /// Upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let row = (0..self.size).map(|i| self.m[i * self.size..(i + 1) * self.size].iter().map(|v| v.abs()).sum::<f64>());
        4.0 * self.theta_k.abs() * row.fold(0.0, f64::max) + 2.0 * self.theta_v.abs()
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let s = self.size;
        let mut out: Vec<C64> = psi.iter().zip(&self.traces).map(|(a, &t)| -self.theta_v * t * a).collect();
        for link in 0..4 {
            let stride = s.pow(3 - link as u32);
            for (idx, o) in out.iter_mut().enumerate() {
                let g = (idx / stride) % s;
                let base = idx - g * stride;
                let row = &self.m[g * s..(g + 1) * s];
                let acc: C64 = row.iter().enumerate().map(|(h, &w)| psi[base + h * stride] * w).sum();
                *o -= acc * self.theta_k;
            }
        }
        out
    }
}

/// Dense effective Hamiltonian, for link spaces up to [`DENSE_EVOLUTION_DIM`].
pub fn effective_hamiltonian(system: &PlaquetteSystem) -> Result<DenseOperator> {
    let h = LinkHamiltonian::new(system)?;
    let dim = h.dimension();
    if dim > DENSE_EVOLUTION_DIM {
        return Err(Error::resource(format!("dense Hamiltonian of dimension {dim} exceeds {DENSE_EVOLUTION_DIM}")));
    }
    let mut out = DenseOperator::zeros(dim, dim);
    let mut e = vec![ZERO; dim];
    for col in 0..dim {
        e[col] = C64::new(1.0, 0.0);
        out.set_column(col, &DVector::from_vec(h.apply(&e)));
        e[col] = ZERO;
    }
    Ok(out)
}

/// `exp(-i H t)` as a dense matrix exponential.
pub fn exact_evolve(system: &PlaquetteSystem, t: f64) -> Result<DenseOperator> {
    let h = effective_hamiltonian(system)?;
    Ok((h * C64::new(0.0, -t)).exp())
}

/// `exp(-i H t) psi` by a truncated Taylor series over short sub-intervals.
pub fn exact_evolve_state(system: &PlaquetteSystem, t: f64, psi: &[C64]) -> Result<Vec<C64>> {
    let h = LinkHamiltonian::new(system)?;
    if psi.len() != h.dimension() {
        return Err(Error::domain(format!("state has length {} but the link space has {}", psi.len(), h.dimension())));
    }
    let slices = ((h.norm_bound() * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let tau = t / slices as f64;
    let mut state = psi.to_vec();
    for _ in 0..slices {
        let mut term = state.clone();
        for k in 1..60 {
            let scale = C64::new(0.0, -tau / k as f64);
            term = h.apply(&term).into_iter().map(|v| v * scale).collect();
            for (s, t) in state.iter_mut().zip(&term) {
                *s += t;
            }
            if norm(&term) < 1e-18 {
                break;
            }
        }
    }
    Ok(state)
}

/// Runs `circuit` on a link-space state with the work register in `|e>` and
/// returns the link-space output. Fails if any weight leaves the work
/// register.
pub fn apply_to_links(system: &PlaquetteSystem, circuit: &Circuit, psi: &[C64]) -> Result<Vec<C64>> {
    let shift = circuit.qubit_count() - system.link_qubits();
    let mut full = vec![ZERO; 1 << circuit.qubit_count()];
    for (i, &a) in psi.iter().enumerate() {
        full[i << shift] = a;
    }
    let out = apply(circuit, &StateVector::from_amplitudes(full)?)?.into_amplitudes();
    let mask = (1usize << shift) - 1;
    let leak: f64 = out.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum();
    if leak > 1e-20 {
        return Err(Error::Consistency(format!("work register left |e> with weight {leak:e}")));
    }
    Ok((0..psi.len()).map(|i| out[i << shift]).collect())
}

/// Random normalised link-space states.
pub fn random_states(dim: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<C64> =
                (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let n = norm(&v);
            v.into_iter().map(|a| a / n).collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub dt: f64,
    pub error: f64,
}

/// Largest single-step deviation from exact evolution over the given states.
pub fn step_error(system: &PlaquetteSystem, dt: f64, states: &[Vec<C64>]) -> Result<f64> {
    let circuit = trotter_step(system, dt)?;
    let mut worst = 0.0f64;
    for psi in states {
        let trotter = apply_to_links(system, &circuit, psi)?;
        let exact = exact_evolve_state(system, dt, psi)?;
        let diff: Vec<C64> = trotter.iter().zip(&exact).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&diff));
    }
    Ok(worst)
}

pub fn trotter_convergence(
    system: &PlaquetteSystem,
    dts: &[f64],
    state_count: usize,
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    let states = random_states(system.link_dimension(), state_count, seed);
    dts.iter().map(|&dt| Ok(ConvergencePoint { dt, error: step_error(system, dt, &states)? })).collect()
}

/// `log(e_i / e_{i+1}) / log(dt_i / dt_{i+1})` for consecutive points.
pub fn richardson_slopes(points: &[ConvergencePoint]) -> Vec<f64> {
    points.windows(2).map(|w| (w[0].error / w[1].error).ln() / (w[0].dt / w[1].dt).ln()).collect()
}
