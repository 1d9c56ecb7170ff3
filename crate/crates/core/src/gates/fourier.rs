//! The group Fourier transform over D_N.
//!
//! A cyclic QFT on the rotation register turns `|m>|k>` into
//! `|m>|~k>`. Rows of the two-dimensional irreps are then already in place;
//! only the `x = 0` sector (the low `n - 1` bits) has to mix the reflection
//! bit with a Hadamard, after a conditional phase `omega^{m p}` on the
//! reflection bit `m` and the top rotation bit `p`.
//!
//! Output encoding, for `N = 2^n`: `rho_A -> 0`, `rho_B -> N`,
//! `rho_C -> N/2`, `rho_D -> N + N/2`, and for the two-dimensional irreps
//! `phi_00(l) -> l`, `phi_11(l) -> N - l`, `phi_10(l) -> N + l`,
//! `phi_01(l) -> 2N - l`.

use std::f64::consts::PI;

use super::GroupRegister;
use crate::circuit::sim::{restricted_unitary, UNITARY_QUBIT_CAP};
use crate::circuit::{Circuit, Control, Gate};
use crate::error::{Error, Result};
use crate::group::{DihedralOrder, IrrepLabel};
use crate::linalg::{cis, global_phase_distance, DenseOperator, C64, ONE};
use crate::spectral::fourier_matrix;

/// Phase base that reproduces the Fourier matrix for every `N`.
pub const FOURIER_OMEGA: C64 = ONE;

/// Tolerance used when matching candidate circuits against the Fourier matrix.
pub const FOURIER_TOLERANCE: f64 = 1e-10;

/// Textbook QFT on `qubits` (most significant first):
/// `|k> -> 2^{-n/2} sum_j e^{2 pi i j k / 2^n} |j>`.
pub fn append_qft(c: &mut Circuit, qubits: &[usize]) {
    let n = qubits.len();
    for i in 0..n {
        c.add(Gate::h(qubits[i]));
        for j in i + 1..n {
            let theta = 2.0 * PI / (1u64 << (j - i + 1)) as f64;
            c.add(Gate::cphase(qubits[j], qubits[i], theta));
        }
    }
    for i in 0..n / 2 {
        c.add(Gate::swap(qubits[i], qubits[n - 1 - i]));
    }
}

pub fn build_qft_cyclic(n: usize) -> Circuit {
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n, format!("qft-{n}"));
    append_qft(&mut c, &qubits);
    c
}

/// `Phi(omega)|m>|p> = omega^{m p}|m>|p>` via a CCPHASE kicked back from an
/// ancilla held in `|1>` for the duration.
pub fn append_phi(c: &mut Circuit, m: usize, p: usize, anc: usize, omega: C64) {
    c.add(Gate::x(anc));
    c.add(Gate::ccphase(m, p, anc, omega.arg()));
    c.add(Gate::x(anc));
}

pub fn append_change_of_basis(c: &mut Circuit, reg: &GroupRegister, anc: usize, omega: C64) {
    append_phi(c, reg.m, reg.k[0], anc, omega);
    let x_zero: Vec<Control> = reg.k[1..].iter().map(|&q| Control::on0(q)).collect();
    c.add(Gate::h(reg.m).with_controls(&x_zero));
}

/// Qubits `[m, k_{n-1} .. k_0, ancilla]`.
pub fn build_change_of_basis(order: DihedralOrder) -> Circuit {
    change_of_basis_with(order, FOURIER_OMEGA)
}

pub fn change_of_basis_with(order: DihedralOrder, omega: C64) -> Circuit {
    let reg = GroupRegister::contiguous(0, order);
    let anc = reg.width();
    let mut c = Circuit::new(anc + 1, format!("change-of-basis-{order}"));
    append_change_of_basis(&mut c, &reg, anc, omega);
    c
}

pub fn append_fourier(c: &mut Circuit, reg: &GroupRegister, anc: usize, omega: C64) {
    append_qft(c, &reg.k);
    append_change_of_basis(c, reg, anc, omega);
}

/// Qubits `[m, k_{n-1} .. k_0, ancilla]`; the ancilla starts and ends in `|0>`.
pub fn build_fourier(order: DihedralOrder) -> Circuit {
    fourier_with(order, FOURIER_OMEGA)
}

pub fn fourier_with(order: DihedralOrder, omega: C64) -> Circuit {
    let reg = GroupRegister::contiguous(0, order);
    let anc = reg.width();
    let mut c = Circuit::new(anc + 1, format!("fourier-{order}"));
    append_fourier(&mut c, &reg, anc, omega);
    c
}

/// Computational basis index holding Fourier row `label`.
pub fn fourier_output_index(order: DihedralOrder, label: IrrepLabel) -> Result<usize> {
    label.validate(order)?;
    let n = order.get() as usize;
    Ok(match label {
        IrrepLabel::A => 0,
        IrrepLabel::B => n,
        IrrepLabel::C => n / 2,
        IrrepLabel::D => n + n / 2,
        IrrepLabel::TwoDim { l, i, j } => {
            let l = l as usize;
            match (i, j) {
                (0, 0) => l,
                (1, 1) => n - l,
                (1, 0) => n + l,
                _ => 2 * n - l,
            }
        }
    })
}

/// The Fourier matrix with rows moved to the circuit's output encoding.
pub fn fourier_matrix_in_circuit_order(order: DihedralOrder) -> Result<DenseOperator> {
    let f = fourier_matrix(order)?;
    let mut out = DenseOperator::zeros(f.entries.nrows(), f.entries.ncols());
    for (r, &label) in f.rows.iter().enumerate() {
        out.set_row(fourier_output_index(order, label)?, &f.entries.row(r));
    }
    Ok(out)
}

/// Distance to the Fourier matrix up to a global phase, and ancilla leakage.
pub fn fourier_distance(order: DihedralOrder, circuit: &Circuit) -> Result<(f64, f64)> {
    let data: Vec<usize> = (0..order.register_width()).collect();
    let (u, leak) = restricted_unitary(circuit, &data)?;
    let (dist, _) = global_phase_distance(&u, &fourier_matrix_in_circuit_order(order)?);
    Ok((dist, leak))
}

/// The phase base as printed for the kick-back gadget, `e^{i pi N/2}`.
pub fn printed_omega(order: DihedralOrder) -> C64 {
    cis(PI * order.get() as f64 / 2.0)
}

/// Picks the phase base for the gadget by matching against the Fourier
/// matrix. The printed value is tried first, then the fourth roots of unity.
pub fn resolve_omega(order: DihedralOrder) -> Result<C64> {
    if order.register_width() + 1 > UNITARY_QUBIT_CAP {
        return Err(Error::resource(format!("{order} is too wide to resolve against the dense oracle")));
    }
    let candidates = [printed_omega(order), ONE, -ONE, C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    for omega in candidates {
        let (dist, leak) = fourier_distance(order, &fourier_with(order, omega))?;
        if dist < FOURIER_TOLERANCE && leak < FOURIER_TOLERANCE {
            return Ok(omega);
        }
    }
    Err(Error::Consistency(format!("no phase base reproduces the Fourier matrix for {order}")))
}
