//! The inversion gate `|g> -> |g^{-1}>`.
//!
//! Reflections are involutions, so only `m = 0` states change, and for those
//! `k -> N - k` is the two's complement of `k`.

use super::arithmetic::{append_controlled_twos_complement, increment_ancillas};
use super::GroupRegister;
use crate::circuit::{Circuit, Control, Gate};
use crate::error::Result;
use crate::group::DihedralOrder;

/// Ancillas needed by [`append_inversion`].
pub fn inversion_ancillas(order: DihedralOrder) -> usize {
    increment_ancillas(order.exponent() as usize)
}

pub fn append_inversion(c: &mut Circuit, reg: &GroupRegister, anc: &[usize]) {
    append_controlled_twos_complement(c, Control::on0(reg.m), &reg.k, anc);
}

/// Qubits `[m, k_{n-1} .. k_0, ancillas]`.
pub fn build_inversion(order: DihedralOrder) -> Result<Circuit> {
    let reg = GroupRegister::contiguous(0, order);
    let width = reg.width();
    let anc: Vec<usize> = (width..width + inversion_ancillas(order)).collect();
    let mut c = Circuit::new(width + anc.len(), format!("inversion-{order}"));
    append_inversion(&mut c, &reg, &anc);
    Ok(c)
}

/// Four-gate inversion for D_8 on `[m, k_2, k_1, k_0]`, no ancillas.
///
/// Negation mod 8 keeps `k_0`, flips `k_1` exactly when `k_0 = 1`, and flips
/// `k_2` unless `k_1 = k_0 = 0`. Both upper bits are flipped outright and the
/// two exceptions are undone afterwards; the CNOT pair that the generic
/// complement-then-increment circuit spends on `k_0` cancels.
pub fn build_inversion_d8_simplified() -> Circuit {
    let (m, k2, k1, k0) = (0, 1, 2, 3);
    let mut c = Circuit::new(4, "inversion-D_8-simplified");
    c.add(Gate::x(k2).controlled_by(Control::on0(m)));
    c.add(Gate::x(k1).controlled_by(Control::on0(m)));
    c.add(Gate::x(k2).with_controls(&[Control::on0(m), Control::on1(k1), Control::on0(k0)]));
    c.add(Gate::x(k1).with_controls(&[Control::on0(m), Control::on0(k0)]));
    c
}
