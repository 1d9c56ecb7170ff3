//! Left multiplication `|g>|h> -> |g>|gh>`.
//!
//! With `g = s^{m1} r^{k1}` and `h = s^{m2} r^{k2}` the product has
//! reflection bit `m1 xor m2` and rotation `(-1)^{m2} k1 + k2 mod N`. The
//! circuit negates `k1` when `m2 = 1`, adds it into `k2`, restores `k1`
//! (negation is an involution), and finally folds `m1` into `m2`.

use super::arithmetic::{append_controlled_twos_complement, append_in_place_adder, increment_ancillas};
use super::inversion::append_inversion;
use super::GroupRegister;
use crate::circuit::{adjoint, Circuit, Control, Gate, ToffoliStyle};
use crate::error::{Error, Result};
use crate::group::DihedralOrder;

/// Ancillas needed by [`append_multiplication`]: the adder's carries, which
/// also cover the increment inside the conditional negation.
pub fn multiplication_ancillas(order: DihedralOrder) -> usize {
    let n = order.exponent() as usize;
    (n - 1).max(increment_ancillas(n))
}

pub fn append_multiplication(c: &mut Circuit, g: &GroupRegister, h: &GroupRegister, anc: &[usize]) {
    let ctrl = Control::on1(h.m);
    append_controlled_twos_complement(c, ctrl, &g.k, anc);
    append_in_place_adder(c, &h.k, &g.k, anc);
    append_controlled_twos_complement(c, ctrl, &g.k, anc);
    c.add(Gate::cnot(g.m, h.m));
}

/// The six-gate D_4 multiplier on registers `(a1, b1, c1)` and `(a2, b2, c2)`.
///
/// The low rotation bit is `c1 xor c2`; the high bit picks up `b1` plus the
/// carry `c1 c2` when `m2 = 0`, while for `m2 = 1` negating `k1` turns that
/// carry into `c1 (not c2)`. Toggling `c2` by `a2` around the Toffoli selects
/// between the two.
pub fn append_multiplication_d4(c: &mut Circuit, g: &GroupRegister, h: &GroupRegister) {
    let (a1, b1, c1) = (g.m, g.k[0], g.k[1]);
    let (a2, b2, c2) = (h.m, h.k[0], h.k[1]);
    c.add(Gate::cnot(a2, c2));
    c.add(Gate::toffoli(c1, c2, b2));
    c.add(Gate::cnot(a2, c2));
    c.add(Gate::cnot(c1, c2));
    c.add(Gate::cnot(b1, b2));
    c.add(Gate::cnot(a1, a2));
}

fn standard_layout(order: DihedralOrder) -> (GroupRegister, GroupRegister, Vec<usize>) {
    let w = order.register_width();
    let g = GroupRegister::contiguous(0, order);
    let h = GroupRegister::contiguous(w, order);
    let anc = (2 * w..2 * w + multiplication_ancillas(order)).collect();
    (g, h, anc)
}

/// Qubits `[g (n+1), h (n+1), ancillas]`.
pub fn build_multiplication(order: DihedralOrder, style: ToffoliStyle) -> Result<Circuit> {
    let (g, h, anc) = standard_layout(order);
    let mut c = Circuit::new(2 * g.width() + anc.len(), format!("multiplication-{order}"));
    append_multiplication(&mut c, &g, &h, &anc);
    Ok(c.lower_toffolis(style))
}

/// The specialised D_4 circuit on `[g (3), h (3)]`.
pub fn build_multiplication_d4_specialized(style: ToffoliStyle) -> Circuit {
    let order = DihedralOrder::new(4).expect("4 is a valid order");
    let mut c = Circuit::new(6, "multiplication-D_4-specialized");
    append_multiplication_d4(&mut c, &GroupRegister::contiguous(0, order), &GroupRegister::contiguous(3, order));
    c.lower_toffolis(style)
}

/// `|g>|h> -> |g>|hg>` from two inversions of the second register around an
/// inverse left multiplication: `h -> h^{-1} -> g^{-1} h^{-1} = (hg)^{-1} -> hg`.
pub fn build_right_multiplication(order: DihedralOrder, style: ToffoliStyle) -> Result<Circuit> {
    let (g, h, anc) = standard_layout(order);
    let width = 2 * g.width() + anc.len();
    let mut forward = Circuit::new(width, "left");
    append_multiplication(&mut forward, &g, &h, &anc);
    let mut c = Circuit::new(width, format!("right-multiplication-{order}"));
    append_inversion(&mut c, &h, &anc);
    c.append(&adjoint(&forward))?;
    append_inversion(&mut c, &h, &anc);
    Ok(c.lower_toffolis(style))
}

/// Checks that `order` is D_4 before using the specialised multiplier.
pub fn require_d4(order: DihedralOrder) -> Result<()> {
    if order.get() != 4 {
        return Err(Error::domain(format!("the specialised multiplier is for D_4, not {order}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{apply_basis, sim::restricted_unitary};
    use crate::group::{inverse, multiply, GroupElement};
    use crate::linalg::max_abs_diff;

    fn d(n: u32) -> DihedralOrder {
        DihedralOrder::new(n).unwrap()
    }

    fn pair_index(order: DihedralOrder, g: GroupElement, h: GroupElement) -> u64 {
        ((g.index() << order.register_width()) | h.index()) as u64
    }

    #[test]
    fn d4_examples() {
        let c = build_multiplication(d(4), ToffoliStyle::Abstract).unwrap();
        let anc = multiplication_ancillas(d(4));
        assert_eq!(apply_basis(&c, 0b001_001 << anc).unwrap().0, 0b001_010 << anc);
        assert_eq!(apply_basis(&c, 0b100_100 << anc).unwrap().0, 0b100_000 << anc);
    }

    #[test]
    fn matches_group_table() {
        for order in [2, 4, 8, 16] {
            let order = d(order);
            let c = build_multiplication(order, ToffoliStyle::Abstract).unwrap();
            let anc = multiplication_ancillas(order);
            for g in order.elements() {
                for h in order.elements() {
                    let (out, ph) = apply_basis(&c, pair_index(order, g, h) << anc).unwrap();
                    let want = pair_index(order, g, multiply(g, h).unwrap()) << anc;
                    assert_eq!(out, want, "{g} * {h} in {order}");
                    assert_eq!(ph.re, 1.0);
                }
            }
        }
    }

    #[test]
    fn specialized_d4_equals_generic() {
        let spec = build_multiplication_d4_specialized(ToffoliStyle::Abstract);
        let generic = build_multiplication(d(4), ToffoliStyle::Abstract).unwrap();
        let data: Vec<usize> = (0..6).collect();
        let (a, _) = restricted_unitary(&spec, &data).unwrap();
        let (b, leak) = restricted_unitary(&generic, &data).unwrap();
        assert_eq!(leak, 0.0);
        assert_eq!(max_abs_diff(&a, &b), 0.0);
    }

    #[test]
    fn lowered_styles_agree() {
        let data: Vec<usize> = (0..6).collect();
        let reference = restricted_unitary(&build_multiplication(d(4), ToffoliStyle::Abstract).unwrap(), &data)
            .unwrap()
            .0;
        for style in [ToffoliStyle::CcphaseNative, ToffoliStyle::CnotDecomposition] {
            let (u, leak) = restricted_unitary(&build_multiplication(d(4), style).unwrap(), &data).unwrap();
            assert!(leak < 1e-12);
            assert!(max_abs_diff(&u, &reference) < 1e-12);
            let (s, _) = restricted_unitary(&build_multiplication_d4_specialized(style), &data).unwrap();
            assert!(max_abs_diff(&s, &reference) < 1e-12);
        }
    }

    #[test]
    fn right_multiplication_matches_table() {
        for order in [2, 4, 8] {
            let order = d(order);
            let c = build_right_multiplication(order, ToffoliStyle::Abstract).unwrap();
            let anc = multiplication_ancillas(order);
            for g in order.elements() {
                for h in order.elements() {
                    let out = apply_basis(&c, pair_index(order, g, h) << anc).unwrap().0;
                    assert_eq!(out, pair_index(order, g, multiply(h, g).unwrap()) << anc);
                }
            }
        }
    }

    #[test]
    fn multiplying_by_inverse_restores_register() {
        for order in [4, 8] {
            let order = d(order);
            let c = build_multiplication(order, ToffoliStyle::Abstract).unwrap();
            let anc = multiplication_ancillas(order);
            for g in order.elements() {
                for h in order.elements() {
                    let once = apply_basis(&c, pair_index(order, g, h) << anc).unwrap().0;
                    let gh = (once >> anc) as usize & (order.group_size() - 1);
                    let gh = GroupElement::from_index(order, gh).unwrap();
                    let back = apply_basis(&c, pair_index(order, inverse(g), gh) << anc).unwrap().0;
                    assert_eq!(back, pair_index(order, inverse(g), h) << anc);
                }
            }
        }
    }
}
