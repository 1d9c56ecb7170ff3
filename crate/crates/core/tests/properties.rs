use std::f64::consts::PI;

use dihedral_gauge::circuit::sim::is_monomial;
use dihedral_gauge::circuit::{apply, apply_basis, StateVector, ToffoliStyle};
use dihedral_gauge::gates::{build_fourier, build_inversion, build_multiplication, build_trace_direct};
use dihedral_gauge::group::{decode, encode, fundamental_rep, identity, inverse, multiply, re_trace, GroupElement};
use dihedral_gauge::linalg::{C64, ZERO};
use dihedral_gauge::DihedralOrder;
use proptest::prelude::*;

fn order_strategy() -> impl Strategy<Value = DihedralOrder> {
    (1u32..=5).prop_map(|n| DihedralOrder::from_exponent(n).unwrap())
}

fn element(order: DihedralOrder) -> impl Strategy<Value = GroupElement> {
    (0..order.group_size()).prop_map(move |i| GroupElement::from_index(order, i).unwrap())
}

fn triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    order_strategy().prop_flat_map(|o| (element(o), element(o), element(o)))
}

fn amplitudes(qubits: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << qubits)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

proptest! {
    #[test]
    fn group_axioms((g, h, k) in triple()) {
        let e = identity(g.order());
        prop_assert_eq!(multiply(multiply(g, h).unwrap(), k).unwrap(), multiply(g, multiply(h, k).unwrap()).unwrap());
        prop_assert_eq!(multiply(g, e).unwrap(), g);
        prop_assert_eq!(multiply(inverse(g), g).unwrap(), e);
        prop_assert_eq!(inverse(inverse(g)), g);
    }

    #[test]
    fn representation_is_a_homomorphism((g, h, _) in triple()) {
        let gh = fundamental_rep(multiply(g, h).unwrap());
        let prod = fundamental_rep(g) * fundamental_rep(h);
        prop_assert!((gh - prod).norm() < 1e-12);
        prop_assert!((re_trace(g) - fundamental_rep(g).trace().re).abs() < 1e-12);
    }

    #[test]
    fn trace_is_a_class_function((g, h, _) in triple()) {
        let conj = multiply(multiply(h, g).unwrap(), inverse(h)).unwrap();
        prop_assert!((re_trace(conj) - re_trace(g)).abs() < 1e-12);
    }

    #[test]
    fn encoding_round_trips((g, _, _) in triple()) {
        prop_assert_eq!(decode(g.order(), &encode(g)).unwrap(), g);
    }

    #[test]
    fn inversion_circuit_is_an_involution((g, _, _) in triple()) {
        let c = build_inversion(g.order()).unwrap();
        let shift = c.qubit_count() - g.order().register_width();
        let input = (g.index() as u64) << shift;
        let (once, _) = apply_basis(&c, input).unwrap();
        let (twice, _) = apply_basis(&c, once).unwrap();
        prop_assert_eq!(twice, input);
    }

    #[test]
    fn multiplication_circuit_matches_group((g, h, _) in triple()) {
        let order = g.order();
        let c = build_multiplication(order, ToffoliStyle::Abstract).unwrap();
        prop_assert!(is_monomial(&c));
        let w = order.register_width();
        let shift = c.qubit_count() - 2 * w;
        let input = (((g.index() << w) | h.index()) as u64) << shift;
        let want = (((g.index() << w) | multiply(g, h).unwrap().index()) as u64) << shift;
        prop_assert_eq!(apply_basis(&c, input).unwrap().0, want);
    }

    #[test]
    fn trace_phases_add(n in 1u32..=3, a in -PI..PI, b in -PI..PI, idx in 0usize..16) {
        let order = DihedralOrder::from_exponent(n).unwrap();
        let g = GroupElement::from_index(order, idx % order.group_size()).unwrap();
        let phase = |t: f64| apply_basis(&build_trace_direct(order, t).unwrap(), g.index() as u64).unwrap().1;
        prop_assert!((phase(a) * phase(b) - phase(a + b)).norm() < 1e-12);
    }

    #[test]
    fn simulation_is_linear(x in amplitudes(3), y in amplitudes(3), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let c = build_fourier(DihedralOrder::new(2).unwrap());
        let alpha = C64::new(re, im);
        let combined: Vec<C64> = x.iter().zip(&y).map(|(a, b)| alpha * a + b).collect();
        let run = |v: Vec<C64>| apply(&c, &StateVector::from_amplitudes(v).unwrap()).unwrap().into_amplitudes();
        let (fx, fy, fc) = (run(x), run(y), run(combined));
        let gap = fx.iter().zip(&fy).zip(&fc).map(|((a, b), c)| (alpha * a + b - c).norm()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-10);
    }

    #[test]
    fn simulation_preserves_norm(x in amplitudes(4)) {
        let c = build_fourier(DihedralOrder::new(4).unwrap());
        let norm = |v: &[C64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let before = norm(&x);
        prop_assume!(before > 1e-6);
        let out = apply(&c, &StateVector::from_amplitudes(x).unwrap()).unwrap().into_amplitudes();
        prop_assert!((norm(&out) - before).abs() < 1e-10 * before);
        prop_assert!(out.iter().all(|a| *a == ZERO || a.is_finite()));
    }
}
