//! Reversible binary arithmetic on rotation registers.
//!
//! Registers are passed most significant bit first. Inside the functions the
//! helper `bit(reg, j)` names bit `j` counting from the least significant end.

use crate::circuit::{Circuit, Control, Gate, Polarity};
use crate::error::{Error, Result};
use crate::group::DihedralOrder;

fn bit(reg: &[usize], j: usize) -> usize {
    reg[reg.len() - 1 - j]
}

/// Clean ancillas needed by [`append_controlled_increment`] on `n` bits.
pub fn increment_ancillas(n: usize) -> usize {
    n.saturating_sub(2)
}

/// Flips every bit of `k` when `ctrl` fires: one CNOT per bit.
pub fn append_controlled_ones_complement(c: &mut Circuit, ctrl: Control, k: &[usize]) {
    for &q in k {
        c.add(Gate::x(q).controlled_by(ctrl));
    }
}

/// `|k> -> |k + 1 mod 2^n>` when `ctrl` fires.
///
/// Partial ANDs `a_j = ctrl & k_0 & ... & k_{j-1}` for `j = 1 .. n-2` are
/// built in clean ancillas, the top bit is flipped from `a_{n-2}`, and the
/// chain is unwound from the top: flip `k_j` from `a_j`, then erase `a_j`
/// while `k_{j-1}` still holds its input value. Uses `2n - 3` Toffolis.
pub fn append_controlled_increment(c: &mut Circuit, ctrl: Control, k: &[usize], anc: &[usize]) {
    let n = k.len();
    assert!(anc.len() >= increment_ancillas(n), "increment needs {} ancillas", increment_ancillas(n));
    if n == 0 {
        return;
    }
    // and_gate(j) writes a_j into anc[j-1] from a_{j-1} (or ctrl) and k_{j-1}
    let and_gate = |j: usize| {
        let prev = if j == 1 { ctrl } else { Control::on1(anc[j - 2]) };
        Gate::x(anc[j - 1]).with_controls(&[prev, Control::on1(bit(k, j - 1))])
    };
    if n >= 2 {
        for j in 1..n - 1 {
            c.add(and_gate(j));
        }
        let prev = if n == 2 { ctrl } else { Control::on1(anc[n - 3]) };
        c.add(Gate::x(bit(k, n - 1)).with_controls(&[prev, Control::on1(bit(k, n - 2))]));
        for j in (1..n - 1).rev() {
            c.add(Gate::cnot(anc[j - 1], bit(k, j)));
            c.add(and_gate(j));
        }
    }
    c.add(Gate::x(bit(k, 0)).controlled_by(ctrl));
}

/// `|k> -> |2^n - k mod 2^n>` when `ctrl` fires: complement then increment.
pub fn append_controlled_twos_complement(c: &mut Circuit, ctrl: Control, k: &[usize], anc: &[usize]) {
    append_controlled_ones_complement(c, ctrl, k);
    append_controlled_increment(c, ctrl, k, anc);
}

/// The sum-and-carry network for `A <- A + B mod 2^n`.
///
/// Each carry `c_{i+1} = A_i B_i + A_i c_i + B_i c_i` is accumulated with one
/// Toffoli per product term, and each sum bit `A_i ^= B_i ^ c_i` with one CNOT
/// per term. The lowest bit has no incoming carry and the highest produces
/// none, so the cost is `20n - 31` two-qubit equivalents for `n >= 2`.
/// Carries are left holding their values.
pub fn append_adder_forward(c: &mut Circuit, a: &[usize], b: &[usize], carry: &[usize]) {
    let n = a.len();
    assert_eq!(b.len(), n);
    assert!(carry.len() + 1 >= n, "adder needs n-1 carry qubits");
    if n == 1 {
        c.add(Gate::cnot(b[0], a[0]));
        return;
    }
    let cq = |i: usize| carry[i - 1];
    c.add(Gate::toffoli(bit(a, 0), bit(b, 0), cq(1)));
    c.add(Gate::cnot(bit(b, 0), bit(a, 0)));
    for i in 1..n - 1 {
        let (ai, bi) = (bit(a, i), bit(b, i));
        c.add(Gate::toffoli(ai, bi, cq(i + 1)));
        c.add(Gate::toffoli(ai, cq(i), cq(i + 1)));
        c.add(Gate::toffoli(bi, cq(i), cq(i + 1)));
        c.add(Gate::cnot(bi, ai));
        c.add(Gate::cnot(cq(i), ai));
    }
    c.add(Gate::cnot(bit(b, n - 1), bit(a, n - 1)));
    c.add(Gate::cnot(cq(n - 1), bit(a, n - 1)));
}

/// Erases the carries left by [`append_adder_forward`] without disturbing
/// the sum: working down from the top, each sum bit is turned back into its
/// input, the carry above it is uncomputed, and the sum bit is redone.
pub fn append_adder_cleanup(c: &mut Circuit, a: &[usize], b: &[usize], carry: &[usize]) {
    let n = a.len();
    if n < 2 {
        return;
    }
    let cq = |i: usize| carry[i - 1];
    for i in (1..n - 1).rev() {
        let (ai, bi) = (bit(a, i), bit(b, i));
        c.add(Gate::cnot(cq(i), ai));
        c.add(Gate::cnot(bi, ai));
        c.add(Gate::toffoli(bi, cq(i), cq(i + 1)));
        c.add(Gate::toffoli(ai, cq(i), cq(i + 1)));
        c.add(Gate::toffoli(ai, bi, cq(i + 1)));
        c.add(Gate::cnot(bi, ai));
        c.add(Gate::cnot(cq(i), ai));
    }
    c.add(Gate::cnot(bit(b, 0), bit(a, 0)));
    c.add(Gate::toffoli(bit(a, 0), bit(b, 0), cq(1)));
    c.add(Gate::cnot(bit(b, 0), bit(a, 0)));
}

pub fn append_in_place_adder(c: &mut Circuit, a: &[usize], b: &[usize], carry: &[usize]) {
    append_adder_forward(c, a, b, carry);
    append_adder_cleanup(c, a, b, carry);
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > 30 {
        return Err(Error::domain(format!("register width must lie in 1..=30, got {n}")));
    }
    Ok(())
}

/// Qubits `[m, k_{n-1} .. k_0]`; flips `k` when `m` matches `polarity`.
pub fn build_controlled_ones_complement(n: usize, polarity: Polarity) -> Result<Circuit> {
    check_width(n)?;
    let mut c = Circuit::new(n + 1, format!("ones-complement-n{n}"));
    let k: Vec<usize> = (1..=n).collect();
    append_controlled_ones_complement(&mut c, Control { qubit: 0, polarity }, &k);
    Ok(c)
}

/// Qubits `[m, k_{n-1} .. k_0, ancillas]`; increments `k` when `m = 0`.
pub fn build_controlled_increment(n: usize) -> Result<Circuit> {
    check_width(n)?;
    let anc: Vec<usize> = (n + 1..n + 1 + increment_ancillas(n)).collect();
    let mut c = Circuit::new(n + 1 + anc.len(), format!("increment-n{n}"));
    let k: Vec<usize> = (1..=n).collect();
    append_controlled_increment(&mut c, Control::on0(0), &k, &anc);
    Ok(c)
}

/// Qubits `[m_2, k_{n-1} .. k_0, ancillas]`; negates `k` mod N when `m_2 = 1`.
pub fn build_conditional_twos_complement(order: DihedralOrder) -> Result<Circuit> {
    let n = order.exponent() as usize;
    let anc: Vec<usize> = (n + 1..n + 1 + increment_ancillas(n)).collect();
    let mut c = Circuit::new(n + 1 + anc.len(), format!("twos-complement-{order}"));
    let k: Vec<usize> = (1..=n).collect();
    append_controlled_twos_complement(&mut c, Control::on1(0), &k, &anc);
    Ok(c)
}

fn adder_layout(n: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let a = (0..n).collect();
    let b = (n..2 * n).collect();
    let carry = (2 * n..3 * n - 1).collect();
    (a, b, carry)
}

/// Qubits `[A (n), B (n), carries (n-1)]`; `|A>|B> -> |A+B mod 2^n>|B>` with
/// the carries returned to zero.
pub fn build_in_place_adder(n: usize) -> Result<Circuit> {
    check_width(n)?;
    let (a, b, carry) = adder_layout(n);
    let mut c = Circuit::new(3 * n - 1, format!("adder-n{n}"));
    append_in_place_adder(&mut c, &a, &b, &carry);
    Ok(c)
}

/// The sum-and-carry network alone, on the same layout as
/// [`build_in_place_adder`].
pub fn adder_forward_block(n: usize) -> Result<Circuit> {
    check_width(n)?;
    let (a, b, carry) = adder_layout(n);
    let mut c = Circuit::new(3 * n - 1, format!("adder-forward-n{n}"));
    append_adder_forward(&mut c, &a, &b, &carry);
    Ok(c)
}
