//! Trace gates `|g> -> e^{i theta Re Tr g}|g>`.
//!
//! Two constructions are provided. The direct one expands the diagonal
//! `2 (1-m) cos(2 pi k / N)` in Pauli-Z strings and exponentiates each string
//! with a CNOT parity ladder around one controlled Z rotation; it is exact.
//! The ancilla-assisted one loads b-bit truncations of sin and cos from a
//! classical table, kicks the phase back bit by bit, and unloads the table.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::GroupRegister;
use crate::circuit::{Circuit, Control, Gate, OracleTable};
use crate::error::{Error, Result};
use crate::group::DihedralOrder;

/// Largest register accepted by [`pauli_decompose_diagonal`].
pub const MAX_DECOMPOSE_QUBITS: usize = 12;

/// Coefficients `a_alpha = 2^{-q} Tr[Z_alpha H]` of a diagonal operator.
///
/// Keys are qubit masks: bit `j` of a key set means `Z` acts on qubit `j`
/// (qubit 0 being the leading bit of the diagonal's index). Coefficients
/// below `1e-13` in magnitude are dropped.
pub fn pauli_decompose_diagonal(diagonal: &[f64]) -> Result<BTreeMap<u64, f64>> {
    if !diagonal.len().is_power_of_two() {
        return Err(Error::domain("diagonal length must be a power of two"));
    }
    let q = diagonal.len().trailing_zeros() as usize;
    if q > MAX_DECOMPOSE_QUBITS {
        return Err(Error::resource(format!("{q} qubits exceeds the decomposition cap")));
    }
    // fast Walsh-Hadamard transform: w[a] = sum_x (-1)^{popcount(a & x)} d[x]
    let mut w = diagonal.to_vec();
    let mut h = 1;
    while h < w.len() {
        for block in (0..w.len()).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (w[i], w[i + h]);
                w[i] = x + y;
                w[i + h] = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / diagonal.len() as f64;
    let mut terms = BTreeMap::new();
    for (index_mask, &v) in w.iter().enumerate() {
        let a = v * scale;
        if a.abs() > 1e-13 {
            // index bit (q-1-j) belongs to qubit j
            let qubit_mask = (0..q).filter(|j| index_mask >> (q - 1 - j) & 1 == 1).fold(0u64, |m, j| m | 1 << j);
            terms.insert(qubit_mask, a);
        }
    }
    Ok(terms)
}

/// Rebuilds the diagonal from its Pauli-Z coefficients.
pub fn reconstruct_diagonal(terms: &BTreeMap<u64, f64>, qubits: usize) -> Vec<f64> {
    (0..1usize << qubits)
        .map(|x| {
            terms
                .iter()
                .map(|(&mask, &a)| {
                    let ones = (0..qubits).filter(|j| mask >> j & 1 == 1 && x >> (qubits - 1 - j) & 1 == 1).count();
                    if ones % 2 == 0 { a } else { -a }
                })
                .sum()
        })
        .collect()
}

/// The diagonal `2 (1-m) cos(2 pi k / N)` in group-index order.
pub fn trace_diagonal(order: DihedralOrder) -> Vec<f64> {
    order.elements().map(crate::group::re_trace).collect()
}

pub fn append_trace_direct(c: &mut Circuit, reg: &GroupRegister, order: DihedralOrder, theta: f64) {
    let n = reg.k.len();
    let cosines: Vec<f64> =
        (0..order.get()).map(|k| 2.0 * (2.0 * PI * k as f64 / order.get() as f64).cos()).collect();
    let terms = pauli_decompose_diagonal(&cosines).expect("rotation register within the decomposition cap");
    let select = Control::on0(reg.m);
    for (&mask, &a) in &terms {
        if mask == 0 {
            c.add(Gate::x(reg.m));
            c.add(Gate::phase(reg.m, theta * a));
            c.add(Gate::x(reg.m));
            continue;
        }
        let qs: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| reg.k[j]).collect();
        let (&last, rest) = qs.split_last().expect("nonempty mask");
        for &q in rest {
            c.add(Gate::cnot(q, last));
        }
        // e^{i theta a Z} = RZ(-2 theta a)
        c.add(Gate::rz(last, -2.0 * theta * a).controlled_by(select));
        for &q in rest.iter().rev() {
            c.add(Gate::cnot(q, last));
        }
    }
}

/// Qubits `[m, k_{n-1} .. k_0]`; exact diagonal trace phase.
pub fn build_trace_direct(order: DihedralOrder, theta: f64) -> Result<Circuit> {
    if !theta.is_finite() {
        return Err(Error::domain("theta must be finite"));
    }
    let reg = GroupRegister::contiguous(0, order);
    let mut c = Circuit::new(reg.width(), format!("trace-direct-{order}"));
    append_trace_direct(&mut c, &reg, order, theta);
    Ok(c)
}

/// Controlled rotations imprinting `e^{i 2 theta sign x}` on `|x>`, where
/// `x = sum_j x_j 2^{-j}` is held in `x_reg` (most significant bit first) and
/// `target` is a qubit whose value flips the sign: `|0>` gives the phase,
/// `|1>` its conjugate.
pub fn append_phase_kickback(
    c: &mut Circuit,
    x_reg: &[usize],
    target: usize,
    extra: &[Control],
    theta: f64,
    sign: f64,
) {
    for (i, &q) in x_reg.iter().enumerate() {
        let j = i as i32 + 1;
        let angle = -sign * theta * 2f64.powi(2 - j);
        c.add(Gate::rz(target, angle).controlled_by(Control::on1(q)).with_controls(extra));
    }
}

/// Qubits `[x_1 .. x_b, t]`. With `t = |0>`, `|x> -> e^{i 2 theta x}|x>`.
pub fn build_phase_kickback(b: usize, theta: f64) -> Result<Circuit> {
    if b == 0 || b > 62 {
        return Err(Error::domain(format!("accuracy bits must lie in 1..=62, got {b}")));
    }
    let x: Vec<usize> = (0..b).collect();
    let mut c = Circuit::new(b + 1, format!("kickback-b{b}"));
    append_phase_kickback(&mut c, &x, b, &[], theta, 1.0);
    Ok(c)
}

/// How the classical sin/cos tables are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrigMethod {
    /// Correctly rounded library functions.
    Libm,
    /// `(1 + i a/R - (a/R)^2 / 2)^R` with `R = 2^r`, squared `r` times in
    /// fixed point.
    RepeatedSquaring { r: u32 },
}

/// Fixed-point approximation of `(cos a, sin a)` by repeated squaring.
pub fn repeated_squaring_cis(angle: f64, r: u32, frac_bits: u32) -> (f64, f64) {
    assert!(frac_bits <= 60, "fixed-point width too large");
    let one = 1i128 << frac_bits;
    let to_fixed = |v: f64| (v * one as f64).round() as i128;
    let small = angle / 2f64.powi(r as i32);
    let mut re = to_fixed(1.0 - small * small / 2.0);
    let mut im = to_fixed(small);
    for _ in 0..r {
        let new_re = (re * re - im * im) >> frac_bits;
        let new_im = (2 * re * im) >> frac_bits;
        re = new_re;
        im = new_im;
    }
    (re as f64 / one as f64, im as f64 / one as f64)
}

/// b-bit tables of `sin` and `cos` of `2 pi x / N` for `x < max(N/4, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTables {
    pub sin: Vec<u64>,
    pub cos: Vec<u64>,
    /// Largest deviation of the method's real-valued output from the exact
    /// functions, before truncation to b bits.
    pub method_error: f64,
}

fn truncate(v: f64, b: usize) -> u64 {
    let scaled = (v.clamp(0.0, 1.0) * 2f64.powi(b as i32)).floor() as u64;
    scaled.min((1u64 << b) - 1)
}

pub fn trig_tables(order: DihedralOrder, b: usize, method: TrigMethod) -> TrigTables {
    let entries = (order.get() / 4).max(1) as usize;
    let mut tables = TrigTables { sin: Vec::new(), cos: Vec::new(), method_error: 0.0 };
    for x in 0..entries {
        let a = 2.0 * PI * x as f64 / order.get() as f64;
        let (cos, sin) = match method {
            TrigMethod::Libm => (a.cos(), a.sin()),
            TrigMethod::RepeatedSquaring { r } => repeated_squaring_cis(a, r, (b as u32 + r + 16).min(60)),
        };
        tables.method_error = tables.method_error.max((cos - a.cos()).abs()).max((sin - a.sin()).abs());
        tables.sin.push(truncate(sin, b));
        tables.cos.push(truncate(cos, b));
    }
    tables
}

/// Ancilla-assisted trace gate on `[g (n+1), sin (b), cos (b), flag]`.
///
/// Writing `k = k_{n-1} N/2 + k_{n-2} N/4 + k'` with `x = 2 pi k' / N` in the
/// first quadrant,
/// `2 cos(2 pi k / N) = 2 (-1)^{k_{n-1}} (cos x if k_{n-2} = 0, else -sin x)`.
/// The flag qubit holds `m = 0 and k_{n-2} = c` for each branch `c` while the
/// matching table register is kicked back with `k_{n-1}` as the sign qubit.
pub fn build_trace_ancilla(order: DihedralOrder, theta: f64, b: usize, method: TrigMethod) -> Result<Circuit> {
    if b < 2 {
        return Err(Error::domain(format!("at least 2 accuracy bits are needed, got {b}")));
    }
    if b > 30 {
        return Err(Error::domain(format!("accuracy bits above 30 are not supported, got {b}")));
    }
    if !theta.is_finite() {
        return Err(Error::domain("theta must be finite"));
    }
    let reg = GroupRegister::contiguous(0, order);
    let n = reg.k.len();
    let w = reg.width();
    let sin: Vec<usize> = (w..w + b).collect();
    let cos: Vec<usize> = (w + b..w + 2 * b).collect();
    let flag = w + 2 * b;
    let mut c = Circuit::new(w + 2 * b + 1, format!("trace-ancilla-{order}-b{b}"));

    let sign_qubit = reg.k[0];
    let select = (n >= 2).then(|| reg.k[1]);
    let low: Vec<usize> = if n > 2 { reg.k[2..].to_vec() } else { Vec::new() };
    let tables = trig_tables(order, b, method);
    let values: Vec<u64> = tables.sin.iter().zip(&tables.cos).map(|(&s, &co)| (s << b) | co).collect();
    let mut targets = low.clone();
    targets.extend(&sin);
    targets.extend(&cos);
    let load = Gate::oracle(OracleTable::XorTable { inputs: low.len(), values }, targets);

    c.add(load.clone());
    let flag_gate = |branch: Control| {
        let mut controls = vec![Control::on0(reg.m)];
        controls.extend(select.map(|_| branch));
        Gate::x(flag).with_controls(&controls)
    };
    let cos_branch = select.map_or(Control::on0(reg.m), Control::on0);
    c.add(flag_gate(cos_branch));
    append_phase_kickback(&mut c, &cos, sign_qubit, &[Control::on1(flag)], theta, 1.0);
    c.add(flag_gate(cos_branch));
    if let Some(sel) = select {
        let sin_branch = Control::on1(sel);
        c.add(flag_gate(sin_branch));
        append_phase_kickback(&mut c, &sin, sign_qubit, &[Control::on1(flag)], theta, -1.0);
        c.add(flag_gate(sin_branch));
    }
    c.add(load);
    Ok(c)
}
