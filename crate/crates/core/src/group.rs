//! Exact algebra of the dihedral group D_N for N = 2^n.
//!
//! Elements are written s^m r^k with reflection bit `m` and rotation index
//! `k`. The linear index of an element is `N*m + k`, which is also the
//! computational basis index of its (n+1)-qubit encoding: the reflection
//! qubit is the leading bit, followed by `k` in binary, most significant bit
//! first. Every oracle in the crate uses this ordering.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest N for which [`group_table`] is materialised.
pub const MAX_TABLE_ORDER: u32 = 64;

/// The parameter N of D_N, restricted to powers of two N >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DihedralOrder(u32);

impl DihedralOrder {
    pub fn new(order: u32) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::domain(format!(
                "dihedral order must be a power of two >= 2, got {order}"
            )));
        }
        Ok(DihedralOrder(order))
    }

    /// D_{2^n}.
    pub fn from_exponent(n: u32) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::domain(format!("exponent n must lie in 1..=30, got {n}")));
        }
        Ok(DihedralOrder(1 << n))
    }

    /// N.
    pub fn get(self) -> u32 {
        self.0
    }

    /// n = log2 N, the width of the rotation register.
    pub fn exponent(self) -> u32 {
        self.0.trailing_zeros()
    }

    /// 2N, the number of group elements.
    pub fn group_size(self) -> usize {
        2 * self.0 as usize
    }

    /// n + 1, the width of a G-register.
    pub fn register_width(self) -> usize {
        self.exponent() as usize + 1
    }

    pub fn elements(self) -> impl Iterator<Item = GroupElement> {
        (0..self.group_size()).map(move |i| GroupElement::from_index(self, i).expect("index in range"))
    }
}

impl fmt::Display for DihedralOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D_{}", self.0)
    }
}

/// The element s^m r^k of D_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    m: u8,
    k: u32,
    order: DihedralOrder,
}

impl GroupElement {
    pub fn new(order: DihedralOrder, m: u8, k: u32) -> Result<Self> {
        if m > 1 {
            return Err(Error::domain(format!("reflection bit must be 0 or 1, got {m}")));
        }
        if k >= order.get() {
            return Err(Error::domain(format!("rotation index {k} out of range for {order}")));
        }
        Ok(GroupElement { m, k, order })
    }

    pub fn from_index(order: DihedralOrder, index: usize) -> Result<Self> {
        if index >= order.group_size() {
            return Err(Error::domain(format!("element index {index} out of range for {order}")));
        }
        let n = order.get() as usize;
        Ok(GroupElement {
            m: (index / n) as u8,
            k: (index % n) as u32,
            order,
        })
    }

    pub fn m(self) -> u8 {
        self.m
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn order(self) -> DihedralOrder {
        self.order
    }

    /// N*m + k.
    pub fn index(self) -> usize {
        self.order.get() as usize * self.m as usize + self.k as usize
    }

    pub fn is_identity(self) -> bool {
        self.m == 0 && self.k == 0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.m, self.k) {
            (0, 0) => write!(f, "e"),
            (0, k) => write!(f, "r^{k}"),
            (_, 0) => write!(f, "s"),
            (_, k) => write!(f, "s r^{k}"),
        }
    }
}

pub fn identity(order: DihedralOrder) -> GroupElement {
    GroupElement { m: 0, k: 0, order }
}

/// s^{m1} r^{k1} . s^{m2} r^{k2} = s^{m1+m2} r^{N m2 + (-1)^{m2} k1 + k2}.
pub fn multiply(g: GroupElement, h: GroupElement) -> Result<GroupElement> {
    if g.order != h.order {
        return Err(Error::domain(format!(
            "cannot multiply elements of {} and {}",
            g.order, h.order
        )));
    }
    let n = g.order.get() as i64;
    let signed_k1 = if h.m == 0 { g.k as i64 } else { -(g.k as i64) };
    let k = (n * h.m as i64 + signed_k1 + h.k as i64).rem_euclid(n) as u32;
    Ok(GroupElement {
        m: (g.m + h.m) % 2,
        k,
        order: g.order,
    })
}

/// (s^m r^k)^{-1} = s^m r^{(N-k)(1-m) + m k}.
pub fn inverse(g: GroupElement) -> GroupElement {
    let n = g.order.get();
    let k = if g.m == 0 { (n - g.k) % n } else { g.k };
    GroupElement { m: g.m, k, order: g.order }
}

/// X^m diag(w, conj w)^k with w = exp(2 pi i / N).
pub fn fundamental_rep(g: GroupElement) -> Matrix2<Complex64> {
    two_dim_irrep(g, 1)
}

fn two_dim_irrep(g: GroupElement, l: u32) -> Matrix2<Complex64> {
    let n = g.order.get() as f64;
    let angle = 2.0 * PI * (l as u64 * g.k as u64) as f64 / n;
    let phase = Complex64::from_polar(1.0, angle);
    let zero = Complex64::new(0.0, 0.0);
    if g.m == 0 {
        Matrix2::new(phase, zero, zero, phase.conj())
    } else {
        Matrix2::new(zero, phase.conj(), phase, zero)
    }
}

/// Re Tr of the fundamental representation, 2 (1-m) cos(2 pi k / N).
pub fn re_trace(g: GroupElement) -> f64 {
    if g.m == 1 {
        return 0.0;
    }
    2.0 * (2.0 * PI * g.k as f64 / g.order.get() as f64).cos()
}

/// A row of the group Fourier transform: one of the four one-dimensional
/// irreps, or the (i, j) entry of the two-dimensional irrep with label `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepLabel {
    A,
    B,
    C,
    D,
    TwoDim { l: u32, i: u8, j: u8 },
}

impl IrrepLabel {
    pub fn dimension(self) -> usize {
        match self {
            IrrepLabel::TwoDim { .. } => 2,
            _ => 1,
        }
    }

    pub fn validate(self, order: DihedralOrder) -> Result<()> {
        if let IrrepLabel::TwoDim { l, i, j } = self {
            if l == 0 || 2 * l >= order.get() {
                return Err(Error::domain(format!(
                    "two-dimensional irrep label l={l} outside [1, {}) for {order}",
                    order.get() / 2
                )));
            }
            if i > 1 || j > 1 {
                return Err(Error::domain(format!("matrix entry ({i},{j}) is not a bit pair")));
            }
        }
        Ok(())
    }

    /// Every Fourier row of D_N in the frozen listing order:
    /// A, B, C, D, then (0,0), (0,1), (1,0), (1,1) for l = 1 .. N/2 - 1.
    pub fn all(order: DihedralOrder) -> Vec<IrrepLabel> {
        let mut labels = vec![IrrepLabel::A, IrrepLabel::B, IrrepLabel::C, IrrepLabel::D];
        for l in 1..order.get() / 2 {
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                labels.push(IrrepLabel::TwoDim { l, i, j });
            }
        }
        labels
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::A => write!(f, "rho_A"),
            IrrepLabel::B => write!(f, "rho_B"),
            IrrepLabel::C => write!(f, "rho_C"),
            IrrepLabel::D => write!(f, "rho_D"),
            IrrepLabel::TwoDim { l, i, j } => write!(f, "phi{i}{j}({l})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IrrepValue {
    Scalar(Complex64),
    Matrix(Matrix2<Complex64>),
}

/// Value of the irrep that `label` belongs to at `g`. One-dimensional labels
/// give their +-1 character; two-dimensional labels give the full matrix.
pub fn irrep_value(label: IrrepLabel, g: GroupElement) -> Result<IrrepValue> {
    label.validate(g.order)?;
    let sign = |negative: bool| Complex64::new(if negative { -1.0 } else { 1.0 }, 0.0);
    let odd = g.k % 2 == 1;
    let reflect = g.m == 1;
    Ok(match label {
        IrrepLabel::A => IrrepValue::Scalar(sign(false)),
        IrrepLabel::B => IrrepValue::Scalar(sign(reflect)),
        IrrepLabel::C => IrrepValue::Scalar(sign(odd)),
        IrrepLabel::D => IrrepValue::Scalar(sign(reflect != odd)),
        IrrepLabel::TwoDim { l, .. } => IrrepValue::Matrix(two_dim_irrep(g, l)),
    })
}

/// The scalar matrix entry selected by `label` at `g`.
pub fn irrep_entry(label: IrrepLabel, g: GroupElement) -> Result<Complex64> {
    Ok(match (label, irrep_value(label, g)?) {
        (_, IrrepValue::Scalar(c)) => c,
        (IrrepLabel::TwoDim { i, j, .. }, IrrepValue::Matrix(mat)) => mat[(i as usize, j as usize)],
        _ => unreachable!("one-dimensional labels return scalars"),
    })
}

/// Bits of the (n+1)-qubit encoding, reflection bit first.
pub fn encode(g: GroupElement) -> Vec<u8> {
    let width = g.order.register_width();
    let index = g.index();
    (0..width).map(|q| ((index >> (width - 1 - q)) & 1) as u8).collect()
}

pub fn decode(order: DihedralOrder, bits: &[u8]) -> Result<GroupElement> {
    if bits.len() != order.register_width() {
        return Err(Error::domain(format!(
            "{order} needs {} bits, got {}",
            order.register_width(),
            bits.len()
        )));
    }
    let mut index = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::domain(format!("bit value {b} is not 0 or 1")));
        }
        index = (index << 1) | b as usize;
    }
    GroupElement::from_index(order, index)
}

pub fn encode_string(g: GroupElement) -> String {
    encode(g).iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

/// `table[i][j]` is the index of element_i * element_j.
pub fn group_table(order: DihedralOrder) -> Result<Vec<Vec<usize>>> {
    if order.get() > MAX_TABLE_ORDER {
        return Err(Error::resource(format!(
            "group table limited to N <= {MAX_TABLE_ORDER}, got {order}"
        )));
    }
    let elements: Vec<_> = order.elements().collect();
    Ok(elements
        .iter()
        .map(|&g| {
            elements
                .iter()
                .map(|&h| multiply(g, h).expect("same order").index())
                .collect()
        })
        .collect())
}
