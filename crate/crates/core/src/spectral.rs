//! Matrix-level oracles: the group Fourier matrix, the single-link transfer
//! matrix and its Fourier diagonalisation, and the kinetic evolution
//! operator.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{fundamental_rep, irrep_entry, DihedralOrder, IrrepLabel};
use crate::linalg::{cis, max_abs_diff, max_offdiagonal, DenseOperator, C64, ZERO};

/// Largest N handled by the dense spectral routines.
pub const MAX_SPECTRAL_ORDER: u32 = 64;
/// Largest N for [`kinetic_step`].
pub const MAX_KINETIC_ORDER: u32 = 32;

fn check_order(order: DihedralOrder, cap: u32) -> Result<()> {
    if order.get() > cap {
        return Err(Error::resource(format!("{order} exceeds the spectral cap N <= {cap}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierMatrix {
    pub order: DihedralOrder,
    pub entries: DenseOperator,
    /// Label of each row, in the listing order of [`IrrepLabel::all`].
    pub rows: Vec<IrrepLabel>,
}

/// Row `(rho, i, j)`, column `g`: `sqrt(d_rho / 2N) [rho(g)]_{ij}`.
pub fn fourier_matrix(order: DihedralOrder) -> Result<FourierMatrix> {
    check_order(order, MAX_SPECTRAL_ORDER)?;
    let rows = IrrepLabel::all(order);
    let size = order.group_size();
    let elements: Vec<_> = order.elements().collect();
    let mut entries = DenseOperator::from_element(size, size, ZERO);
    for (r, &label) in rows.iter().enumerate() {
        let norm = (label.dimension() as f64 / size as f64).sqrt();
        for (col, &g) in elements.iter().enumerate() {
            entries[(r, col)] = irrep_entry(label, g)? * norm;
        }
    }
    Ok(FourierMatrix { order, entries, rows })
}

/// `M_{ij} = Re Tr(rho(g_i)^dagger rho(g_j)) = 2 delta_{m m'} cos(2 pi (k'-k)/N)`.
pub fn m_matrix(order: DihedralOrder) -> Result<DMatrix<f64>> {
    check_order(order, MAX_SPECTRAL_ORDER)?;
    let n = order.get() as usize;
    let size = order.group_size();
    Ok(DMatrix::from_fn(size, size, |i, j| {
        if i / n != j / n {
            return 0.0;
        }
        let dk = (j % n) as f64 - (i % n) as f64;
        2.0 * (2.0 * PI * dk / n as f64).cos()
    }))
}

/// The same matrix computed from the fundamental representation.
pub fn m_matrix_from_representation(order: DihedralOrder) -> Result<DMatrix<f64>> {
    check_order(order, MAX_SPECTRAL_ORDER)?;
    let elements: Vec<_> = order.elements().collect();
    let size = elements.len();
    Ok(DMatrix::from_fn(size, size, |i, j| {
        (fundamental_rep(elements[i]).adjoint() * fundamental_rep(elements[j])).trace().re
    }))
}

/// `T_{ij} = exp(beta M_{ij})`.
pub fn transfer_matrix(order: DihedralOrder, beta: f64) -> Result<DMatrix<f64>> {
    if !beta.is_finite() {
        return Err(Error::domain("beta must be finite"));
    }
    Ok(m_matrix(order)?.map(|v| (beta * v).exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierDiagonalisation {
    pub diagonal: Vec<C64>,
    pub offdiag_max: f64,
    /// Largest entry of T, the natural scale for tolerances.
    pub scale: f64,
}

/// `F T F^dagger` with its diagonal in Fourier row order.
pub fn diagonalize_via_fourier(order: DihedralOrder, beta: f64) -> Result<FourierDiagonalisation> {
    let f = fourier_matrix(order)?.entries;
    let t = transfer_matrix(order, beta)?;
    let scale = t.max();
    let tc = t.map(|v| C64::new(v, 0.0));
    let d = &f * tc * f.adjoint();
    Ok(FourierDiagonalisation {
        diagonal: (0..d.nrows()).map(|i| d[(i, i)]).collect(),
        offdiag_max: max_offdiagonal(&d),
        scale,
    })
}

fn weighted_sum(order: DihedralOrder, beta: f64, weight: impl Fn(u32) -> C64) -> C64 {
    let n = order.get();
    (0..n)
        .map(|k| weight(k) * (2.0 * beta * (2.0 * PI * k as f64 / n as f64).cos()).exp())
        .sum()
}

/// Closed-form eigenvalues of T in Fourier row order:
/// `rho_a: N + S`, `rho_b: S - N`, `rho_c, rho_d: sum (-1)^k e^{2 beta cos}`,
/// two-dimensional rows `sum e^{+-i 2 pi l k/N} e^{2 beta cos}` with
/// `S = sum_k e^{2 beta cos(2 pi k/N)}`.
pub fn closed_form_diagonal(order: DihedralOrder, beta: f64) -> Result<Vec<C64>> {
    closed_form_with(order, beta, false)
}

/// Variant with the one-dimensional sign-character rows squared.
pub fn closed_form_diagonal_squared_cd(order: DihedralOrder, beta: f64) -> Result<Vec<C64>> {
    closed_form_with(order, beta, true)
}

fn closed_form_with(order: DihedralOrder, beta: f64, square_cd: bool) -> Result<Vec<C64>> {
    check_order(order, MAX_SPECTRAL_ORDER)?;
    if !beta.is_finite() {
        return Err(Error::domain("beta must be finite"));
    }
    let n = order.get() as f64;
    let s = weighted_sum(order, beta, |_| C64::new(1.0, 0.0));
    let alt = weighted_sum(order, beta, |k| C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    let cd = if square_cd { alt * alt } else { alt };
    Ok(IrrepLabel::all(order)
        .into_iter()
        .map(|label| match label {
            IrrepLabel::A => s + n,
            IrrepLabel::B => s - n,
            IrrepLabel::C | IrrepLabel::D => cd,
            IrrepLabel::TwoDim { l, i, j } => {
                let sign = if (i, j) == (0, 0) || (i, j) == (1, 0) { 1.0 } else { -1.0 };
                weighted_sum(order, beta, |k| cis(sign * 2.0 * PI * (l * k) as f64 / n))
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticStep {
    /// `exp(i theta M)` assembled as `F^dagger D F`.
    pub operator: DenseOperator,
    /// Diagonal `D` of `F exp(i theta M) F^dagger`, in Fourier row order.
    pub fourier_diagonal: Vec<C64>,
    /// Entrywise gap between the dense exponential and the Fourier form.
    pub agreement: f64,
}

/// Single-link kinetic evolution `exp(i theta M)`, computed both as a dense
/// matrix exponential and through the Fourier basis. Fails with a
/// consistency error when the two differ by more than `1e-10`.
pub fn kinetic_step(order: DihedralOrder, theta: f64) -> Result<KineticStep> {
    check_order(order, MAX_KINETIC_ORDER)?;
    if !theta.is_finite() {
        return Err(Error::domain("theta must be finite"));
    }
    let m = m_matrix(order)?.map(|v| C64::new(0.0, theta * v));
    let dense = m.exp();
    let f = fourier_matrix(order)?.entries;
    let rotated = &f * &dense * f.adjoint();
    let fourier_diagonal: Vec<C64> = (0..rotated.nrows()).map(|i| rotated[(i, i)]).collect();
    let d = DenseOperator::from_diagonal(&nalgebra::DVector::from_vec(fourier_diagonal.clone()));
    let operator = f.adjoint() * d * &f;
    let agreement = max_abs_diff(&dense, &operator);
    if agreement > 1e-10 {
        return Err(Error::Consistency(format!(
            "kinetic step routes disagree by {agreement:e} for {order}, theta={theta}"
        )));
    }
    Ok(KineticStep { operator, fourier_diagonal, agreement })
}
