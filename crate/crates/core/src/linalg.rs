//! Small dense linear-algebra helpers shared by the simulators and oracles.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type DenseOperator = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn cis(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_error(u: &DenseOperator) -> f64 {
    let product = u.adjoint() * u;
    max_abs_diff(&product, &DenseOperator::identity(u.nrows(), u.ncols()))
}

/// `min_phi ||a - e^{i phi} b||_max` with phi aligned on the largest entry of
/// `b`. Returns the residual and the aligning phase.
pub fn global_phase_distance(a: &DenseOperator, b: &DenseOperator) -> (f64, f64) {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let (idx, _) = b
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let ratio = a.as_slice()[idx] / b.as_slice()[idx];
    let phase = if ratio.norm() > 0.0 { ratio.arg() } else { 0.0 };
    let rotated = b * cis(phase);
    (max_abs_diff(a, &rotated), phase)
}

pub fn max_offdiagonal(a: &DenseOperator) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                worst = worst.max(a[(i, j)].norm());
            }
        }
    }
    worst
}

/// Writes `row,col,re,im` lines in row-major order with 17 significant digits.
pub fn write_operator_csv<W: Write>(op: &DenseOperator, mut out: W) -> std::io::Result<()> {
    writeln!(out, "row,col,re,im")?;
    for i in 0..op.nrows() {
        for j in 0..op.ncols() {
            let z = op[(i, j)];
            writeln!(out, "{i},{j},{:.16e},{:.16e}", z.re, z.im)?;
        }
    }
    Ok(())
}

/// Vector 2-norm of a slice of amplitudes.
pub fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_phase_is_recovered() {
        let b = DenseOperator::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64, i as f64 - 1.0));
        let a = &b * cis(0.7);
        let (dist, phase) = global_phase_distance(&a, &b);
        assert!(dist < 1e-14);
        assert!((phase - 0.7).abs() < 1e-14);
    }

    #[test]
    fn csv_has_header_and_all_entries() {
        let op = DenseOperator::identity(2, 2);
        let mut buf = Vec::new();
        write_operator_csv(&op, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "row,col,re,im");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0,0,1.0000000000000000e0,0.0000000000000000e0");
        let parsed: f64 = lines[4].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, 1.0);
    }
}
