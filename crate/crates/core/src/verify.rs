//! The oracle suite: every primitive gate checked against brute-force group
//! computations, plus the Fourier diagonalisation of the transfer matrix.

use std::fmt;

use serde::Serialize;

use crate::circuit::{apply_basis, Circuit, ToffoliStyle};
use crate::error::{Error, Result};
use crate::gates::fourier::fourier_distance;
use crate::gates::multiplication::multiplication_ancillas;
use crate::gates::{build_fourier, build_inversion, build_multiplication, build_trace_direct};
use crate::group::{group_table, inverse, re_trace, DihedralOrder};
use crate::linalg::cis;
use crate::spectral::{closed_form_diagonal, diagonalize_via_fourier};

/// Largest exponent accepted by [`verify_all`].
pub const MAX_VERIFY_EXPONENT: u32 = 4;

/// Deliberate corruption used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Drops the final gate of the multiplication circuit.
    Multiplication,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub order: u32,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>5}  {:<6} detail", "check", "N", "result")?;
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{:<16} {:>5}  {:<6} {}", r.check, r.order, status, r.detail)?;
        }
        Ok(())
    }
}

fn record(report: &mut VerifyReport, check: &str, order: DihedralOrder, outcome: Result<String>) {
    let (passed, detail) = match outcome {
        Ok(detail) => (true, detail),
        Err(e) => (false, e.to_string()),
    };
    report.results.push(CheckResult { check: check.to_string(), order: order.get(), passed, detail });
}

fn mismatch(what: String) -> Error {
    Error::Consistency(what)
}

pub fn check_inversion(order: DihedralOrder) -> Result<String> {
    let c = build_inversion(order)?;
    let anc = c.qubit_count() - order.register_width();
    for g in order.elements() {
        let (out, phase) = apply_basis(&c, (g.index() as u64) << anc)?;
        if out != (inverse(g).index() as u64) << anc || phase != crate::linalg::ONE {
            return Err(mismatch(format!("inverse of {g} wrong")));
        }
    }
    Ok(format!("{} inputs", order.group_size()))
}

fn drop_last_gate(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.qubit_count(), c.label.clone());
    for gate in &c.gates()[..c.len().saturating_sub(1)] {
        out.push(gate.clone())?;
    }
    Ok(out)
}

pub fn check_multiplication(order: DihedralOrder, fault: Fault) -> Result<String> {
    let mut c = build_multiplication(order, ToffoliStyle::Abstract)?;
    if fault == Fault::Multiplication {
        c = drop_last_gate(&c)?;
    }
    let anc = multiplication_ancillas(order);
    let w = order.register_width();
    let table = group_table(order)?;
    for (g, row) in table.iter().enumerate() {
        for (h, &gh) in row.iter().enumerate() {
            let input = (((g << w) | h) as u64) << anc;
            let want = (((g << w) | gh) as u64) << anc;
            let (out, _) = apply_basis(&c, input)?;
            if out != want {
                return Err(mismatch(format!("product of elements {g} and {h} wrong")));
            }
        }
    }
    Ok(format!("{} pairs", order.group_size().pow(2)))
}

pub fn check_trace(order: DihedralOrder) -> Result<String> {
    let theta = 0.3;
    let c = build_trace_direct(order, theta)?;
    let mut worst = 0.0f64;
    for g in order.elements() {
        let (out, phase) = apply_basis(&c, g.index() as u64)?;
        if out != g.index() as u64 {
            return Err(mismatch(format!("trace gate moved {g}")));
        }
        worst = worst.max((phase - cis(theta * re_trace(g))).norm());
    }
    if worst > 1e-12 {
        return Err(mismatch(format!("phase error {worst:.2e}")));
    }
    Ok(format!("max phase error {worst:.1e}"))
}

pub fn check_fourier(order: DihedralOrder) -> Result<String> {
    let c = build_fourier(order);
    let (dist, leak) = fourier_distance(order, &c)?;
    if dist > 1e-10 || leak > 1e-12 {
        return Err(mismatch(format!("distance {dist:.2e}, leakage {leak:.2e}")));
    }
    Ok(format!("distance {dist:.1e}"))
}

pub fn check_diagonalisation(order: DihedralOrder) -> Result<String> {
    let mut worst = 0.0f64;
    for beta in [0.0, 0.5, 1.0, 2.0] {
        let numeric = diagonalize_via_fourier(order, beta)?;
        let closed = closed_form_diagonal(order, beta)?;
        let gap = numeric.diagonal.iter().zip(&closed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let off = numeric.offdiag_max / numeric.scale;
        if off > 1e-10 || gap > 1e-9 * numeric.scale {
            return Err(mismatch(format!("beta={beta}: off-diagonal {off:.2e}, closed-form gap {gap:.2e}")));
        }
        worst = worst.max(off);
    }
    Ok(format!("max relative off-diagonal {worst:.1e}"))
}

/// Runs every check for `N = 2, 4, ..., 2^max_n`.
pub fn verify_all(max_n: u32, fault: Fault) -> Result<VerifyReport> {
    if max_n == 0 {
        return Err(Error::domain("max_n must be at least 1"));
    }
    if max_n > MAX_VERIFY_EXPONENT {
        return Err(Error::resource(format!(
            "max_n={max_n} exceeds {MAX_VERIFY_EXPONENT}: dense checks at N=2^{max_n} do not fit the simulator caps"
        )));
    }
    let mut report = VerifyReport::default();
    for n in 1..=max_n {
        let order = DihedralOrder::from_exponent(n)?;
        record(&mut report, "inversion", order, check_inversion(order));
        record(&mut report, "multiplication", order, check_multiplication(order, fault));
        record(&mut report, "trace", order, check_trace(order));
        record(&mut report, "fourier", order, check_fourier(order));
        record(&mut report, "diagonalisation", order, check_diagonalisation(order));
    }
    Ok(report)
}
