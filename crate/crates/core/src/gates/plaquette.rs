//! Plaquette phase `e^{i theta Re Tr(U_1 U_2 U_3^{-1} U_4^{-1})}`.
//!
//! The third and fourth links are inverted in place, the product is
//! accumulated into a work register prepared in `|e>` by four left
//! multiplications, the trace gate acts on the work register, and the
//! whole computation is run backwards.

use super::inversion::append_inversion;
use super::multiplication::{append_multiplication, append_multiplication_d4, multiplication_ancillas};
use super::trace::append_trace_direct;
use super::GroupRegister;
use crate::circuit::{adjoint, Circuit, ToffoliStyle};
use crate::error::{Error, Result};
use crate::group::DihedralOrder;

/// Qubit assignment of a plaquette circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaquetteLayout {
    pub links: [GroupRegister; 4],
    pub work: GroupRegister,
    pub ancillas: Vec<usize>,
}

impl PlaquetteLayout {
    /// `[U_1, U_2, U_3, U_4, work, ancillas]`. D_4 uses the ancilla-free
    /// multiplier.
    pub fn new(order: DihedralOrder) -> Self {
        let w = order.register_width();
        let links = std::array::from_fn(|i| GroupRegister::contiguous(i * w, order));
        let work = GroupRegister::contiguous(4 * w, order);
        let anc_count = if order.get() == 4 { 0 } else { multiplication_ancillas(order) };
        let ancillas = (5 * w..5 * w + anc_count).collect();
        PlaquetteLayout { links, work, ancillas }
    }

    pub fn qubit_count(&self) -> usize {
        5 * self.work.width() + self.ancillas.len()
    }
}

fn append_compute(c: &mut Circuit, layout: &PlaquetteLayout, order: DihedralOrder) {
    let anc = &layout.ancillas;
    append_inversion(c, &layout.links[2], anc);
    append_inversion(c, &layout.links[3], anc);
    for link in layout.links.iter().rev() {
        if order.get() == 4 {
            append_multiplication_d4(c, link, &layout.work);
        } else {
            append_multiplication(c, link, &layout.work, anc);
        }
    }
}

/// Applies `e^{i theta Re Tr U_p}` to every basis assignment of the links.
/// The work register must start in `|e>` and is returned there.
pub fn build_plaquette_trace(order: DihedralOrder, theta: f64, style: ToffoliStyle) -> Result<Circuit> {
    if !theta.is_finite() {
        return Err(Error::domain("theta must be finite"));
    }
    let layout = PlaquetteLayout::new(order);
    let width = layout.qubit_count();
    let mut compute = Circuit::new(width, "plaquette-compute");
    append_compute(&mut compute, &layout, order);
    let mut c = Circuit::new(width, format!("plaquette-trace-{order}"));
    c.append(&compute)?;
    append_trace_direct(&mut c, &layout.work, order, theta);
    c.append(&adjoint(&compute))?;
    Ok(c.lower_toffolis(style))
}
