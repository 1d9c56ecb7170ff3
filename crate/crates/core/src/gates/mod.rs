//! Circuit builders for the primitive gates and their arithmetic blocks.
//!
//! Public `build_*` functions allocate a standard qubit layout and return a
//! self-contained circuit. The `append_*` functions write the same network
//! onto caller-chosen qubits so larger circuits can share ancillas.

pub mod arithmetic;
pub mod fourier;
pub mod inversion;
pub mod multiplication;
pub mod plaquette;
pub mod trace;

pub use arithmetic::{
    adder_forward_block, build_conditional_twos_complement, build_controlled_increment,
    build_controlled_ones_complement, build_in_place_adder,
};
pub use fourier::{build_change_of_basis, build_fourier, build_qft_cyclic, fourier_output_index};
pub use inversion::{build_inversion, build_inversion_d8_simplified};
pub use multiplication::{build_multiplication, build_multiplication_d4_specialized, build_right_multiplication};
pub use plaquette::build_plaquette_trace;
pub use trace::{build_phase_kickback, build_trace_ancilla, build_trace_direct, pauli_decompose_diagonal, TrigMethod};

use crate::group::DihedralOrder;

/// Qubits holding one group element: the reflection bit and the rotation
/// index, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRegister {
    pub m: usize,
    pub k: Vec<usize>,
}

impl GroupRegister {
    /// `n + 1` consecutive qubits starting at `start`.
    pub fn contiguous(start: usize, order: DihedralOrder) -> Self {
        let n = order.exponent() as usize;
        GroupRegister { m: start, k: (start + 1..start + 1 + n).collect() }
    }

    /// `[m, k_{n-1}, ..., k_0]`.
    pub fn qubits(&self) -> Vec<usize> {
        std::iter::once(self.m).chain(self.k.iter().copied()).collect()
    }

    pub fn width(&self) -> usize {
        self.k.len() + 1
    }

    /// Qubit holding bit `j` of the rotation index (bit 0 least significant).
    pub fn k_bit(&self, j: usize) -> usize {
        self.k[self.k.len() - 1 - j]
    }
}
