//! Circuit synthesis and verification for dihedral lattice gauge theory.
//!
//! The crate builds the four primitive gates of a D_N gauge theory
//! (inversion, left multiplication, trace phase and the group Fourier
//! transform) for N = 2^n, simulates them densely and checks every circuit
//! against brute-force group-theoretic oracles. Around the gates sit a
//! Trotterised single-plaquette evolution, a Euclidean Metropolis code for
//! freezing curves, and the process-tomography and readout-mitigation
//! mathematics used to benchmark small circuits under synthetic noise.

pub mod benchmark;
pub mod circuit;
pub mod error;
pub mod gates;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use group::{DihedralOrder, GroupElement, IrrepLabel};
