//! Single-plaquette Trotter evolution and Euclidean Monte Carlo.

pub mod monte_carlo;
pub mod trotter;

pub use monte_carlo::{
    beta_sweep, exact_small_lattice_average, measure_plaquette, metropolis_sweep, LatticeConfig, Start, SweepRow,
};
pub use trotter::{exact_evolve, trotter_step, PlaquetteSystem};
