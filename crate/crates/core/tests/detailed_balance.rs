//! A single link with weight `exp(beta Re Tr g)` sampled by the same
//! Metropolis rule the lattice uses.

use dihedral_gauge::lattice::monte_carlo::{action_change, metropolis_accept, GroupTables};
use dihedral_gauge::DihedralOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(order: u32, beta: f64, steps: usize, thin: usize, seed: u64) -> f64 {
    let tables = GroupTables::new(DihedralOrder::new(order).unwrap());
    let size = tables.size();
    let weights: Vec<f64> = (0..size).map(|g| (beta * tables.re_tr(g as u16)).exp()).collect();
    let z: f64 = weights.iter().sum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = 0u16;
    let mut counts = vec![0usize; size];
    for step in 0..steps * thin {
        let proposal = rng.random_range(0..size) as u16;
        let delta = action_change(beta, tables.re_tr(proposal) - tables.re_tr(state));
        if metropolis_accept(delta, rng.random()) {
            state = proposal;
        }
        if step % thin == 0 {
            counts[state as usize] += 1;
        }
    }
    let stat: f64 = counts
        .iter()
        .zip(&weights)
        .map(|(&c, w)| {
            let expected = steps as f64 * w / z;
            (c as f64 - expected).powi(2) / expected
        })
        .sum();
    1.0 - ChiSquared::new((size - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn single_link_matches_boltzmann_weights() {
    for (order, beta) in [(4, 0.5), (8, 0.5), (4, 1.5)] {
        let p = chi_square_p(order, beta, 200_000, 5, 11);
        assert!(p > 1e-3, "N={order} beta={beta}: chi-square p-value {p}");
    }
}

#[test]
fn wrong_weights_are_rejected() {
    // Sampling at beta=0.5 tested against beta=1.5 weights must fail loudly.
    let tables = GroupTables::new(DihedralOrder::new(4).unwrap());
    let size = tables.size();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut state = 0u16;
    let mut counts = vec![0usize; size];
    let steps = 100_000;
    for _ in 0..steps * 5 {
        let proposal = rng.random_range(0..size) as u16;
        if metropolis_accept(action_change(0.5, tables.re_tr(proposal) - tables.re_tr(state)), rng.random()) {
            state = proposal;
        }
        counts[state as usize] += 1;
    }
    let weights: Vec<f64> = (0..size).map(|g| (1.5 * tables.re_tr(g as u16)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let total = (steps * 5) as f64;
    let stat: f64 = counts.iter().zip(&weights).map(|(&c, w)| (c as f64 - total * w / z).powi(2) / (total * w / z)).sum();
    let p = 1.0 - ChiSquared::new((size - 1) as f64).unwrap().cdf(stat);
    assert!(p < 1e-6, "p-value {p}");
}
