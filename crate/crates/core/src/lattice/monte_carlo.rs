//! Euclidean Metropolis Monte Carlo for the isotropic Wilson action
//! `S = -beta sum_p Re Tr U_p` on periodic hypercubic lattices.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{inverse, multiply, re_trace, DihedralOrder, GroupElement};

/// Largest number of configurations [`exact_small_lattice_average`] enumerates.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

/// Multiplication, inversion and trace tables over element indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTables {
    pub order: DihedralOrder,
    size: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    re_tr: Vec<f64>,
}

impl GroupTables {
    pub fn new(order: DihedralOrder) -> Self {
        let elements: Vec<GroupElement> = order.elements().collect();
        let size = elements.len();
        let mut mul = Vec::with_capacity(size * size);
        for &g in &elements {
            for &h in &elements {
                mul.push(multiply(g, h).expect("same order").index() as u16);
            }
        }
        GroupTables {
            order,
            size,
            mul,
            inv: elements.iter().map(|&g| inverse(g).index() as u16).collect(),
            // snap cos(pi/2)-style round-off so exact cancellations stay exact
            re_tr: elements.iter().map(|&g| re_trace(g)).map(|t| if t.abs() < 1e-12 { 0.0 } else { t }).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size + b as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }

    pub fn re_tr(&self, a: u16) -> f64 {
        self.re_tr[a as usize]
    }

    /// `Re Tr(a b c^{-1} d^{-1})`.
    pub fn plaquette(&self, [a, b, c, d]: [u16; 4]) -> f64 {
        self.re_tr(self.mul(self.mul(self.mul(a, b), self.inv(c)), self.inv(d)))
    }
}

/// Periodic lattice geometry: link and plaquette incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometry {
    pub dims: Vec<usize>,
    /// Link ids `[U_mu(x), U_nu(x+mu), U_mu(x+nu), U_nu(x)]` per plaquette.
    pub plaquettes: Vec<[usize; 4]>,
    /// Plaquettes touching each link, without repeats.
    pub link_plaquettes: Vec<Vec<usize>>,
}

impl Geometry {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::domain("a lattice needs at least two directions"));
        }
        if dims.iter().any(|&e| e < 2) {
            return Err(Error::domain("every extent must be at least 2"));
        }
        let d = dims.len();
        let sites: usize = dims.iter().product();
        let link = |site: usize, mu: usize| site * d + mu;
        let mut plaquettes = Vec::new();
        for x in 0..sites {
            for mu in 0..d {
                for nu in mu + 1..d {
                    let xm = shift(dims, x, mu);
                    let xn = shift(dims, x, nu);
                    plaquettes.push([link(x, mu), link(xm, nu), link(xn, mu), link(x, nu)]);
                }
            }
        }
        let mut link_plaquettes = vec![Vec::new(); sites * d];
        for (p, links) in plaquettes.iter().enumerate() {
            for &l in links {
                if !link_plaquettes[l].contains(&p) {
                    link_plaquettes[l].push(p);
                }
            }
        }
        Ok(Geometry { dims: dims.to_vec(), plaquettes, link_plaquettes })
    }

    pub fn link_count(&self) -> usize {
        self.link_plaquettes.len()
    }
}

/// Site reached by one step in direction `mu`, with periodic wrap. Sites are
/// numbered with the first direction varying slowest.
fn shift(dims: &[usize], site: usize, mu: usize) -> usize {
    let stride: usize = dims[mu + 1..].iter().product();
    let coord = (site / stride) % dims[mu];
    let next = (coord + 1) % dims[mu];
    site - coord * stride + next * stride
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// Every link the identity.
    Cold,
    /// Links drawn uniformly from the group.
    Hot,
}

#[derive(Debug, Clone)]
pub struct LatticeConfig {
    pub beta: f64,
    pub seed: u64,
    geometry: Arc<Geometry>,
    tables: Arc<GroupTables>,
    links: Vec<u16>,
    rng: ChaCha8Rng,
}

impl LatticeConfig {
    pub fn new(order: DihedralOrder, dims: &[usize], beta: f64, seed: u64, start: Start) -> Result<Self> {
        Self::with_stream(order, dims, beta, seed, 0, start)
    }

    /// Like [`LatticeConfig::new`] but drawing from an independent stream of
    /// the seeded generator.
    pub fn with_stream(
        order: DihedralOrder,
        dims: &[usize],
        beta: f64,
        seed: u64,
        stream: u64,
        start: Start,
    ) -> Result<Self> {
        if beta.is_nan() {
            return Err(Error::domain("beta must not be NaN"));
        }
        let geometry = Arc::new(Geometry::new(dims)?);
        let tables = Arc::new(GroupTables::new(order));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let size = tables.size();
        let links = match start {
            Start::Cold => vec![0; geometry.link_count()],
            Start::Hot => (0..geometry.link_count()).map(|_| rng.random_range(0..size) as u16).collect(),
        };
        Ok(LatticeConfig { beta, seed, geometry, tables, links, rng })
    }

    pub fn order(&self) -> DihedralOrder {
        self.tables.order
    }

    pub fn dims(&self) -> &[usize] {
        &self.geometry.dims
    }

    pub fn links(&self) -> &[u16] {
        &self.links
    }

    pub fn set_links(&mut self, links: Vec<u16>) -> Result<()> {
        if links.len() != self.links.len() {
            return Err(Error::domain(format!("expected {} links, got {}", self.links.len(), links.len())));
        }
        if links.iter().any(|&l| l as usize >= self.tables.size()) {
            return Err(Error::domain("link index outside the group"));
        }
        self.links = links;
        Ok(())
    }

    fn plaquette_trace(&self, p: usize) -> f64 {
        self.tables.plaquette(self.geometry.plaquettes[p].map(|l| self.links[l]))
    }

    fn local_trace(&self, link: usize) -> f64 {
        self.geometry.link_plaquettes[link].iter().map(|&p| self.plaquette_trace(p)).sum()
    }
}

/// Metropolis acceptance for an action change `delta_s` and a uniform draw `u`.
pub fn metropolis_accept(delta_s: f64, u: f64) -> bool {
    delta_s <= 0.0 || u < (-delta_s).exp()
}

/// `-beta * delta_trace`, with zero trace change giving zero even at infinite beta.
pub fn action_change(beta: f64, delta_trace: f64) -> f64 {
    if delta_trace == 0.0 {
        0.0
    } else {
        -beta * delta_trace
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub proposed: usize,
    pub accepted: usize,
    /// Accepted moves that raised the action.
    pub uphill: usize,
}

impl SweepStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposed.max(1) as f64
    }
}

/// One pass of single-link updates with uniform proposals.
pub fn metropolis_sweep(config: &mut LatticeConfig) -> SweepStats {
    let mut stats = SweepStats::default();
    let size = config.tables.size();
    for link in 0..config.links.len() {
        let old = config.links[link];
        let proposal = config.rng.random_range(0..size) as u16;
        let before = config.local_trace(link);
        config.links[link] = proposal;
        let after = config.local_trace(link);
        let delta_s = action_change(config.beta, after - before);
        let u: f64 = config.rng.random();
        stats.proposed += 1;
        if metropolis_accept(delta_s, u) {
            stats.accepted += 1;
            if delta_s > 0.0 {
                stats.uphill += 1;
            }
        } else {
            config.links[link] = old;
        }
    }
    stats
}

/// Mean of `Re Tr U_p` over all plaquettes.
pub fn measure_plaquette(config: &LatticeConfig) -> f64 {
    let n = config.geometry.plaquettes.len();
    (0..n).map(|p| config.plaquette_trace(p)).sum::<f64>() / n as f64
}

/// Binned jackknife estimate `(mean, standard error)`.
pub fn jackknife(samples: &[f64], bins: usize) -> (f64, f64) {
    let bins = bins.clamp(2, samples.len().max(2));
    let per_bin = samples.len() / bins;
    if per_bin == 0 {
        let mean = samples.iter().sum::<f64>() / samples.len().max(1) as f64;
        return (mean, f64::NAN);
    }
    let used = &samples[..per_bin * bins];
    let total: f64 = used.iter().sum();
    let mean = total / used.len() as f64;
    let leave_out: Vec<f64> = used
        .chunks(per_bin)
        .map(|bin| (total - bin.iter().sum::<f64>()) / (used.len() - per_bin) as f64)
        .collect();
    let var = leave_out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * (bins as f64 - 1.0) / bins as f64;
    (mean, var.sqrt())
}

/// Boltzmann average of the plaquette from a histogram of plaquette sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactEnumeration {
    pub plaquettes: usize,
    /// Sum of plaquette traces (scaled by 1e9 and rounded) to multiplicity.
    pub histogram: BTreeMap<i64, u64>,
}

const HIST_SCALE: f64 = 1e9;

impl ExactEnumeration {
    pub fn new(order: DihedralOrder, dims: &[usize]) -> Result<Self> {
        let geometry = Geometry::new(dims)?;
        let tables = GroupTables::new(order);
        let size = tables.size();
        let links = geometry.link_count();
        let total = (size as u128).checked_pow(links as u32).unwrap_or(u128::MAX);
        if total > ENUMERATION_BUDGET {
            return Err(Error::resource(format!("{total} configurations exceeds the enumeration budget")));
        }
        let histogram = (0..size)
            .into_par_iter()
            .map(|first| {
                let mut hist = BTreeMap::new();
                let mut cfg = vec![0u16; links];
                cfg[0] = first as u16;
                let rest = total / size as u128;
                for _ in 0..rest {
                    let s: f64 = geometry.plaquettes.iter().map(|p| tables.plaquette(p.map(|l| cfg[l]))).sum();
                    *hist.entry((s * HIST_SCALE).round() as i64).or_insert(0u64) += 1;
                    for slot in cfg[1..].iter_mut() {
                        *slot += 1;
                        if (*slot as usize) < size {
                            break;
                        }
                        *slot = 0;
                    }
                }
                hist
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            });
        Ok(ExactEnumeration { plaquettes: geometry.plaquettes.len(), histogram })
    }

    /// `<(1/P) sum_p Re Tr U_p>` at coupling `beta`.
    pub fn average(&self, beta: f64) -> f64 {
        let sums: Vec<(f64, f64)> = self.histogram.iter().map(|(&k, &c)| (k as f64 / HIST_SCALE, c as f64)).collect();
        let shift = sums.iter().map(|&(s, _)| beta * s).fold(f64::NEG_INFINITY, f64::max);
        let (num, den) = sums.iter().fold((0.0, 0.0), |(num, den), &(s, c)| {
            let w = c * (beta * s - shift).exp();
            (num + w * s, den + w)
        });
        num / den / self.plaquettes as f64
    }
}

pub fn exact_small_lattice_average(order: DihedralOrder, dims: &[usize], beta: f64) -> Result<f64> {
    Ok(ExactEnumeration::new(order, dims)?.average(beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub plaquette_mean: f64,
    pub plaquette_stderr: f64,
    pub acceptance_rate: f64,
    /// `1 - <Re Tr U_p> / 2`.
    pub e0_normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub sweeps: usize,
    pub thermalization: usize,
    pub seed: u64,
    pub start: Start,
    pub bins: usize,
}

/// One chain per coupling, run in parallel; chain `i` draws from stream `i`
/// of the seeded generator, so results do not depend on scheduling.
pub fn beta_sweep(order: DihedralOrder, dims: &[usize], betas: &[f64], settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    if settings.sweeps == 0 {
        return Err(Error::domain("at least one measurement sweep is required"));
    }
    Geometry::new(dims)?;
    betas
        .par_iter()
        .enumerate()
        .map(|(i, &beta)| {
            let mut cfg = LatticeConfig::with_stream(order, dims, beta, settings.seed, i as u64, settings.start)?;
            for _ in 0..settings.thermalization {
                metropolis_sweep(&mut cfg);
            }
            let mut samples = Vec::with_capacity(settings.sweeps);
            let mut stats = SweepStats::default();
            for _ in 0..settings.sweeps {
                let s = metropolis_sweep(&mut cfg);
                stats.proposed += s.proposed;
                stats.accepted += s.accepted;
                samples.push(measure_plaquette(&cfg));
            }
            let (mean, stderr) = jackknife(&samples, settings.bins);
            Ok(SweepRow {
                beta,
                plaquette_mean: mean,
                plaquette_stderr: stderr,
                acceptance_rate: stats.acceptance_rate(),
                e0_normalized: 1.0 - mean / 2.0,
            })
        })
        .collect()
}

/// First coupling on the grid whose plaquette mean exceeds `threshold`.
pub fn transition_beta(rows: &[SweepRow], threshold: f64) -> Option<f64> {
    rows.iter().find(|r| r.plaquette_mean > threshold).map(|r| r.beta)
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn parse_beta_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::domain(format!("cannot parse beta grid '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let [a, b, s]: [f64; 3] = [parts[0], parts[1], parts[2]]
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .try_into()
            .map_err(|_| bad())?;
        if s.is_nan() || s <= 0.0 || b < a {
            return Err(bad());
        }
        let count = ((b - a) / s + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| a + i as f64 * s).collect());
    }
    text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// Parses `4x4x4`.
pub fn parse_dims(text: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = text
        .split('x')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::domain(format!("cannot parse dims '{text}'"))))
        .collect::<Result<_>>()?;
    Geometry::new(&dims)?;
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32) -> DihedralOrder {
        DihedralOrder::new(n).unwrap()
    }

    #[test]
    fn geometry_counts() {
        let g = Geometry::new(&[4, 4, 4]).unwrap();
        assert_eq!(g.link_count(), 192);
        assert_eq!(g.plaquettes.len(), 192);
        assert!(g.link_plaquettes.iter().all(|p| p.len() == 4));
        let small = Geometry::new(&[2, 2]).unwrap();
        assert_eq!(small.link_count(), 8);
        assert!(small.plaquettes.iter().all(|p| {
            let mut q = p.to_vec();
            q.sort_unstable();
            q.dedup();
            q.len() == 4
        }));
    }

    #[test]
    fn periodic_wrap() {
        let dims = [3, 4];
        assert_eq!(shift(&dims, 11, 0), 3);
        assert_eq!(shift(&dims, 11, 1), 8);
        assert_eq!(shift(&dims, 0, 1), 1);
    }

    #[test]
    fn cold_start_measures_two() {
        let cfg = LatticeConfig::new(d(8), &[3, 3, 3], 1.0, 0, Start::Cold).unwrap();
        assert_eq!(measure_plaquette(&cfg), 2.0);
    }

    #[test]
    fn beta_zero_accepts_everything() {
        let mut cfg = LatticeConfig::new(d(4), &[4, 4], 0.0, 5, Start::Hot).unwrap();
        let s = metropolis_sweep(&mut cfg);
        assert_eq!(s.acceptance_rate(), 1.0);
    }

    #[test]
    fn infinite_beta_never_goes_uphill() {
        let mut cfg = LatticeConfig::new(d(4), &[3, 3], f64::INFINITY, 11, Start::Cold).unwrap();
        for _ in 0..20 {
            assert_eq!(metropolis_sweep(&mut cfg).uphill, 0);
        }
        assert_eq!(measure_plaquette(&cfg), 2.0);
    }

    #[test]
    fn random_configs_average_to_zero() {
        let mean: f64 = (0..400)
            .map(|s| measure_plaquette(&LatticeConfig::new(d(4), &[4, 4], 0.0, s, Start::Hot).unwrap()))
            .sum::<f64>()
            / 400.0;
        assert!(mean.abs() < 0.05, "{mean}");
    }

    #[test]
    fn measurement_ignores_orientation() {
        let cfg = LatticeConfig::new(d(8), &[3, 3], 0.0, 2, Start::Hot).unwrap();
        let t = &cfg.tables;
        for p in &cfg.geometry.plaquettes {
            let [a, b, c, e] = p.map(|l| cfg.links[l]);
            let forward = t.plaquette([a, b, c, e]);
            let reversed = t.re_tr(t.mul(t.mul(t.mul(e, c), t.inv(b)), t.inv(a)));
            assert!((forward - reversed).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_enumeration_at_beta_zero() {
        assert_eq!(exact_small_lattice_average(d(2), &[2, 2], 0.0).unwrap(), 0.0);
        let e = ExactEnumeration::new(d(4), &[2, 2]).unwrap();
        assert!(e.average(0.0).abs() < 1e-15);
        assert_eq!(e.histogram.values().sum::<u64>(), 8u64.pow(8));
        assert!(matches!(ExactEnumeration::new(d(8), &[2, 2]), Err(Error::Resource(_))));
    }

    #[test]
    fn single_plaquette_average_increases() {
        let e = ExactEnumeration::new(d(4), &[2, 2]).unwrap();
        let values: Vec<f64> = (0..20).map(|i| e.average(i as f64 * 0.2)).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn jackknife_of_constant() {
        let (m, s) = jackknife(&[1.5; 100], 10);
        assert_eq!(m, 1.5);
        assert_eq!(s, 0.0);
        let (m, s) = jackknife(&[0.0, 1.0, 0.0, 1.0], 4);
        assert_eq!(m, 0.5);
        // equals the sample standard deviation over sqrt(n)
        assert!((s - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sweep_is_deterministic() {
        let settings = SweepSettings { sweeps: 20, thermalization: 5, seed: 42, start: Start::Hot, bins: 5 };
        let a = beta_sweep(d(4), &[3, 3], &[0.0, 1.0, 2.0], &settings).unwrap();
        let b = beta_sweep(d(4), &[3, 3], &[0.0, 1.0, 2.0], &settings).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grids_parse() {
        assert_eq!(parse_beta_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_beta_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(parse_beta_grid("1:0:0.1").is_err());
        assert_eq!(parse_dims("4x4x4").unwrap(), vec![4, 4, 4]);
        assert!(parse_dims("4x1").is_err());
    }
}
