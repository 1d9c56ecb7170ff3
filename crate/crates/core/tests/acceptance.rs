//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use dihedral_gauge::benchmark::{
    calibrate_depolarizing, chi_matrix, mitigate_readout, multiplication_accuracy, process_fidelity,
    AccuracySettings, ConfusionMatrix, NoiseModel,
};
use dihedral_gauge::circuit::sim::{restricted_unitary, UNITARY_QUBIT_CAP};
use dihedral_gauge::circuit::sim::is_monomial;
use dihedral_gauge::circuit::{adjoint, apply_basis, resource_count, unitary_of, Circuit, Polarity, ToffoliStyle};
use dihedral_gauge::gates::fourier::fourier_distance;
use dihedral_gauge::gates::plaquette::PlaquetteLayout;
use dihedral_gauge::gates::{
    adder_forward_block, build_change_of_basis, build_conditional_twos_complement, build_controlled_increment,
    build_controlled_ones_complement, build_fourier, build_in_place_adder, build_inversion,
    build_inversion_d8_simplified, build_multiplication, build_multiplication_d4_specialized,
    build_plaquette_trace, build_qft_cyclic, build_right_multiplication, build_trace_ancilla, build_trace_direct,
    TrigMethod,
};
use dihedral_gauge::group::{group_table, inverse, re_trace};
use dihedral_gauge::lattice::monte_carlo::{beta_sweep, transition_beta, ExactEnumeration, Start, SweepSettings};
use dihedral_gauge::lattice::trotter::{richardson_slopes, trotter_convergence, PlaquetteSystem};
use dihedral_gauge::linalg::{cis, max_abs_diff, DenseOperator, ONE, ZERO};
use dihedral_gauge::spectral::{closed_form_diagonal, diagonalize_via_fourier};
use dihedral_gauge::{DihedralOrder, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn d(n: u32) -> DihedralOrder {
    DihedralOrder::new(n).expect("power of two")
}

fn err(e: Error) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Dense block on `data` must be the permutation `expected` exactly.
fn check_permutation(circuit: &Circuit, data: &[usize], expected: impl Fn(usize) -> usize) -> Result<(), String> {
    let (u, leak) = restricted_unitary(circuit, data).map_err(err)?;
    ensure(leak == 0.0, || format!("{}: ancilla leakage {leak:e}", circuit.label))?;
    for col in 0..u.ncols() {
        let want = expected(col);
        for row in 0..u.nrows() {
            let target = if row == want { ONE } else { ZERO };
            ensure(u[(row, col)] == target, || format!("{}: column {col} row {row}", circuit.label))?;
        }
    }
    Ok(())
}

fn oracle_exactness() -> Outcome {
    let mut checked = 0;
    for n in [2u32, 4, 8, 16] {
        let order = d(n);
        let inv = build_inversion(order).map_err(err)?;
        let w = order.register_width();
        let data: Vec<usize> = (0..w).collect();
        check_permutation(&inv, &data, |i| inverse(order.elements().nth(i).unwrap()).index())?;
        checked += order.group_size();
        if n <= 8 {
            let mult = build_multiplication(order, ToffoliStyle::Abstract).map_err(err)?;
            let table = group_table(order).map_err(err)?;
            let data: Vec<usize> = (0..2 * w).collect();
            let mask = order.group_size() - 1;
            check_permutation(&mult, &data, |i| (i & !mask) | table[i >> w][i & mask])?;
            checked += order.group_size().pow(2);
        }
    }
    Ok(format!("{checked} basis inputs exact"))
}

fn fourier_correctness() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2u32, 4, 8, 16] {
        let (dist, leak) = fourier_distance(d(n), &build_fourier(d(n))).map_err(err)?;
        ensure(dist < 1e-10 && leak < 1e-12, || format!("N={n}: distance {dist:e}, leakage {leak:e}"))?;
        worst = worst.max(dist);
    }
    let entangling = resource_count(&build_change_of_basis(d(4))).entangling();
    ensure(entangling == 2, || format!("N=4 change of basis uses {entangling} entangling gates"))?;
    Ok(format!("max distance {worst:.1e}; N=4 change of basis has {entangling} entangling gates"))
}

fn diagonalisation() -> Outcome {
    let mut worst_off = 0.0f64;
    let mut worst_gap = 0.0f64;
    for n in [4u32, 8, 16] {
        for beta in [0.0, 0.5, 1.0, 2.0] {
            let num = diagonalize_via_fourier(d(n), beta).map_err(err)?;
            let closed = closed_form_diagonal(d(n), beta).map_err(err)?;
            let off = num.offdiag_max / num.scale;
            let gap = num.diagonal.iter().zip(&closed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / num.scale;
            ensure(off < 1e-10 && gap < 1e-9, || format!("N={n} beta={beta}: off {off:e}, gap {gap:e}"))?;
            worst_off = worst_off.max(off);
            worst_gap = worst_gap.max(gap);
            if beta == 0.0 {
                let size = 2.0 * n as f64;
                ensure((num.diagonal[0] - size).norm() < 1e-12, || format!("N={n}: leading entry"))?;
                ensure(num.diagonal[1..].iter().all(|z| z.norm() < 1e-12), || format!("N={n}: beta=0 tail"))?;
            }
        }
    }
    Ok(format!("off-diagonal {worst_off:.1e}, closed-form gap {worst_gap:.1e} (relative)"))
}

fn trace_gates() -> Outcome {
    let mut worst_direct = 0.0f64;
    for n in [2u32, 4, 8, 16] {
        let order = d(n);
        for theta in [0.0, PI / 2.0, 0.3] {
            let u = unitary_of(&build_trace_direct(order, theta).map_err(err)?).map_err(err)?;
            let mut analytic = DenseOperator::identity(u.nrows(), u.ncols());
            for g in order.elements() {
                analytic[(g.index(), g.index())] = cis(theta * re_trace(g));
            }
            let gap = max_abs_diff(&u, &analytic);
            ensure(gap < 1e-12, || format!("direct N={n} theta={theta}: {gap:e}"))?;
            worst_direct = worst_direct.max(gap);
        }
    }
    let mut worst_ratio = 0.0f64;
    for n in [2u32, 4, 8] {
        let order = d(n);
        for theta in [0.3, PI / 2.0] {
            let c = build_trace_ancilla(order, theta, 10, TrigMethod::Libm).map_err(err)?;
            let shift = c.qubit_count() - order.register_width();
            let bound = 2.0 * theta * 2f64.powi(-9);
            for g in order.elements() {
                let input = (g.index() as u64) << shift;
                let (out, phase) = apply_basis(&c, input).map_err(err)?;
                ensure(out == input, || format!("ancilla N={n}: {g} not restored"))?;
                let error = (phase / cis(theta * re_trace(g))).arg().abs();
                ensure(error <= bound, || format!("ancilla N={n} theta={theta} {g}: {error:e} > {bound:e}"))?;
                worst_ratio = worst_ratio.max(error / bound);
            }
        }
    }
    Ok(format!("direct gap {worst_direct:.1e}; ancilla error at most {:.2} of bound", worst_ratio))
}

fn resource_formulas() -> Outcome {
    for n in 2..=6 {
        for polarity in [Polarity::Zero, Polarity::One] {
            let rc = resource_count(&build_controlled_ones_complement(n, polarity).map_err(err)?);
            ensure(rc.count("CNOT") == n && rc.total_gates == n, || format!("ones complement n={n}: {rc:?}"))?;
        }
    }
    for n in [3usize, 4, 5] {
        let eq = resource_count(&adder_forward_block(n).map_err(err)?).two_qubit_equivalents;
        ensure(eq == 20 * n - 31, || format!("adder n={n}: {eq} != {}", 20 * n - 31))?;
    }
    let points: Vec<(f64, f64)> = (2..=6)
        .map(|n| {
            let toffolis = resource_count(&build_controlled_increment(n).expect("n >= 1")).three_qubit;
            (n as f64, toffolis as f64)
        })
        .collect();
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let intercept = my - slope * mx;
    let residual = points.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
    ensure(residual < 1.0, || format!("increment fit residual {residual}"))?;
    Ok(format!("increment Toffolis = {slope:.2} n {intercept:+.2}, max residual {residual:.1e}"))
}

fn trotter_convergence_d4() -> Outcome {
    let system = PlaquetteSystem::new(d(4), 0.7, 0.9).map_err(err)?;
    let points = trotter_convergence(&system, &[0.2, 0.1, 0.05], 3, 17).map_err(err)?;
    let slopes = richardson_slopes(&points);
    ensure(slopes.iter().all(|s| (2.7..=3.3).contains(s)), || format!("slopes {slopes:?} from {points:?}"))?;
    Ok(format!(
        "{} qubits, errors {:?}, slopes {:?}",
        system.qubit_count(),
        points.iter().map(|p| format!("{:.2e}", p.error)).collect::<Vec<_>>(),
        slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>()
    ))
}

fn monte_carlo() -> Outcome {
    let exact = ExactEnumeration::new(d(4), &[2, 2]).map_err(err)?;
    let betas = [0.0, 0.25, 0.5, 1.0];
    let settings = SweepSettings { sweeps: 100_000, thermalization: 2_000, seed: 2024, start: Start::Hot, bins: 100 };
    let rows = beta_sweep(d(4), &[2, 2], &betas, &settings).map_err(err)?;
    let mut summary = Vec::new();
    for row in &rows {
        let want = exact.average(row.beta);
        let pull = (row.plaquette_mean - want) / row.plaquette_stderr;
        ensure(pull.abs() < 3.0, || {
            format!("beta={}: {} +- {} vs exact {want}", row.beta, row.plaquette_mean, row.plaquette_stderr)
        })?;
        summary.push(format!("b={} pull {pull:+.2}", row.beta));
    }

    let grid: Vec<f64> = (0..=16).map(|i| i as f64 * 0.25).collect();
    let freeze = SweepSettings { sweeps: 300, thermalization: 200, seed: 7, start: Start::Hot, bins: 10 };
    let d4 = beta_sweep(d(4), &[4, 4, 4], &grid, &freeze).map_err(err)?;
    let d8 = beta_sweep(d(8), &[4, 4, 4], &grid, &freeze).map_err(err)?;
    let (t4, t8) = (transition_beta(&d4, 1.5), transition_beta(&d8, 1.5));
    let later = match (t4, t8) {
        (Some(a), Some(b)) => b > a,
        (Some(_), None) => true,
        _ => false,
    };
    ensure(later, || format!("D_4 transition {t4:?}, D_8 transition {t8:?}"))?;
    summary.push(format!("freezing beta D_4 {t4:?} < D_8 {t8:?} on 4^3"));
    Ok(summary.join(", "))
}

fn benchmark_math() -> Outcome {
    let data = [0usize, 1, 2];
    for (name, circuit) in [
        ("U_F", build_fourier(d(4))),
        ("U_Tr", build_trace_direct(d(4), PI / 2.0).map_err(err)?),
    ] {
        let chi = chi_matrix(&circuit, &data, &NoiseModel::noiseless()).map_err(err)?;
        let f = process_fidelity(&chi, &chi).map_err(err)?;
        ensure((f - 1.0).abs() < 1e-10, || format!("{name}: self fidelity {f}"))?;
    }
    let cal = calibrate_depolarizing(&build_fourier(d(4)), &data, 0.920, (0.0, 0.2), 1e-7).map_err(err)?;
    ensure((cal.fidelity - 0.920).abs() <= 0.005, || format!("calibration {cal:?}"))?;

    let c = ConfusionMatrix::symmetric_flip(3, 0.03).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut truth: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
    let total: f64 = truth.iter().sum();
    truth.iter_mut().for_each(|v| *v /= total);
    let back = mitigate_readout(&c.apply(&truth).map_err(err)?, &c).map_err(err)?;
    let round_trip = back.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(round_trip < 1e-10, || format!("mitigation round trip {round_trip:e}"))?;

    let model = NoiseModel::depolarizing(0.02);
    let mut raw_means = Vec::new();
    for seed in 0..20 {
        let settings = AccuracySettings {
            shots: 10_000,
            majority_window: Some(200),
            seed,
            style: ToffoliStyle::CcphaseNative,
        };
        let report = multiplication_accuracy(d(4), &model, &settings).map_err(err)?;
        for pair in &report.pairs {
            let maj = pair.majority.expect("window set");
            if pair.raw > 0.5 && pair.raw < 1.0 {
                ensure(maj > pair.raw, || format!("seed {seed} pair ({},{}): {maj} <= {}", pair.g, pair.h, pair.raw))?;
            }
        }
        let majority = report.majority_mean.expect("window set");
        ensure(majority > report.mean_accuracy, || format!("seed {seed}: {majority} <= {}", report.mean_accuracy))?;
        raw_means.push(report.mean_accuracy);
    }
    let raw = raw_means.iter().sum::<f64>() / raw_means.len() as f64;
    Ok(format!(
        "self fidelity 1; f=0.920 at p={:.5} (f={:.4}); round trip {round_trip:.1e}; raw accuracy {raw:.3} improved by majority on 20 seeds",
        cal.p, cal.fidelity
    ))
}

fn composed_with_adjoint(c: &Circuit) -> Result<f64, String> {
    let mut both = c.clone();
    both.append(&adjoint(c)).map_err(err)?;
    if both.qubit_count() <= UNITARY_QUBIT_CAP {
        let u = unitary_of(&both).map_err(err)?;
        return Ok(max_abs_diff(&u, &DenseOperator::identity(u.nrows(), u.ncols())));
    }
    ensure(is_monomial(&both), || format!("{} is too wide for a dense check and not monomial", c.label))?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    let span = 1u64 << both.qubit_count().min(63);
    for _ in 0..4096 {
        let input = rng.random_range(0..span);
        let (out, phase) = apply_basis(&both, input).map_err(err)?;
        ensure(out == input, || format!("{}: basis input {input} moved", c.label))?;
        worst = worst.max((phase - ONE).norm());
    }
    Ok(worst)
}

/// Every basis input of `data` with the other qubits at zero keeps them at zero.
fn ancillas_restored(c: &Circuit, data_width: usize, leading: bool) -> Result<(), String> {
    let nq = c.qubit_count();
    let shift = if leading { nq - data_width } else { 0 };
    let data: Vec<usize> = if leading { (0..data_width).collect() } else { (nq - data_width..nq).collect() };
    if is_monomial(c) {
        let keep_mask: u64 = data.iter().fold(0u64, |m, &q| m | 1 << (nq - 1 - q));
        for x in 0..(1u64 << data_width) {
            let (out, _) = apply_basis(c, x << shift).map_err(err)?;
            ensure(out & !keep_mask == 0, || format!("{}: ancillas dirty for input {x}", c.label))?;
        }
        return Ok(());
    }
    let (_, leak) = restricted_unitary(c, &data).map_err(err)?;
    ensure(leak < 1e-12, || format!("{}: leakage {leak:e}", c.label))
}

fn hygiene() -> Outcome {
    let mut builders: Vec<(Circuit, usize)> = Vec::new();
    for n in [2u32, 4, 8] {
        let order = d(n);
        let w = order.register_width();
        let k = order.exponent() as usize;
        builders.push((build_inversion(order).map_err(err)?, w));
        builders.push((build_multiplication(order, ToffoliStyle::Abstract).map_err(err)?, 2 * w));
        builders.push((build_multiplication(order, ToffoliStyle::CnotDecomposition).map_err(err)?, 2 * w));
        builders.push((build_right_multiplication(order, ToffoliStyle::Abstract).map_err(err)?, 2 * w));
        builders.push((build_trace_direct(order, 0.3).map_err(err)?, w));
        builders.push((build_trace_ancilla(order, 0.3, 10, TrigMethod::Libm).map_err(err)?, w));
        builders.push((build_fourier(order), w));
        builders.push((build_change_of_basis(order), w));
        builders.push((build_conditional_twos_complement(order).map_err(err)?, k + 1));
        builders.push((build_controlled_increment(k).map_err(err)?, k + 1));
        builders.push((build_controlled_ones_complement(k, Polarity::One).map_err(err)?, k + 1));
        builders.push((build_qft_cyclic(k), k));
        if n <= 4 {
            let plaq = build_plaquette_trace(order, 0.4, ToffoliStyle::Abstract).map_err(err)?;
            builders.push((plaq, 4 * w));
        }
    }
    builders.push((build_inversion_d8_simplified(), 4));
    builders.push((build_multiplication_d4_specialized(ToffoliStyle::CcphaseNative), 6));
    for n in 2..=4 {
        builders.push((build_in_place_adder(n).map_err(err)?, 2 * n));
    }
    let mut worst = 0.0f64;
    for (c, data_width) in &builders {
        let gap = composed_with_adjoint(c)?;
        ensure(gap < 1e-10, || format!("{}: U U^dagger off identity by {gap:e}", c.label))?;
        worst = worst.max(gap);
        ancillas_restored(c, *data_width, true)?;
    }
    let plaquette_work = PlaquetteLayout::new(d(4)).work.width();
    Ok(format!("{} circuits, max |U U^dagger - I| {worst:.1e}, plaquette work register of {plaquette_work} restored", builders.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle exactness", oracle_exactness),
        ("fourier correctness", fourier_correctness),
        ("transfer matrix diagonalisation", diagonalisation),
        ("trace gates", trace_gates),
        ("resource formulas", resource_formulas),
        ("trotter convergence", trotter_convergence_d4),
        ("monte carlo oracle", monte_carlo),
        ("benchmark math", benchmark_math),
        ("hygiene", hygiene),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
