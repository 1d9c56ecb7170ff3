mod manifest;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dihedral_gauge::benchmark::{
    chi_matrix, chi_of_unitary, multiplication_accuracy, process_fidelity, AccuracySettings, NoiseModel,
};
use dihedral_gauge::circuit::io::format_circuit;
use dihedral_gauge::circuit::sim::restricted_unitary;
use dihedral_gauge::circuit::{resource_count, Circuit, ToffoliStyle};
use dihedral_gauge::gates::{
    build_fourier, build_inversion, build_multiplication, build_plaquette_trace, build_trace_ancilla,
    build_trace_direct, TrigMethod,
};
use dihedral_gauge::group::{group_table, GroupElement};
use dihedral_gauge::lattice::monte_carlo::{beta_sweep, parse_beta_grid, parse_dims, Start, SweepSettings};
use dihedral_gauge::lattice::trotter::{richardson_slopes, trotter_convergence, PlaquetteSystem};
use dihedral_gauge::linalg::write_operator_csv;
use dihedral_gauge::spectral::{closed_form_diagonal, diagonalize_via_fourier, fourier_matrix, transfer_matrix};
use dihedral_gauge::verify::{verify_all, Fault};
use dihedral_gauge::{DihedralOrder, Error};
use manifest::{sidecar, Run};
use serde_json::json;

const SPECTRAL_OFFDIAG_TOL: f64 = 1e-10;
const SPECTRAL_DIAGONAL_TOL: f64 = 1e-9;

/// Build and verify primitive gates for dihedral lattice gauge theories.
///
/// `--n` is always the exponent: the group is D_N with N = 2^n.
#[derive(Parser)]
#[command(name = "dgauge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group utilities.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Gate circuits.
    #[command(subcommand)]
    Gate(GateCommand),
    /// Fourier diagonalisation of the transfer matrix.
    #[command(subcommand)]
    Spectral(SpectralCommand),
    /// Euclidean Monte Carlo.
    #[command(subcommand)]
    Mc(McCommand),
    /// Single-plaquette Trotter evolution.
    #[command(subcommand)]
    Trotter(TrotterCommand),
    /// Noisy-device benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Check every primitive gate against brute-force group oracles.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Write the multiplication table as CSV.
    Table {
        /// Exponent n of N = 2^n.
        #[arg(long)]
        n: u32,
        /// Output CSV path.
        #[arg(long, default_value = "group_table.csv")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GateCommand {
    /// Write a circuit, its resource counts and a manifest.
    Build(GateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GateName {
    Inv,
    Mult,
    Trace,
    Fourier,
    Plaq,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Abstract,
    Ccphase,
    Cnot,
}

impl From<Style> for ToffoliStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::Abstract => ToffoliStyle::Abstract,
            Style::Ccphase => ToffoliStyle::CcphaseNative,
            Style::Cnot => ToffoliStyle::CnotDecomposition,
        }
    }
}

#[derive(Args)]
struct GateArgs {
    /// Which gate to build.
    #[arg(long)]
    gate: GateName,
    /// Exponent n of N = 2^n.
    #[arg(long)]
    n: u32,
    /// Coupling angle for the trace and plaquette gates.
    #[arg(long, default_value_t = 0.3)]
    theta: f64,
    /// Fixed-point bits for the ancilla-assisted trace gate; omit for the direct construction.
    #[arg(long)]
    bits: Option<usize>,
    /// How Toffoli gates are expressed.
    #[arg(long, value_enum, default_value = "abstract")]
    style: Style,
    /// Circuit text output; sidecars share its stem.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpectralCommand {
    /// Diagonalise the transfer matrix and compare with the closed form.
    Check {
        /// Exponent n of N = 2^n.
        #[arg(long)]
        n: u32,
        /// Inverse coupling.
        #[arg(long)]
        beta: f64,
        /// Directory for transfer, Fourier and diagonalised matrices as CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupName {
    D2,
    D4,
    D8,
    D16,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartName {
    Hot,
    Cold,
}

#[derive(Subcommand)]
enum McCommand {
    /// Plaquette expectation over a grid of couplings, one chain each.
    Sweep {
        #[arg(long, value_enum)]
        group: GroupName,
        /// Lattice extents, e.g. 4x4x4.
        #[arg(long, default_value = "4x4x4")]
        dims: String,
        /// `start:stop:step` or a comma list.
        #[arg(long, default_value = "0:4:0.25")]
        betas: String,
        /// Measurement sweeps per chain.
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        /// Discarded sweeps before measuring; defaults to a tenth of --sweeps.
        #[arg(long)]
        thermalization: Option<usize>,
        #[arg(long, value_enum, default_value = "hot")]
        start: StartName,
        /// Jackknife bins.
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TrotterCommand {
    /// Single-step error against exact evolution for each dt.
    Converge {
        /// Exponent n of N = 2^n.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 0.7)]
        theta_k: f64,
        #[arg(long, default_value_t = 0.9)]
        theta_v: f64,
        /// Comma-separated step sizes.
        #[arg(long, default_value = "0.2,0.1,0.05")]
        dt_grid: String,
        /// Random initial states per step size.
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "trotter.csv")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QptGate {
    Fourier,
    Trace,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Process matrix of a gate under depolarizing noise.
    Qpt {
        #[arg(long, value_enum)]
        gate: QptGate,
        /// Exponent n of N = 2^n.
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Depolarizing probability on entangling gates.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Trace gate angle.
        #[arg(long, default_value_t = PI / 2.0)]
        theta: f64,
        #[arg(long, default_value = "chi.csv")]
        out: PathBuf,
    },
    /// Sampled accuracy of the multiplication gate, raw and by plurality vote.
    Multacc {
        /// Exponent n of N = 2^n.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        /// Shots per plurality vote.
        #[arg(long)]
        majority: Option<usize>,
        #[arg(long, value_enum, default_value = "ccphase")]
        style: Style,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "acc.csv")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Check N = 2, 4, ..., 2^max_n.
    #[arg(long, default_value_t = 3)]
    max_n: u32,
    /// Optional JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Resource(_)) => 3,
            CliError::Core(Error::Consistency(_)) | CliError::Failed(_) | CliError::Io(_) => 1,
            CliError::Core(_) | CliError::Usage(_) => 2,
        }
    }
}

type CliResult = Result<(), CliError>;

fn order(n: u32) -> Result<DihedralOrder, CliError> {
    Ok(DihedralOrder::from_exponent(n)?)
}

fn group_table_cmd(n: u32, out: &Path) -> CliResult {
    let order = order(n)?;
    let table = group_table(order)?;
    let name = |i: usize| GroupElement::from_index(order, i).map(|g| g.to_string());
    let mut csv = String::from("g,h,product,g_label,h_label,product_label\n");
    for (g, row) in table.iter().enumerate() {
        for (h, &gh) in row.iter().enumerate() {
            writeln!(csv, "{g},{h},{gh},{},{},{}", name(g)?, name(h)?, name(gh)?).unwrap();
        }
    }
    let mut run = Run::new("group table", json!({ "n": n }), None);
    run.write(out, csv)?;
    run.finish(&sidecar(out, "manifest.json"))?;
    Ok(())
}

fn gate_build(args: &GateArgs) -> CliResult {
    let order = order(args.n)?;
    let style = ToffoliStyle::from(args.style);
    if args.bits.is_some() && !matches!(args.gate, GateName::Trace) {
        return Err(CliError::Usage("--bits only applies to --gate trace".into()));
    }
    let circuit: Circuit = match args.gate {
        GateName::Inv => build_inversion(order)?.lower_toffolis(style),
        GateName::Mult => build_multiplication(order, style)?,
        GateName::Trace => match args.bits {
            Some(b) => build_trace_ancilla(order, args.theta, b, TrigMethod::Libm)?,
            None => build_trace_direct(order, args.theta)?,
        },
        GateName::Fourier => build_fourier(order).lower_toffolis(style),
        GateName::Plaq => build_plaquette_trace(order, args.theta, style)?,
    };
    let name = args.gate.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}_n{}.circ", args.n)));
    let resources = resource_count(&circuit);
    let mut run = Run::new(
        "gate build",
        json!({ "gate": name, "n": args.n, "theta": args.theta, "bits": args.bits,
                "style": args.style.to_possible_value().map(|v| v.get_name().to_string()) }),
        None,
    );
    run.write(&out, format_circuit(&circuit))?;
    let sidecar_json = serde_json::to_string_pretty(&resources).map_err(std::io::Error::other)?;
    run.write(&sidecar(&out, "resources.json"), sidecar_json + "\n")?;
    run.finish(&sidecar(&out, "manifest.json"))?;
    println!(
        "{}: {} qubits, {} gates, {} two-qubit equivalents",
        circuit.label, circuit.qubit_count(), resources.total_gates, resources.two_qubit_equivalents
    );
    Ok(())
}

fn spectral_check(n: u32, beta: f64, dump: Option<&Path>) -> CliResult {
    let order = order(n)?;
    let numeric = diagonalize_via_fourier(order, beta)?;
    let closed = closed_form_diagonal(order, beta)?;
    let gap = numeric.diagonal.iter().zip(&closed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let offdiag = numeric.offdiag_max / numeric.scale;
    let relative_gap = gap / numeric.scale;
    println!("offdiag_max {offdiag:.3e} (relative to ||T||)");
    println!("max |closed-form - numeric| {gap:.3e} ({relative_gap:.3e} relative)");
    if let Some(dir) = dump {
        let fourier = fourier_matrix(order)?.entries;
        let transfer = transfer_matrix(order, beta)?.map(|x| dihedral_gauge::linalg::C64::new(x, 0.0));
        let diagonalised = &fourier * &transfer * fourier.adjoint();
        let mut run = Run::new("spectral check", json!({ "n": n, "beta": beta }), None);
        for (file, op) in [("transfer.csv", &transfer), ("fourier.csv", &fourier), ("diagonalised.csv", &diagonalised)] {
            let mut buf = Vec::new();
            write_operator_csv(op, &mut buf)?;
            run.write(&dir.join(file), buf)?;
        }
        run.finish(&dir.join("manifest.json"))?;
    }
    if offdiag > SPECTRAL_OFFDIAG_TOL || relative_gap > SPECTRAL_DIAGONAL_TOL {
        return Err(CliError::Failed("diagonalisation outside tolerance".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn mc_sweep(
    group: GroupName,
    dims: &str,
    betas: &str,
    sweeps: usize,
    thermalization: Option<usize>,
    start: StartName,
    bins: usize,
    seed: u64,
    out: &Path,
) -> CliResult {
    let order = DihedralOrder::new(match group {
        GroupName::D2 => 2,
        GroupName::D4 => 4,
        GroupName::D8 => 8,
        GroupName::D16 => 16,
    })?;
    let dims_v = parse_dims(dims)?;
    let grid = parse_beta_grid(betas)?;
    let thermalization = thermalization.unwrap_or(sweeps / 10);
    let start_v = match start {
        StartName::Hot => Start::Hot,
        StartName::Cold => Start::Cold,
    };
    let settings = SweepSettings { sweeps, thermalization, seed, start: start_v, bins };
    let rows = beta_sweep(order, &dims_v, &grid, &settings)?;
    let mut csv = String::from("beta,plaquette_mean,plaquette_stderr,acceptance_rate,e0_normalized\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.beta, r.plaquette_mean, r.plaquette_stderr, r.acceptance_rate, r.e0_normalized
        )
        .unwrap();
    }
    let mut run = Run::new(
        "mc sweep",
        json!({ "group": order.get(), "dims": dims_v, "betas": grid, "sweeps": sweeps,
                "thermalization": thermalization, "start": format!("{start_v:?}"), "bins": bins }),
        Some(seed),
    );
    run.write(out, csv)?;
    run.finish(&sidecar(out, "manifest.json"))?;
    println!("{} couplings written to {}", rows.len(), out.display());
    Ok(())
}

fn parse_dt_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let dts = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad step size {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if dts.is_empty() || dts.iter().any(|dt| !dt.is_finite() || *dt <= 0.0) {
        return Err(CliError::Usage("step sizes must be positive".into()));
    }
    Ok(dts)
}

#[allow(clippy::too_many_arguments)]
fn trotter_converge(n: u32, theta_k: f64, theta_v: f64, dt_grid: &str, states: usize, seed: u64, out: &Path) -> CliResult {
    let dts = parse_dt_grid(dt_grid)?;
    let system = PlaquetteSystem::new(order(n)?, theta_k, theta_v)?;
    let points = trotter_convergence(&system, &dts, states, seed)?;
    let mut csv = String::from("dt,error\n");
    for p in &points {
        writeln!(csv, "{},{:.12e}", p.dt, p.error).unwrap();
    }
    let mut run = Run::new(
        "trotter converge",
        json!({ "n": n, "theta_k": theta_k, "theta_v": theta_v, "dt_grid": dts, "states": states }),
        Some(seed),
    );
    run.write(out, csv)?;
    run.finish(&sidecar(out, "manifest.json"))?;
    for (w, s) in points.windows(2).zip(richardson_slopes(&points)) {
        println!("slope between dt={} and dt={}: {s:.3}", w[0].dt, w[1].dt);
    }
    Ok(())
}

fn bench_qpt(gate: QptGate, n: u32, p: f64, theta: f64, out: &Path) -> CliResult {
    let order = order(n)?;
    let circuit = match gate {
        QptGate::Fourier => build_fourier(order),
        QptGate::Trace => build_trace_direct(order, theta)?,
    };
    let data: Vec<usize> = (0..order.register_width()).collect();
    let chi = chi_matrix(&circuit, &data, &NoiseModel::depolarizing(p))?;
    let (ideal, _) = restricted_unitary(&circuit, &data)?;
    let fidelity = process_fidelity(&chi, &chi_of_unitary(&ideal)?)?;
    let mut buf = Vec::new();
    write_operator_csv(&chi.entries, &mut buf)?;
    let name = match gate {
        QptGate::Fourier => "fourier",
        QptGate::Trace => "trace",
    };
    let mut run = Run::new("bench qpt", json!({ "gate": name, "n": n, "p": p, "theta": theta }), None);
    run.write(out, buf)?;
    run.finish(&sidecar(out, "manifest.json"))?;
    println!("process fidelity {fidelity:.6}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench_multacc(n: u32, p: f64, shots: usize, majority: Option<usize>, style: Style, seed: u64, out: &Path) -> CliResult {
    let settings = AccuracySettings { shots, majority_window: majority, seed, style: style.into() };
    let report = multiplication_accuracy(order(n)?, &NoiseModel::depolarizing(p), &settings)?;
    let mut csv = String::from("g,h,raw,majority\n");
    for pair in &report.pairs {
        let maj = pair.majority.map(|m| format!("{m:.12e}")).unwrap_or_default();
        writeln!(csv, "{},{},{:.12e},{maj}", pair.g, pair.h, pair.raw).unwrap();
    }
    let mut run = Run::new(
        "bench multacc",
        json!({ "n": n, "p": p, "shots": shots, "majority": majority,
                "style": style.to_possible_value().map(|v| v.get_name().to_string()) }),
        Some(seed),
    );
    run.write(out, csv)?;
    run.finish(&sidecar(out, "manifest.json"))?;
    println!("raw accuracy {:.4} +- {:.4}", report.mean_accuracy, report.stddev);
    if let (Some(m), Some(s)) = (report.majority_mean, report.majority_stddev) {
        println!("plurality accuracy {m:.4} +- {s:.4}");
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> CliResult {
    let fault = if args.inject_fault { Fault::Multiplication } else { Fault::None };
    let report = verify_all(args.max_n, fault)?;
    print!("{report}");
    if let Some(out) = &args.out {
        let mut run = Run::new("verify", json!({ "max_n": args.max_n, "inject_fault": args.inject_fault }), None);
        let text = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
        run.write(out, text + "\n")?;
        run.finish(&sidecar(out, "manifest.json"))?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} checks failed", report.failures())))
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Group(GroupCommand::Table { n, out }) => group_table_cmd(n, &out),
        Command::Gate(GateCommand::Build(args)) => gate_build(&args),
        Command::Spectral(SpectralCommand::Check { n, beta, dump }) => spectral_check(n, beta, dump.as_deref()),
        Command::Mc(McCommand::Sweep { group, dims, betas, sweeps, thermalization, start, bins, seed, out }) => {
            mc_sweep(group, &dims, &betas, sweeps, thermalization, start, bins, seed, &out)
        }
        Command::Trotter(TrotterCommand::Converge { n, theta_k, theta_v, dt_grid, states, seed, out }) => {
            trotter_converge(n, theta_k, theta_v, &dt_grid, states, seed, &out)
        }
        Command::Bench(BenchCommand::Qpt { gate, n, p, theta, out }) => bench_qpt(gate, n, p, theta, &out),
        Command::Bench(BenchCommand::Multacc { n, p, shots, majority, style, seed, out }) => {
            bench_multacc(n, p, shots, majority, style, seed, &out)
        }
        Command::Verify(args) => verify(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
