//! Command-line front end. Four subcommands:
//!
//! - `bounds`: closed-form speed-limit table for one dimension;
//! - `sample`: random-phase sampling of unitaries reaching a qutrit basis,
//!   histogramming the minimal evolution effort Et;
//! - `verify`: named self-checks (saturation, oracles, classifiers), one
//!   PASS/FAIL line each;
//! - `coherence`: maximal qubit coherence generation over time and the time
//!   to maximal coherence.
//!
//! Exit codes: 0 success, 1 failed checks, 2 usage error, 3 I/O error.

mod checks;

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsl_core::bounds::{
    coherence_max_qubit, mc_speed_limit, nqubit_upper_bound, perm_bound, qutrit_tilde_bound, t_mc,
    unbiased_bound, BoundKind, BoundReport, BoundsError, Tightness,
};
use qsl_core::linalg::{C64, ComplexMatrix};
use qsl_core::montecarlo::{sample_plus, sample_tilde, MonteCarloError};
use qsl_core::states::{
    bloch_from_state, density_from_vector, state_from_bloch, state_vector_from_angles, BlochVector,
    StatesError,
};

#[derive(Parser)]
#[command(name = "qsl", version, about = "Quantum speed limits for basis changes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the speed-limit table for one dimension
    Bounds(BoundsArgs),
    /// Sample random-phase unitaries onto a qutrit target and histogram Et
    Sample(SampleArgs),
    /// Run named self-checks, one PASS/FAIL line per check
    Verify(VerifyArgs),
    /// Maximal qubit coherence over time and the time to reach it
    Coherence(CoherenceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct BoundsArgs {
    /// Hilbert space dimension
    #[arg(long)]
    d: Option<usize>,
    /// Qubit count; implies dimension 2^n and enables the tensor-power row
    #[arg(long)]
    n: Option<usize>,
    /// Mean energy above the ground state
    #[arg(long, default_value_t = 1.0)]
    energy: f64,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleTarget {
    /// Fast unbiased qutrit class, conjectured minimum Et = 2pi/9
    Plus,
    /// Slow unbiased qutrit class, conjectured minimum Et = 4pi/9
    Tilde,
}

#[derive(Args)]
struct SampleArgs {
    /// Target basis family
    #[arg(long, value_enum)]
    target: SampleTarget,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Histogram bins over [0, 2pi]
    #[arg(long, default_value_t = 200)]
    bins: usize,
    /// Write the histogram here; the min-Et summary then goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Keep only checks whose name contains this substring
    #[arg(long)]
    only: Option<String>,
    /// Keep only checks for this dimension (matches the _d<k> name suffix)
    #[arg(long)]
    d: Option<usize>,
    /// Sample count for the Monte Carlo checks
    #[arg(long, default_value_t = 20_000)]
    samples: u64,
    /// Seed for the randomized checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Saturation tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct CoherenceArgs {
    /// Bloch vector "rx,ry,rz" of the initial qubit state
    #[arg(long)]
    bloch: Option<String>,
    /// Polar angle of the pure state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
    #[arg(long)]
    theta: Option<f64>,
    /// Azimuthal angle of the pure state (requires --theta)
    #[arg(long)]
    phi: Option<f64>,
    /// Mean energy above the ground state
    #[arg(long, default_value_t = 1.0)]
    energy: f64,
    /// Points on the time grid over [0, pi/(2 energy)]
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

enum CliError {
    Usage(String),
    Io(String),
    Checks(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => write!(f, "{m}"),
            CliError::Checks(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<StatesError> for CliError {
    fn from(e: StatesError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() {
    let code = match run(Cli::parse()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Checks(_) => 1,
                CliError::Usage(_) => 2,
                CliError::Io(_) => 3,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Coherence(a) => cmd_coherence(a),
    }
}

fn emit(content: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn kind_str(k: &BoundKind) -> &'static str {
    match k {
        BoundKind::Lower => "lower",
        BoundKind::Upper => "upper",
    }
}

fn tight_str(t: &Tightness) -> &'static str {
    match t {
        Tightness::Tight => "tight",
        Tightness::NotTight => "not_tight",
        Tightness::Unknown => "unknown",
    }
}

fn check_energy_arg(energy: f64) -> Result<(), CliError> {
    if energy > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "energy must be positive, got {energy}"
        )))
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    check_energy_arg(args.energy)?;
    let d = match (args.d, args.n) {
        (None, None) => return Err(CliError::Usage("provide --d or --n".into())),
        (Some(d), None) => d,
        (None, Some(n)) => {
            check_qubit_count(n)?;
            1usize << n
        }
        (Some(d), Some(n)) => {
            check_qubit_count(n)?;
            if d != 1usize << n {
                return Err(CliError::Usage(format!(
                    "--d {d} is inconsistent with --n {n} (2^{n} = {})",
                    1usize << n
                )));
            }
            d
        }
    };
    let n_qubits = args
        .n
        .or_else(|| (d >= 2 && d.is_power_of_two()).then(|| d.trailing_zeros() as usize));

    let mut bounds = vec![unbiased_bound(d, args.energy)?];
    if d == 3 {
        bounds.push(qutrit_tilde_bound(args.energy)?);
    }
    bounds.push(perm_bound(d, args.energy)?);
    let mut non_interacting = None;
    if let Some(n) = n_qubits {
        let (upper, free) = nqubit_upper_bound(n, args.energy)?;
        bounds.push(upper);
        non_interacting = Some(free);
    }

    let content = match args.format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                d: usize,
                bounds: &'a [BoundReport],
            }
            let mut s = serde_json::to_string_pretty(&Out { d, bounds: &bounds })
                .expect("bounds serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("value,kind,tight,g,source\n");
            for b in &bounds {
                s += &format!(
                    "{:.16e},{},{},{:.16e},{}\n",
                    b.bound_value,
                    kind_str(&b.kind),
                    tight_str(&b.tight),
                    b.g_constant,
                    b.source
                );
            }
            if let Some(t) = non_interacting {
                s += &format!("# non_interacting_time={t:.16e}\n");
            }
            s
        }
        OutputFormat::Text => {
            let mut s = format!("d={d} energy={:.16e}\n", args.energy);
            for b in &bounds {
                s += &format!(
                    "{} value={:.16e} g={:.16e} tight={} source={}\n",
                    kind_str(&b.kind),
                    b.bound_value,
                    b.g_constant,
                    tight_str(&b.tight),
                    b.source
                );
            }
            if let Some(t) = non_interacting {
                s += &format!("non_interacting_time={t:.16e}\n");
            }
            s
        }
    };
    emit(&content, args.out.as_deref())
}

fn check_qubit_count(n: usize) -> Result<(), CliError> {
    if n == 0 || n > 20 {
        Err(CliError::Usage(format!(
            "qubit count must be in 1..=20, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let hist = match args.target {
        SampleTarget::Plus => sample_plus(args.samples, args.seed, args.bins)?,
        SampleTarget::Tilde => sample_tilde(args.samples, args.seed, args.bins)?,
    };
    let conjectured = match args.target {
        SampleTarget::Plus => 2.0 * PI / 9.0,
        SampleTarget::Tilde => 4.0 * PI / 9.0,
    };
    let summary = format!(
        "min_et={:.16e}\nexcess={:.16e}\n",
        hist.min_et,
        hist.min_et - conjectured
    );
    let content = match args.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&hist).expect("histogram serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv | OutputFormat::Text => hist.to_csv(),
    };
    match args.out.as_deref() {
        Some(path) => {
            emit(&content, Some(path))?;
            print!("{summary}");
        }
        None => {
            print!("{content}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {}",
            args.tol
        )));
    }
    let opts = checks::VerifyOpts {
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
    };
    let outcomes =
        checks::run_checks(&opts, args.only.as_deref(), args.d).map_err(CliError::Usage)?;
    let mut failed = 0usize;
    for o in &outcomes {
        println!(
            "{} {} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!("passed {}/{}", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        Err(CliError::Checks(failed))
    } else {
        Ok(())
    }
}

/// Initial state, as Bloch components, density matrix, and (if pure) the
/// state vector.
fn parse_state(args: &CoherenceArgs) -> Result<([f64; 3], ComplexMatrix, Option<Vec<C64>>), CliError> {
    match (&args.bloch, args.theta) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --bloch or --theta/--phi, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "give --bloch rx,ry,rz or --theta <rad> [--phi <rad>]".into(),
        )),
        (Some(text), None) => {
            if args.phi.is_some() {
                return Err(CliError::Usage("--phi requires --theta".into()));
            }
            let parts: Vec<f64> = text
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("bad --bloch component: {e}")))?;
            if parts.len() != 3 {
                return Err(CliError::Usage(format!(
                    "--bloch needs 3 comma-separated components, got {}",
                    parts.len()
                )));
            }
            let bv = BlochVector::new([parts[0], parts[1], parts[2]])?;
            let r = bv.components();
            let n = bv.norm();
            let psi = ((n - 1.0).abs() <= 1e-9).then(|| {
                state_vector_from_angles((r[2] / n).clamp(-1.0, 1.0).acos(), r[1].atan2(r[0]))
            });
            Ok((r, state_from_bloch(&bv), psi))
        }
        (None, Some(theta)) => {
            let psi = state_vector_from_angles(theta, args.phi.unwrap_or(0.0));
            let rho = density_from_vector(&psi);
            let r = bloch_from_state(&rho)?.components();
            Ok((r, rho, Some(psi)))
        }
    }
}

fn cmd_coherence(args: CoherenceArgs) -> Result<(), CliError> {
    check_energy_arg(args.energy)?;
    if args.points < 2 {
        return Err(CliError::Usage(format!(
            "points must be at least 2, got {}",
            args.points
        )));
    }
    let (r, rho, psi) = parse_state(&args)?;
    let time_to_max = t_mc(&rho, args.energy)?;
    let limit = match &psi {
        Some(p) => Some(mc_speed_limit(p, args.energy)?.bound_value),
        None => None,
    };
    let horizon = PI / (2.0 * args.energy);
    let mut curve = Vec::with_capacity(args.points);
    for k in 0..args.points {
        let t = horizon * k as f64 / (args.points - 1) as f64;
        curve.push((t, coherence_max_qubit(&rho, args.energy, t)?));
    }

    let limit_str = match limit {
        Some(v) => format!("{v:.16e}"),
        None => "n/a (mixed state)".into(),
    };
    let content = match args.format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Point {
                t: f64,
                c_max: f64,
            }
            #[derive(Serialize)]
            struct Out {
                bloch: [f64; 3],
                energy: f64,
                t_mc: f64,
                mc_speed_limit: Option<f64>,
                curve: Vec<Point>,
            }
            let out = Out {
                bloch: r,
                energy: args.energy,
                t_mc: time_to_max,
                mc_speed_limit: limit,
                curve: curve.iter().map(|&(t, c)| Point { t, c_max: c }).collect(),
            };
            let mut s = serde_json::to_string_pretty(&out).expect("coherence serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("t,c_max\n");
            for &(t, c) in &curve {
                s += &format!("{t:.16e},{c:.16e}\n");
            }
            s += &format!("# bloch={:.16e},{:.16e},{:.16e}\n", r[0], r[1], r[2]);
            s += &format!("# t_mc={time_to_max:.16e}\n");
            s += &format!("# mc_speed_limit={limit_str}\n");
            s
        }
        OutputFormat::Text => {
            let mut s = format!("bloch={:.16e},{:.16e},{:.16e}\n", r[0], r[1], r[2]);
            s += &format!("t_mc={time_to_max:.16e}\n");
            s += &format!("mc_speed_limit={limit_str}\n");
            s += "t,c_max\n";
            for &(t, c) in &curve {
                s += &format!("{t:.16e},{c:.16e}\n");
            }
            s
        }
    };
    emit(&content, args.out.as_deref())
}
