//! Command-line front end: `solve`, `gen`, `check`, `bench`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::driver::{solve_lowest, ModeSet, SolverConfig, StartPolicy};
use crate::error::{Error, Result};
use crate::mmio::{read_matrix_market, write_history_csv, write_matrix_market};
use crate::operators::LinearOperator;
use crate::oracle::{dense_spectrum, gen_problem, gen_random_spd};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
/// `check` ran but the frequencies disagree with the dense reference.
pub const EXIT_MISMATCH: i32 = 3;

const CHECK_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "oscmodes",
    version,
    about = "Lowest normal-mode frequencies of Kξ = ωη, Tη = ωξ"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the lowest frequencies and print them ascending.
    Solve(SolveArgs),
    /// Write a random sparse SPD matrix in Matrix Market format.
    Gen(GenArgs),
    /// Compare the solver against the dense reference on a generated problem.
    Check(CheckArgs),
    /// Time a solve on a generated problem.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_name = "FILE")]
    k_matrix: Option<PathBuf>,
    #[arg(long, value_name = "FILE", conflicts_with = "mass_matrix")]
    t_matrix: Option<PathBuf>,
    /// Mass matrix M; T = M⁻¹ is applied through an inner CG solve.
    #[arg(long, value_name = "FILE")]
    mass_matrix: Option<PathBuf>,
    /// Generate K and T instead of reading files.
    #[arg(long, value_name = "N,NNZ,SEED", conflicts_with_all = ["k_matrix", "t_matrix", "mass_matrix"])]
    gen: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_name = "OUT.csv")]
    history: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 1)]
    neigs: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 80)]
    max_basis: usize,
    #[arg(long, default_value_t = 200)]
    max_restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Starting pair: independent random ξ and η, or η = ξ (for K = T).
    #[arg(long, value_enum, default_value_t = Start::Independent)]
    start: Start,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Start {
    Independent,
    Identical,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 40)]
    nnz_per_row: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file. With `--t-out`, receives the K of the generated pair.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write T of the pair `solve --gen N,NNZ,SEED` would build.
    #[arg(long, value_name = "FILE")]
    t_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 40)]
    nnz_per_row: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    neigs: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 40)]
    nnz_per_row: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    neigs: usize,
}

/// Runs the CLI on `argv` (program name first) writing to the given streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(args, out, err),
        Command::Gen(args) => gen(args),
        Command::Check(args) => check(args, out),
        Command::Bench(args) => bench(args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotSpd { .. }
        | Error::MaxIterations { .. }
        | Error::RestartsExhausted { .. }
        | Error::DegeneratePair { .. }
        | Error::SingularFactor { .. } => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

/// Worker threads for matvecs, from `OSC_THREADS`. Unset means serial.
fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("OSC_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::InvalidParameter(format!(
                "OSC_THREADS must be a positive integer, got {s:?}"
            ))),
        },
    }
}

fn threaded(op: LinearOperator, threads: Option<usize>) -> Result<LinearOperator> {
    match threads {
        Some(n) if n > 1 => op.with_threads(n),
        _ => Ok(op),
    }
}

fn parse_gen_spec(spec: &str) -> Result<(usize, usize, u64)> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || Error::InvalidParameter(format!("--gen expects N,NNZ,SEED, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn config_from(args: &SolverArgs) -> SolverConfig {
    SolverConfig {
        n_eigs: args.neigs,
        tol: args.tol,
        max_basis: args.max_basis,
        max_restarts: args.max_restarts,
        seed: args.seed,
        start: match args.start {
            Start::Independent => StartPolicy::Independent,
            Start::Identical => StartPolicy::Identical,
        },
        ..Default::default()
    }
}

fn load_operators(args: &SolveArgs) -> Result<(LinearOperator, LinearOperator)> {
    let threads = threads_from_env()?;
    if let Some(spec) = &args.gen {
        let (n, nnz, seed) = parse_gen_spec(spec)?;
        let (k, t) = gen_problem(n, nnz, seed)?;
        return Ok((
            threaded(LinearOperator::explicit(k), threads)?,
            threaded(LinearOperator::explicit(t), threads)?,
        ));
    }
    let k_path = args
        .k_matrix
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("need --k-matrix with --t-matrix or --mass-matrix, or --gen".into()))?;
    let k = LinearOperator::explicit(read_matrix_market(k_path)?);
    let t = match (&args.t_matrix, &args.mass_matrix) {
        (Some(p), None) => LinearOperator::explicit(read_matrix_market(p)?),
        (None, Some(p)) => LinearOperator::inverse_mass(read_matrix_market(p)?),
        _ => {
            return Err(Error::InvalidParameter(
                "need exactly one of --t-matrix or --mass-matrix".into(),
            ))
        }
    };
    Ok((threaded(k, threads)?, threaded(t, threads)?))
}

fn print_modes(out: &mut dyn Write, modes: &ModeSet) -> Result<()> {
    for m in &modes.modes {
        writeln!(out, "{:.16e}", m.omega)?;
    }
    Ok(())
}

fn solve(args: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if args.gen.is_none() && args.k_matrix.is_none() {
        let mut cmd = <Cli as clap::CommandFactory>::command();
        let usage = cmd
            .find_subcommand_mut("solve")
            .map(|c| c.render_usage().to_string())
            .unwrap_or_default();
        writeln!(
            err,
            "error: no input given; use --k-matrix with --t-matrix/--mass-matrix, or --gen\n\n{usage}"
        )?;
        return Ok(EXIT_USAGE);
    }
    let (k, t) = load_operators(&args)?;
    let config = config_from(&args.solver);
    match solve_lowest(&k, &t, &config) {
        Ok(modes) => {
            if let Some(path) = &args.history {
                write_history_csv(&modes.history, path)?;
            }
            print_modes(out, &modes)?;
            Ok(EXIT_OK)
        }
        Err(Error::RestartsExhausted {
            partial,
            restarts,
            found,
            requested,
        }) => {
            if let Some(path) = &args.history {
                if !partial.history.is_empty() {
                    write_history_csv(&partial.history, path)?;
                }
            }
            print_modes(out, &partial)?;
            Err(Error::RestartsExhausted {
                partial,
                restarts,
                found,
                requested,
            })
        }
        Err(e) => Err(e),
    }
}

fn gen(args: GenArgs) -> Result<i32> {
    match &args.t_out {
        None => write_matrix_market(&gen_random_spd(args.n, args.nnz_per_row, args.seed)?, &args.out)?,
        Some(t_out) => {
            let (k, t) = gen_problem(args.n, args.nnz_per_row, args.seed)?;
            write_matrix_market(&k, &args.out)?;
            write_matrix_market(&t, t_out)?;
        }
    }
    Ok(EXIT_OK)
}

fn check(args: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let (k, t) = gen_problem(args.n, args.nnz_per_row, args.seed)?;
    let reference = dense_spectrum(&k, &t, false)?;
    let config = SolverConfig {
        n_eigs: args.neigs,
        seed: args.seed,
        record_history: false,
        ..Default::default()
    };
    let threads = threads_from_env()?;
    let k_op = threaded(LinearOperator::explicit(k), threads)?;
    let t_op = threaded(LinearOperator::explicit(t), threads)?;
    let modes = solve_lowest(&k_op, &t_op, &config)?;
    let worst = modes
        .omegas()
        .iter()
        .zip(&reference.omegas)
        .map(|(got, want)| ((got - want) / want).abs())
        .fold(0.0_f64, f64::max);
    writeln!(out, "{worst:.16e}")?;
    Ok(if worst <= CHECK_TOL { EXIT_OK } else { EXIT_MISMATCH })
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let t0 = Instant::now();
    let (k, t) = gen_problem(args.n, args.nnz_per_row, args.seed)?;
    let gen_secs = t0.elapsed().as_secs_f64();
    let threads = threads_from_env()?;
    let k_op = threaded(LinearOperator::explicit(k), threads)?;
    let t_op = threaded(LinearOperator::explicit(t), threads)?;
    let config = SolverConfig {
        n_eigs: args.neigs,
        seed: args.seed,
        ..Default::default()
    };
    let t1 = Instant::now();
    let modes = solve_lowest(&k_op, &t_op, &config)?;
    let solve_secs = t1.elapsed().as_secs_f64();
    writeln!(
        out,
        "n={} nnz_per_row={} threads={}",
        args.n,
        args.nnz_per_row,
        threads.unwrap_or(1)
    )?;
    writeln!(out, "generate_s={gen_secs:.3}")?;
    writeln!(out, "solve_s={solve_secs:.3}")?;
    writeln!(out, "op_applies={}", modes.op_applies)?;
    writeln!(out, "outer_steps={}", modes.history.len())?;
    writeln!(out, "restarts={}", modes.restarts)?;
    for m in &modes.modes {
        writeln!(out, "omega={:.16e}", m.omega)?;
    }
    Ok(EXIT_OK)
}
