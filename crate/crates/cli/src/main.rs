use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seriesolve::frontend::{self, parse_grid, parse_problem, write_csv};
use seriesolve::{CoeffClass, Engine, FieldDescriptor, ProblemKind, ProblemSpec};

#[derive(Parser)]
#[command(name = "seriesolve", version, about = "Power-series solutions of differential equations over exact fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Override the precision N from the problem file
    #[arg(long = "N", value_name = "N")]
    n: Option<usize>,
    /// Reinterpret the problem over another field (`p:<modulus>` or `q`)
    #[arg(long)]
    field: Option<FieldDescriptor>,
    /// Structured output instead of one coefficient per line
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        engine: Engine,
        #[command(flatten)]
        out: Output,
    },
    /// Time random instances on a grid and write CSV
    Bench {
        /// Lines of `problem engine r N [coeffs]`
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// CSV destination, `-` for stdout
        #[arg(long, default_value = "-")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "p:2013265921")]
        field: FieldDescriptor,
    },
    /// Compare a fast engine with the reference solver and check residuals
    Check {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        engine: Engine,
        #[command(flatten)]
        out: Output,
    },
    /// Scalar equation with constant coefficients, one solution
    #[command(name = "const-ii")]
    ConstScalar(Special),
    /// Scalar equation with constant coefficients, basis of solutions
    #[command(name = "const-i")]
    ConstScalarBasis(Special),
    /// Constant system, one solution
    #[command(name = "const-II")]
    ConstSystem(Special),
    /// Constant system, fundamental matrix
    #[command(name = "const-I")]
    ConstSystemBasis(Special),
    /// Scalar equation with polynomial coefficients
    #[command(name = "poly-ii")]
    PolyScalar(Special),
    /// System with polynomial coefficients
    #[command(name = "poly-II")]
    PolySystem(Special),
}

#[derive(Args)]
struct Special {
    file: PathBuf,
    #[command(flatten)]
    out: Output,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn load(path: &Path, out: &Output) -> CliResult<ProblemSpec> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut spec = parse_problem(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(n) = out.n {
        spec.n = n;
    }
    if let Some(f) = out.field {
        spec.field = f;
    }
    Ok(spec.validate()?)
}

fn solve(spec: &ProblemSpec, engine: Engine, out: &Output) -> CliResult<()> {
    let report = frontend::solve_spec(spec, engine)?;
    let mut stdout = io::stdout().lock();
    if out.json {
        serde_json::to_writer_pretty(&mut stdout, &report)?;
        writeln!(stdout)?;
    } else {
        stdout.write_all(report.to_text().as_bytes())?;
    }
    Ok(())
}

fn special(args: &Special, kind: ProblemKind, class: CoeffClass) -> CliResult<()> {
    let spec = load(&args.file, &args.out)?;
    if spec.kind != kind || spec.coeffs != class {
        return Err(format!("expected a {class} problem {kind}, the file holds a {} problem {}", spec.coeffs, spec.kind).into());
    }
    let engine = if class == CoeffClass::Constant { Engine::Const } else { Engine::Polycoeff };
    solve(&spec, engine, &args.out)
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Solve { file, engine, out } => solve(&load(&file, &out)?, engine, &out)?,
        Command::Check { file, engine, out } => {
            let report = frontend::check(&load(&file, &out)?, engine)?;
            if out.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("engine: {}", report.engine);
                println!("matches reference: {}", report.matches_oracle);
                println!("residual zero: {}", report.residual_zero);
                println!("reference residual zero: {}", report.oracle_residual_zero);
            }
            return Ok(report.passed());
        }
        Command::Bench { grid, reps, out, seed, field } => {
            let text = fs::read_to_string(&grid).map_err(|e| format!("{}: {e}", grid.display()))?;
            let points = parse_grid(&text)?;
            let records = frontend::bench(&points, reps, field, seed);
            if out.as_os_str() == "-" {
                write_csv(&records, io::stdout().lock())?;
            } else {
                write_csv(&records, fs::File::create(&out)?)?;
            }
        }
        Command::ConstScalar(a) => special(&a, ProblemKind::ScalarSingle, CoeffClass::Constant)?,
        Command::ConstScalarBasis(a) => special(&a, ProblemKind::ScalarBasis, CoeffClass::Constant)?,
        Command::ConstSystem(a) => special(&a, ProblemKind::SystemSingle, CoeffClass::Constant)?,
        Command::ConstSystemBasis(a) => special(&a, ProblemKind::SystemBasis, CoeffClass::Constant)?,
        Command::PolyScalar(a) => special(&a, ProblemKind::ScalarSingle, CoeffClass::Polynomial)?,
        Command::PolySystem(a) => special(&a, ProblemKind::SystemSingle, CoeffClass::Polynomial)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var("SERIESOLVE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring SERIESOLVE_THREADS={v}"),
        }
    }
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
