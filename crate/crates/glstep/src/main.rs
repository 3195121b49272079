//! Command-line front end for the step-field superconductivity library.
//!
//! Each subcommand wraps one library computation and emits structured
//! artifacts: CSV tables (RFC 4180, 17 significant digits) or JSON result
//! records, plus side summaries where a command has scalar results next to
//! its table. Defaults can be placed in a flat key=value config file named
//! by `GLSTEP_CONFIG`, with `[section]` headers per subcommand; command-line
//! flags override file values. Diagnostics (warnings, wall time) go to
//! stderr so stdout carries only data under `--stdout`.

mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::emit::Format;

/// A front-end failure with its exit code: usage errors exit 2, solver
/// failures exit 3.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed config, or parameters outside a module's
    /// admissible range.
    Usage(String),
    /// A solver gave up (convergence, truncation, schedule exhaustion).
    Solver(String),
}

impl From<glstep_core::Error> for CliError {
    fn from(e: glstep_core::Error) -> Self {
        match e {
            glstep_core::Error::Input(_) | glstep_core::Error::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Solver(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "glstep",
    version,
    about = "Spectral constants, reduced Ginzburg-Landau energies, and the \
             phase diagram of a 2D superconductor under a step magnetic field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// De Gennes curve: sweep the Robin band minimum over a gamma grid.
    Degennes(DegennesArgs),
    /// Fiber band function of the step field: dispersion scan and the
    /// barrier constant beta_a with its minimizer data.
    Fiber(FiberArgs),
    /// Optimal 1D Ginzburg-Landau line energy at (a, b).
    Gl1d(Gl1dArgs),
    /// Surface energy E_surf(b) over a field grid.
    Surface(SurfaceArgs),
    /// Ground state of the reduced 2D energy on one truncated strip.
    Strip(StripArgs),
    /// Barrier energy per unit length from a strip-width schedule, with the
    /// analytic bracket and the 1D line-energy comparison.
    Barrier(BarrierArgs),
    /// Phase-diagram map over an (a, b) grid.
    Phase(PhaseArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Degennes(_) => "degennes",
            Command::Fiber(_) => "fiber",
            Command::Gl1d(_) => "gl1d",
            Command::Surface(_) => "surface",
            Command::Strip(_) => "strip",
            Command::Barrier(_) => "barrier",
            Command::Phase(_) => "phase",
        }
    }
}

/// Output destination and format flags shared by every subcommand.
#[derive(Args)]
struct OutputArgs {
    /// Primary artifact path (side summaries land next to it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Primary artifact format.
    #[arg(long, value_parser = clap::value_parser!(Format))]
    format: Option<Format>,
    /// Write the primary artifact to stdout (data only; diagnostics stay on
    /// stderr).
    #[arg(long)]
    stdout: bool,
}

#[derive(Args)]
struct DegennesArgs {
    /// Gamma grid as lo:hi:step, or a single value.
    #[arg(long)]
    grid: Option<String>,
    /// 1D grid spacing of the spectral solver.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for the grid fan-out.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FiberArgs {
    /// Step amplitude a in [-1,1) excluding 0.
    #[arg(long)]
    a: Option<f64>,
    /// Dispersion xi grid as lo:hi:step (default: the band scan used to
    /// locate the minimum).
    #[arg(long)]
    grid: Option<String>,
    /// 1D grid spacing of the spectral solver.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for the grid fan-out.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct Gl1dArgs {
    /// Step amplitude a in [-1,0).
    #[arg(long)]
    a: Option<f64>,
    /// Field strength b.
    #[arg(long)]
    b: Option<f64>,
    /// 1D grid spacing of the profile solver.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Field grid as lo:hi:step (b >= 1), or a single value.
    #[arg(long)]
    grid: Option<String>,
    /// 1D grid spacing of the profile solver.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for the grid fan-out.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StripArgs {
    /// Step amplitude a in [-1,1) excluding 0.
    #[arg(long)]
    a: Option<f64>,
    /// Field strength b.
    #[arg(long)]
    b: Option<f64>,
    /// Strip width R (hx must divide it).
    #[arg(long)]
    r: Option<f64>,
    /// Vertical truncation m >= 4 (default: run the truncation schedule
    /// until the energy stabilizes; requires b >= 1/|a|).
    #[arg(long)]
    m: Option<f64>,
    /// Horizontal grid spacing.
    #[arg(long)]
    hx: Option<f64>,
    /// Vertical grid spacing.
    #[arg(long)]
    hy: Option<f64>,
    /// Dump the minimizer in the strip-state binary format (header a, b, R,
    /// m, hx, hy as little-endian f64, then row-major interleaved re/im).
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BarrierArgs {
    /// Step amplitude a in [-1,1) excluding 0.
    #[arg(long)]
    a: Option<f64>,
    /// Field strength b (needs b > 1/|a|).
    #[arg(long)]
    b: Option<f64>,
    /// Comma-separated strip widths for the extrapolation schedule.
    #[arg(long)]
    schedule: Option<String>,
    /// Horizontal grid spacing of the strip solves.
    #[arg(long)]
    hx: Option<f64>,
    /// Vertical grid spacing of the strip solves.
    #[arg(long)]
    hy: Option<f64>,
    /// 1D grid spacing of the line-energy comparison.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PhaseArgs {
    /// Comma-separated step amplitudes (each in [-1,1) excluding 0).
    #[arg(long)]
    a: Option<String>,
    /// Field grid as lo:hi:step, or a single value.
    #[arg(long)]
    grid: Option<String>,
    /// Classify from computed per-length energies instead of threshold
    /// signs, and fill the leading-order energy column.
    #[arg(long)]
    energies: bool,
    /// 1D grid spacing of the spectral and surface solvers.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for the grid fan-out.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let cfg = Config::from_env()?;
    let name = cli.command.name();
    let start = Instant::now();
    let (emission, plan) = match cli.command {
        Command::Degennes(args) => commands::degennes(args, &cfg)?,
        Command::Fiber(args) => commands::fiber(args, &cfg)?,
        Command::Gl1d(args) => commands::gl1d(args, &cfg)?,
        Command::Surface(args) => commands::surface(args, &cfg)?,
        Command::Strip(args) => commands::strip(args, &cfg)?,
        Command::Barrier(args) => commands::barrier(args, &cfg)?,
        Command::Phase(args) => commands::phase(args, &cfg)?,
    };
    emit::deliver(&plan, &emission)?;
    eprintln!("{name}: wall time {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
