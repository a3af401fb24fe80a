//! `rough-bernoulli`: cell constants, free-boundary solves, tables and figure data.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rough_bernoulli::Error;
use settings::Settings;

#[derive(Parser, Debug)]
#[command(
    name = "rough-bernoulli",
    version,
    about = "Exterior Bernoulli problem on rough discs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the periodic cell problem and report the wall-law integral.
    Cell(CommonArgs),
    /// Closed-form disc solution for given lambda (and optional B0, eps).
    Radial(CommonArgs),
    /// Solve one rough free-boundary problem.
    Solve(CommonArgs),
    /// Sweep eps and mesh sizes; tabulate D_H / eps^2.
    Table(CommonArgs),
    /// Emit inner and outer boundary polylines.
    Figure(CommonArgs),
    /// Distances between two curve files.
    Metrics(MetricsArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// h1, h2, zero or file:PATH
    #[arg(long)]
    shape: Option<String>,
    /// Roughness scale; a comma separated list for `table`
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Cell truncation height
    #[arg(long)]
    mtrunc: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; its entries override flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh list for `table`: grid spacings (e.g. 3e-3) or NRxNTHETA pairs
    #[arg(long)]
    meshes: Option<String>,
    /// Wall-law constant; computed from the cell problem when omitted
    #[arg(long, allow_hyphen_values = true)]
    b0: Option<f64>,
    /// Decay rate probed by the cell report
    #[arg(long)]
    mu: Option<f64>,
    /// preconditioned or plain
    #[arg(long)]
    update: Option<String>,
    /// Smooth the boundary gradient with a 3-point filter
    #[arg(long)]
    filter: bool,
    /// Also write the full cell grid
    #[arg(long)]
    dump: bool,
}

#[derive(Args, Debug, Clone)]
struct MetricsArgs {
    first: PathBuf,
    second: PathBuf,
    /// Inner ball radius of the admissible class
    #[arg(long)]
    delta: Option<f64>,
    /// Outer ball radius of the admissible class
    #[arg(long)]
    mbound: Option<f64>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidProfile(_)
            | Error::InvalidEpsilon(_)
            | Error::InvalidGrid(_)
            | Error::DegenerateDomain(_)
            | Error::Range { .. }
            | Error::Parse { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

fn settings(args: &CommonArgs) -> Result<Settings, Failure> {
    let mut s = Settings::default();
    s.set("shape", args.shape.as_ref());
    s.set("eps", args.eps.as_ref());
    s.set("lambda", args.lambda);
    s.set("mtrunc", args.mtrunc);
    s.set("nr", args.nr);
    s.set("ntheta", args.ntheta);
    s.set("tau", args.tau);
    s.set("tol", args.tol);
    s.set("max-iter", args.max_iter);
    s.set("out", args.out.as_ref().map(|p| p.display()));
    s.set("meshes", args.meshes.as_ref());
    s.set("b0", args.b0);
    s.set("mu", args.mu);
    s.set("update", args.update.as_ref());
    s.set("filter", args.filter.then_some(true));
    s.set("dump", args.dump.then_some(true));
    if let Some(path) = &args.config {
        s.overlay_file(path)?;
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Cell(a) => commands::cell(&settings(&a)?),
        Command::Radial(a) => commands::radial(&settings(&a)?),
        Command::Solve(a) => commands::solve(&settings(&a)?),
        Command::Table(a) => commands::table(&settings(&a)?),
        Command::Figure(a) => commands::figure(&settings(&a)?),
        Command::Metrics(a) => commands::metrics(&a.first, &a.second, a.delta, a.mbound),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Numeric(m) => eprintln!("numeric failure: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
