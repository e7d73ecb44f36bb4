//! `kronig` — band structures of 1-D periodic potentials.
//!
//! Solves the Kronig-Penney and Dirac comb potentials by the
//! finite-difference method with Bloch boundary conditions, cross-validated
//! against the analytic transcendental dispersion relation, and writes
//! deterministic CSV artifacts plus a run manifest.
//!
//! Exit status: 0 on success, 1 on configuration errors, 2 on numerical
//! failures. Diagnostics go to stderr, never into the CSV files.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{run, Command, RunError};
use config::{resolve, Overrides};

#[derive(Parser, Debug)]
#[command(
    name = "kronig",
    version,
    about = "Band structures of 1-D periodic potentials (finite-difference + analytic)",
    after_help = "CONFIG FILE\n  Flat `key = value` lines; `#` starts a comment. Keys: potential.kind \
                  (kp|comb), potential.v0, potential.a, potential.b, potential.alpha, potential.c, \
                  grid.n, periods, sweep.samples, bands, band, kappa_frac, states, grid_sizes, \
                  normalize, method. Command-line flags override file values."
)]
struct Cli {
    /// Computation to run: bands | edges | compare | wavefunction | spectrum | converge.
    #[arg(long)]
    command: String,

    /// Optional key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for the CSV artifacts and manifest.txt.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Potential kind: kp | comb.
    #[arg(long, value_name = "KIND")]
    potential_kind: Option<String>,

    /// Barrier height V0 (hartree, kp).
    #[arg(long)]
    v0: Option<f64>,

    /// Well width a (bohr, kp).
    #[arg(long)]
    a: Option<f64>,

    /// Barrier width b (bohr, kp).
    #[arg(long)]
    b: Option<f64>,

    /// Delta strength alpha (hartree*bohr, comb).
    #[arg(long)]
    alpha: Option<f64>,

    /// Lattice distance c (bohr, comb).
    #[arg(long)]
    c: Option<f64>,

    /// Lattice points per period.
    #[arg(long)]
    grid_n: Option<usize>,

    /// Periods in the box (wavefunction) or ring (spectrum).
    #[arg(long)]
    periods: Option<usize>,

    /// Number of kappa samples for the sweep.
    #[arg(long)]
    samples: Option<usize>,

    /// Number of bands / eigenvalues per solve.
    #[arg(long)]
    bands: Option<usize>,

    /// Band index for the convergence study.
    #[arg(long)]
    band: Option<usize>,

    /// Reduced wave vector kappa*c/2pi in [0, 1].
    #[arg(long)]
    kappa_frac: Option<f64>,

    /// Number of states written by the wavefunction command.
    #[arg(long)]
    states: Option<usize>,

    /// Comma-separated grid sizes for the convergence study.
    #[arg(long)]
    grid_sizes: Option<String>,

    /// Emit E/E1-normalized band columns (true|false).
    #[arg(long)]
    normalize: Option<bool>,

    /// Edge extraction route: fdm | analytic.
    #[arg(long)]
    method: Option<String>,
}

fn main() -> ExitCode {
    // Usage problems are configuration errors (exit 1), not clap's default
    // exit 2, which is reserved for numerical failures here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match try_main(&cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", cli.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Numerical(msg)) => {
            eprintln!("error: numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn try_main(cli: &Cli) -> Result<Vec<String>, RunError> {
    let command = Command::parse(&cli.command).ok_or_else(|| {
        RunError::Config(format!(
            "unknown command `{}`; expected bands | edges | compare | wavefunction | spectrum | converge",
            cli.command
        ))
    })?;
    let file_text = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            RunError::Config(format!("cannot read config {}: {e}", path.display()))
        })?),
        None => None,
    };
    let overrides = Overrides {
        kind: cli.potential_kind.clone(),
        v0: cli.v0,
        a: cli.a,
        b: cli.b,
        alpha: cli.alpha,
        c: cli.c,
        grid_n: cli.grid_n,
        periods: cli.periods,
        samples: cli.samples,
        bands: cli.bands,
        band: cli.band,
        kappa_frac: cli.kappa_frac,
        states: cli.states,
        grid_sizes: cli.grid_sizes.clone(),
        normalize: cli.normalize,
        method: cli.method.clone(),
    };
    let cfg = resolve(file_text.as_deref(), &overrides)
        .map_err(|e| RunError::Config(e.to_string()))?;
    run(&cfg, command, &cli.out)
}
