//! Command implementations: each one runs a computation and emits CSV
//! artifacts plus the run manifest.

use std::fmt;
use std::path::Path;

use kronig_core::analytic;
use kronig_core::bands;
use kronig_core::potentials::GridSpec;
use kronig_core::Error as CoreError;

use crate::config::{EdgeMethod, RunConfig};
use crate::output::{num, write_manifest, Csv};

/// The computation selected with `--command`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// κ-sweep band structure -> bands.csv
    Bands,
    /// Band edges (FDM or analytic) -> edges.csv
    Edges,
    /// FDM vs analytic edges -> compare.csv
    Compare,
    /// Wavefunctions at one κ -> wavefunction.csv
    Wavefunction,
    /// Finite-ring spectrum -> spectrum.csv
    Spectrum,
    /// Grid-refinement study -> convergence.csv
    Converge,
}

impl Command {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "bands" => Some(Command::Bands),
            "edges" => Some(Command::Edges),
            "compare" => Some(Command::Compare),
            "wavefunction" => Some(Command::Wavefunction),
            "spectrum" => Some(Command::Spectrum),
            "converge" => Some(Command::Converge),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Edges => "edges",
            Command::Compare => "compare",
            Command::Wavefunction => "wavefunction",
            Command::Spectrum => "spectrum",
            Command::Converge => "converge",
        }
    }
}

/// Failure of a run. `Config` exits with status 1, `Numerical` with 2.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        if e.is_numerical() {
            RunError::Numerical(e.to_string())
        } else {
            RunError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Config(format!("io: {e}"))
    }
}

fn band_headers(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|m| format!("{prefix}{m}_hartree")).collect()
}

/// Runs `command` under `cfg`, writing artifacts into `out_dir`. Returns
/// the emitted file names (manifest last).
pub fn run(cfg: &RunConfig, command: Command, out_dir: &Path) -> Result<Vec<String>, RunError> {
    std::fs::create_dir_all(out_dir)?;
    let pot = cfg.potential().map_err(|e| RunError::Config(e.to_string()))?;
    let single = GridSpec::per_period(cfg.grid_n, pot.period(), 1)?;
    let mut extras: Vec<(String, String)> = Vec::new();

    let csv = match command {
        Command::Bands => {
            let bs = bands::sweep(&pot, &single, cfg.samples, cfg.bands, cfg.normalize)?;
            let mut header: Vec<String> = vec!["kappa_frac".to_string()];
            header.extend(band_headers("E_", cfg.bands));
            if cfg.normalize {
                header.extend((1..=cfg.bands).map(|m| format!("E_{m}_over_E1")));
            }
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut csv = Csv::new("bands.csv", &header_refs);
            for (i, &frac) in bs.kappa_fracs().iter().enumerate() {
                let mut row = vec![num(frac)];
                row.extend(bs.energies()[i].iter().map(|&e| num(e)));
                if let Some(normed) = bs.normalized() {
                    row.extend(normed[i].iter().map(|&e| num(e)));
                }
                csv.row(&row);
            }
            if let Some(e1) = bs.reference_energy() {
                extras.push(("reference_energy_hartree".to_string(), num(e1)));
            }
            csv
        }
        Command::Edges => {
            let edges = match cfg.method {
                EdgeMethod::Fdm => bands::fdm_band_edges(&pot, &single, cfg.bands)?,
                EdgeMethod::Analytic => analytic::band_edges(&pot, cfg.bands)?,
            };
            let mut csv = Csv::new("edges.csv", &["band", "e_min_hartree", "e_max_hartree"]);
            for e in edges.edges() {
                csv.row(&[e.band.to_string(), num(e.e_min), num(e.e_max)]);
            }
            csv
        }
        Command::Compare => {
            let report = bands::compare_with_analytic(&pot, &single, cfg.bands)?;
            let mut csv = Csv::new(
                "compare.csv",
                &[
                    "band",
                    "analytic_min_hartree",
                    "analytic_max_hartree",
                    "fdm_min_hartree",
                    "fdm_max_hartree",
                    "dev_min_hartree",
                    "dev_max_hartree",
                ],
            );
            for r in report.rows() {
                csv.row(&[
                    r.band.to_string(),
                    num(r.analytic_min),
                    num(r.analytic_max),
                    num(r.fdm_min),
                    num(r.fdm_max),
                    num(r.dev_min),
                    num(r.dev_max),
                ]);
            }
            extras.push((
                "max_deviation_hartree".to_string(),
                num(report.max_deviation()),
            ));
            csv
        }
        Command::Wavefunction => {
            let grid = GridSpec::per_period(cfg.grid_n, pot.period(), cfg.periods)?;
            let spectrum = bands::bloch_spectrum(&pot, &grid, cfg.kappa_frac, cfg.states)?;
            let mut csv = Csv::new(
                "wavefunction.csv",
                &["state", "x_bohr", "re_psi", "im_psi", "abs2_per_bohr"],
            );
            for (s, pair) in spectrum.pairs().iter().enumerate() {
                extras.push((format!("E_{}_hartree", s + 1), num(pair.energy)));
                for (i, v) in pair.wavefunction.iter().enumerate() {
                    csv.row(&[
                        (s + 1).to_string(),
                        num(grid.x(i)),
                        num(v.re),
                        num(v.im),
                        num(v.norm_sqr()),
                    ]);
                }
            }
            csv
        }
        Command::Spectrum => {
            let levels = bands::discrete_spectrum(&pot, &single, cfg.periods, cfg.bands)?;
            let mut csv = Csv::new(
                "spectrum.csv",
                &["l", "kappa_per_bohr", "band", "energy_hartree"],
            );
            for level in &levels {
                for (m, &e) in level.energies.iter().enumerate() {
                    csv.row(&[
                        level.l.to_string(),
                        num(level.kappa),
                        (m + 1).to_string(),
                        num(e),
                    ]);
                }
            }
            csv
        }
        Command::Converge => {
            let report =
                bands::convergence_study(&pot, cfg.kappa_frac, cfg.band, &cfg.grid_sizes)?;
            let mut csv = Csv::new(
                "convergence.csv",
                &["n_points", "h_bohr", "energy_hartree", "abs_error_hartree"],
            );
            for level in report.levels() {
                csv.row(&[
                    level.n_points.to_string(),
                    num(level.h),
                    num(level.energy),
                    num(level.error),
                ]);
            }
            extras.push(("fitted_order".to_string(), format!("{:.6}", report.fitted_order())));
            csv
        }
    };

    csv.write(out_dir)?;
    write_manifest(
        out_dir,
        command.name(),
        &cfg.entries(),
        &extras,
        &[csv.name()],
    )?;
    Ok(vec![csv.name().to_string(), "manifest.txt".to_string()])
}
