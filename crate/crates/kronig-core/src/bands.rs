//! Band-structure orchestration: κ-sweeps, finite-ring spectra, band-edge
//! extraction, analytic cross-validation, and grid-refinement studies.
//!
//! Band indices are eigenvalue ranks: in one dimension bands at fixed κ
//! cannot cross away from the zone edges, so the m-th ascending eigenvalue
//! at every κ sample is the m-th band.

use alloc::format;
use alloc::vec::Vec;

use crate::analytic::{self, BandEdge, BandEdges};
use crate::eigensolver::{lowest_eigenpairs, Spectrum};
use crate::error::{Error, Result};
use crate::fm;
use crate::hamiltonian::{assemble_bloch, BlochSpec};
use crate::potentials::{GridSpec, Potential, SampledPotential};

/// Energies of the lowest `k` bands over a κ-sweep.
#[derive(Debug, Clone)]
pub struct BandStructure {
    kappa_fracs: Vec<f64>,
    /// `energies[sample][band]`, ascending in band.
    energies: Vec<Vec<f64>>,
    normalized: Option<Vec<Vec<f64>>>,
    reference_energy: Option<f64>,
    potential: Potential,
    grid: GridSpec,
}

impl BandStructure {
    /// Sampled reduced wave vectors `κc/2π`.
    pub fn kappa_fracs(&self) -> &[f64] {
        &self.kappa_fracs
    }

    /// `energies()[i][m]` is band `m+1` at the `i`-th κ sample (hartree).
    pub fn energies(&self) -> &[Vec<f64>] {
        &self.energies
    }

    /// Energies divided by the reference ground-state energy, when the
    /// sweep was run with normalization.
    pub fn normalized(&self) -> Option<&[Vec<f64>]> {
        self.normalized.as_deref()
    }

    /// The reference energy `E₁` (band 1 at the first κ sample).
    pub fn reference_energy(&self) -> Option<f64> {
        self.reference_energy
    }

    /// Potential the sweep was run for.
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Grid the sweep was run on.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of bands per sample.
    pub fn n_bands(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }
}

/// One allowed momentum of a finite ring of `n` periods.
#[derive(Debug, Clone)]
pub struct DiscreteLevel {
    /// Momentum quantum number `l = 0..n-1`.
    pub l: usize,
    /// Wave vector `κ = 2πl/(nc)` (1/bohr).
    pub kappa: f64,
    /// Lowest `k` energies at this κ, ascending (hartree).
    pub energies: Vec<f64>,
}

/// Per-band comparison of analytic and finite-difference band edges.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonRow {
    pub band: usize,
    pub analytic_min: f64,
    pub analytic_max: f64,
    pub fdm_min: f64,
    pub fdm_max: f64,
    /// `|fdm_min - analytic_min|`
    pub dev_min: f64,
    /// `|fdm_max - analytic_max|`
    pub dev_max: f64,
}

/// Analytic vs finite-difference band edges for every requested band.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn rows(&self) -> &[ComparisonRow] {
        &self.rows
    }

    /// Largest edge deviation across all bands.
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .fold(0.0f64, |m, r| m.max(r.dev_min).max(r.dev_max))
    }
}

/// One grid level of a refinement study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceLevel {
    pub n_points: usize,
    /// Grid step (bohr).
    pub h: f64,
    /// Finite-difference energy (hartree).
    pub energy: f64,
    /// `|energy - analytic|` (hartree).
    pub error: f64,
}

/// Grid-refinement study of one band energy against the analytic value.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    levels: Vec<ConvergenceLevel>,
    fitted_order: f64,
}

impl ConvergenceReport {
    pub fn levels(&self) -> &[ConvergenceLevel] {
        &self.levels
    }

    /// Convergence order fitted from successive error ratios,
    /// `p = ln(err(h₁)/err(h₂)) / ln(h₁/h₂)` averaged over the levels.
    pub fn fitted_order(&self) -> f64 {
        self.fitted_order
    }
}

fn tag_kappa(err: Error, kappa_frac: f64) -> Error {
    match err {
        Error::NonConvergence { details } => Error::NonConvergence {
            details: format!("{details} (at kappa_frac = {kappa_frac})"),
        },
        other => other,
    }
}

fn require_single_period(grid: &GridSpec, what: &'static str) -> Result<()> {
    if grid.n_periods() != 1 {
        return Err(Error::InvalidInput {
            what,
            details: format!(
                "requires a single-period grid, got {} periods",
                grid.n_periods()
            ),
        });
    }
    Ok(())
}

/// Solves the Bloch eigenproblem for one reduced wave vector on any grid
/// (single- or multi-period box).
pub fn bloch_spectrum(
    pot: &Potential,
    grid: &GridSpec,
    kappa_frac: f64,
    k: usize,
) -> Result<Spectrum> {
    let sampled = pot.sample(grid)?;
    bloch_spectrum_sampled(&sampled, pot.period(), kappa_frac, k)
}

/// Same as [`bloch_spectrum`] for an already-sampled potential.
///
/// On multi-period boxes, exactly degenerate groups (the ±κ' pairs of the
/// folded lattice momenta) are rotated into eigenstates of the one-period
/// translation, so the returned wavefunctions are pure Bloch states with
/// cell-periodic |ψ|². Within a degenerate subspace that rotation is free;
/// it makes the output physical and reproducible.
pub fn bloch_spectrum_sampled(
    sampled: &SampledPotential,
    period: f64,
    kappa_frac: f64,
    k: usize,
) -> Result<Spectrum> {
    let bloch = BlochSpec::from_kappa_frac(kappa_frac, period, sampled.grid().box_length())?;
    let ham = assemble_bloch(sampled, bloch)?;
    let spectrum = lowest_eigenpairs(&ham, k).map_err(|e| tag_kappa(e, kappa_frac))?;
    if sampled.grid().n_periods() > 1 {
        crate::eigensolver::resolve_translation_degeneracy(spectrum, &ham)
    } else {
        Ok(spectrum)
    }
}

/// Sweeps `samples` uniform κ points over `0 ≤ κc/2π ≤ 1` and records the
/// lowest `n_bands` eigenvalues at each.
///
/// With `normalize` set, energies are also reported relative to the
/// reference `E₁`, the band-1 energy at the first κ sample (`κ = 0`).
pub fn sweep(
    pot: &Potential,
    grid: &GridSpec,
    samples: usize,
    n_bands: usize,
    normalize: bool,
) -> Result<BandStructure> {
    require_single_period(grid, "sweep")?;
    if samples < 2 {
        return Err(Error::InvalidInput {
            what: "samples",
            details: format!("need at least 2 kappa samples, got {samples}"),
        });
    }
    let sampled = pot.sample(grid)?;
    let mut kappa_fracs = Vec::with_capacity(samples);
    let mut energies = Vec::with_capacity(samples);
    for j in 0..samples {
        let frac = j as f64 / (samples - 1) as f64;
        let spectrum = bloch_spectrum_sampled(&sampled, pot.period(), frac, n_bands)?;
        kappa_fracs.push(frac);
        energies.push(spectrum.energies());
    }
    let (normalized, reference_energy) = if normalize {
        let e1 = energies[0][0];
        if fm::abs(e1) < 1e-300 {
            return Err(Error::InvalidInput {
                what: "normalize",
                details: format!("reference energy E1 = {e1} is too close to zero"),
            });
        }
        let scaled = energies
            .iter()
            .map(|row| row.iter().map(|e| e / e1).collect())
            .collect();
        (Some(scaled), Some(e1))
    } else {
        (None, None)
    };
    Ok(BandStructure {
        kappa_fracs,
        energies,
        normalized,
        reference_energy,
        potential: *pot,
        grid: *grid,
    })
}

/// Spectrum of a Born-von-Karman ring of `n` periods: one Bloch solve per
/// allowed momentum `κ = 2πl/(nc)`, `l = 0..n-1`, on the single-period
/// grid. Equivalent to diagonalizing the full `n`-period ring, at 1/n the
/// matrix size per solve.
pub fn discrete_spectrum(
    pot: &Potential,
    grid: &GridSpec,
    n: usize,
    n_bands: usize,
) -> Result<Vec<DiscreteLevel>> {
    require_single_period(grid, "discrete_spectrum")?;
    if n == 0 {
        return Err(Error::InvalidInput {
            what: "n",
            details: format!("need at least one period, got {n}"),
        });
    }
    let sampled = pot.sample(grid)?;
    let c = pot.period();
    let mut levels = Vec::with_capacity(n);
    for l in 0..n {
        let frac = l as f64 / n as f64;
        let spectrum = bloch_spectrum_sampled(&sampled, c, frac, n_bands)?;
        levels.push(DiscreteLevel {
            l,
            kappa: 2.0 * core::f64::consts::PI * l as f64 / (n as f64 * c),
            energies: spectrum.energies(),
        });
    }
    Ok(levels)
}

/// Finite-difference band edges from the two zone-edge solves.
///
/// Band extrema sit at `cos(κc) = ±1`, so two Bloch solves at `κc = 0` and
/// `κc = π` suffice: the m-th eigenvalues of the two solves are the two
/// edges of band m (which one is the minimum alternates with parity; they
/// are min/max-ordered here).
pub fn fdm_band_edges(pot: &Potential, grid: &GridSpec, n_bands: usize) -> Result<BandEdges> {
    require_single_period(grid, "fdm_band_edges")?;
    let sampled = pot.sample(grid)?;
    fdm_band_edges_sampled(&sampled, pot.period(), n_bands)
}

/// [`fdm_band_edges`] on an already-sampled potential (any cyclic shift of
/// the cell leaves the result unchanged).
pub fn fdm_band_edges_sampled(
    sampled: &SampledPotential,
    period: f64,
    n_bands: usize,
) -> Result<BandEdges> {
    if n_bands == 0 {
        return Err(Error::InvalidInput {
            what: "n_bands",
            details: format!("need at least one band, got {n_bands}"),
        });
    }
    let center = bloch_spectrum_sampled(sampled, period, 0.0, n_bands)?;
    let zone_edge = bloch_spectrum_sampled(sampled, period, 0.5, n_bands)?;
    let edges = (0..n_bands)
        .map(|m| {
            let (a, b) = (center.energy(m), zone_edge.energy(m));
            BandEdge {
                band: m + 1,
                e_min: a.min(b),
                e_max: a.max(b),
            }
        })
        .collect();
    Ok(BandEdges::from_edges(edges))
}

/// Runs both routes and tabulates the edge deviations per band.
pub fn compare_with_analytic(
    pot: &Potential,
    grid: &GridSpec,
    n_bands: usize,
) -> Result<ComparisonReport> {
    let fdm = fdm_band_edges(pot, grid, n_bands)?;
    let exact = analytic::band_edges(pot, n_bands)?;
    let rows = (1..=n_bands)
        .map(|band| {
            let f = fdm.get(band).expect("fdm band");
            let a = exact.get(band).expect("analytic band");
            ComparisonRow {
                band,
                analytic_min: a.e_min,
                analytic_max: a.e_max,
                fdm_min: f.e_min,
                fdm_max: f.e_max,
                dev_min: fm::abs(f.e_min - a.e_min),
                dev_max: fm::abs(f.e_max - a.e_max),
            }
        })
        .collect();
    Ok(ComparisonReport { rows })
}

/// Grid-refinement study: the band energy at `kappa_frac` is recomputed on
/// single-period grids of the given sizes and compared against the
/// analytic value; the observed convergence order is fitted from
/// successive error ratios.
pub fn convergence_study(
    pot: &Potential,
    kappa_frac: f64,
    band: usize,
    sizes: &[usize],
) -> Result<ConvergenceReport> {
    if sizes.len() < 3 {
        return Err(Error::InvalidInput {
            what: "sizes",
            details: format!("need at least 3 grid sizes, got {}", sizes.len()),
        });
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput {
            what: "sizes",
            details: format!("grid sizes must be strictly increasing: {sizes:?}"),
        });
    }
    let edges = analytic::band_edges(pot, band)?;
    let exact = analytic::solve_band_energy(pot, &edges, band, kappa_frac)?;

    let mut levels = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let grid = GridSpec::per_period(n, pot.period(), 1)?;
        let spectrum = bloch_spectrum(pot, &grid, kappa_frac, band)?;
        let energy = spectrum.energy(band - 1);
        levels.push(ConvergenceLevel {
            n_points: n,
            h: grid.step(),
            energy,
            error: fm::abs(energy - exact),
        });
    }
    let mut orders = Vec::with_capacity(levels.len() - 1);
    for w in levels.windows(2) {
        if w[0].error > 0.0 && w[1].error > 0.0 {
            orders.push(fm::ln(w[0].error / w[1].error) / fm::ln(w[0].h / w[1].h));
        }
    }
    let fitted_order = if orders.is_empty() {
        f64::NAN
    } else {
        orders.iter().sum::<f64>() / orders.len() as f64
    };
    Ok(ConvergenceReport {
        levels,
        fitted_order,
    })
}
