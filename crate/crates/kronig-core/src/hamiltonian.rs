//! Finite-difference Hamiltonians on the uniform grid.
//!
//! With `ħ = m = 1`, the three-point central difference turns
//! `-ψ''/2 + Vψ = Eψ` into a symmetric tridiagonal matrix with diagonal
//! `1/h² + Vᵢ` and off-diagonal `-1/(2h²)`. Dirichlet walls simply drop
//! `ψ(0)` and `ψ((N+1)h)`. Bloch boundary conditions
//! `ψ(0) = e^{-iκL}ψ(Nh)`, `ψ((N+1)h) = e^{iκL}ψ(h)` instead fold the
//! stencil around the box, adding the conjugate pair of corner entries
//! `-e^{∓iκL}/(2h²)` at `(1,N)` and `(N,1)`. The matrix stays Hermitian and
//! is stored as the structured triple (diagonal, off-diagonal scalar,
//! corner scalar) — never densely.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fm;
use crate::potentials::{GridSpec, SampledPotential};
use crate::Complex64;

/// Bloch wave-vector data for one κ sample.
///
/// `kappa` is the wave vector (1/bohr), `phase = e^{iκL}` with `L` the full
/// box length, and `kappa_frac = κc/2π ∈ [0, 1]` the reduced wave vector
/// used for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSpec {
    kappa: f64,
    phase: Complex64,
    kappa_frac: f64,
}

impl BlochSpec {
    /// Builds the Bloch data from the reduced wave vector `kappa_frac = κc/2π`,
    /// the lattice period `c` and the box length `L` (a whole multiple of
    /// `c`).
    ///
    /// The phase `e^{iκL}` is computed from the exactly reduced turn count
    /// `κL/2π mod 1`, so `κL ≡ 0` and `κL ≡ π` give phases of exactly
    /// `+1` and `-1`; the matrix is then genuinely real at the band edges.
    pub fn from_kappa_frac(kappa_frac: f64, period: f64, box_length: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa_frac) {
            return Err(Error::InvalidInput {
                what: "kappa_frac",
                details: format!("must lie in [0, 1], got {kappa_frac}"),
            });
        }
        if !(period.is_finite() && period > 0.0 && box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidInput {
                what: "period/box_length",
                details: format!("must be finite and > 0, got {period}, {box_length}"),
            });
        }
        let kappa = 2.0 * core::f64::consts::PI * kappa_frac / period;
        // Turns of phase around the unit circle; box_length/period is a
        // period count, so for band-edge κ this is exactly an integer or
        // half-integer.
        let turns = kappa_frac * (box_length / period);
        let reduced = turns - fm::floor(turns);
        let phase = if reduced == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if reduced == 0.5 {
            Complex64::new(-1.0, 0.0)
        } else {
            let angle = 2.0 * core::f64::consts::PI * reduced;
            Complex64::new(fm::cos(angle), fm::sin(angle))
        };
        Ok(Self {
            kappa,
            phase,
            kappa_frac,
        })
    }

    /// Wave vector κ (1/bohr).
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Boundary phase `e^{iκL}`; unit modulus by construction.
    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    /// Reduced wave vector `κc/2π`.
    pub fn kappa_frac(&self) -> f64 {
        self.kappa_frac
    }
}

/// Hermitian tridiagonal-plus-corner matrix for Bloch boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicHamiltonian {
    diag: Vec<f64>,
    off: f64,
    corner: Complex64,
    grid: GridSpec,
    bloch: BlochSpec,
}

impl PeriodicHamiltonian {
    /// Diagonal entries `1/h² + Vᵢ` (hartree).
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// The constant off-diagonal entry `-1/(2h²)`.
    pub fn off(&self) -> f64 {
        self.off
    }

    /// Corner entry at row 1, column N: `-e^{-iκL}/(2h²)`. The entry at
    /// `(N, 1)` is its conjugate.
    pub fn corner(&self) -> Complex64 {
        self.corner
    }

    /// Grid the matrix was assembled on.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Bloch data of this κ sample.
    pub fn bloch(&self) -> &BlochSpec {
        &self.bloch
    }

    /// Matrix dimension `N`.
    pub fn n(&self) -> usize {
        self.diag.len()
    }
}

/// Real symmetric tridiagonal matrix for hard-wall boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletHamiltonian {
    diag: Vec<f64>,
    off: f64,
    grid: GridSpec,
}

impl DirichletHamiltonian {
    /// Diagonal entries `1/h² + Vᵢ` (hartree).
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// The constant off-diagonal entry `-1/(2h²)`.
    pub fn off(&self) -> f64 {
        self.off
    }

    /// Grid the matrix was assembled on.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Matrix dimension `N`.
    pub fn n(&self) -> usize {
        self.diag.len()
    }
}

fn build_diag(pot: &SampledPotential) -> Result<(Vec<f64>, f64)> {
    let h = pot.grid().step();
    let kin = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(pot.len());
    for &v in pot.values() {
        let d = kin + v;
        if !d.is_finite() {
            return Err(Error::NonFinite {
                what: "Hamiltonian diagonal",
            });
        }
        diag.push(d);
    }
    Ok((diag, -0.5 * kin))
}

/// Assembles the Bloch-periodic Hamiltonian for one κ sample.
///
/// Requires at least 3 lattice points so the corner entries do not collide
/// with the tridiagonal band.
pub fn assemble_bloch(pot: &SampledPotential, bloch: BlochSpec) -> Result<PeriodicHamiltonian> {
    if pot.len() < 3 {
        return Err(Error::InvalidInput {
            what: "n_points",
            details: format!("Bloch assembly needs N >= 3, got {}", pot.len()),
        });
    }
    let (diag, off) = build_diag(pot)?;
    let corner = bloch.phase().conj() * off;
    Ok(PeriodicHamiltonian {
        diag,
        off,
        corner,
        grid: *pot.grid(),
        bloch,
    })
}

/// Assembles the hard-wall Hamiltonian (no corner entries).
pub fn assemble_dirichlet(pot: &SampledPotential) -> Result<DirichletHamiltonian> {
    let (diag, off) = build_diag(pot)?;
    Ok(DirichletHamiltonian {
        diag,
        off,
        grid: *pot.grid(),
    })
}
