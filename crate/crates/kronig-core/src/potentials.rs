//! Periodic potential definitions and their sampling on a uniform grid.
//!
//! Units are Hartree atomic units throughout: energies in hartree, lengths
//! in bohr. The simulation box holds `n_periods` copies of the unit cell of
//! length `c`; the box is discretized into `N` lattice points at
//! `x_i = i·h`, `i = 1..N`, with `h = L/N`. The point `x = 0` is identified
//! with `x = L` through the Bloch phase, so `x = L` is a genuine lattice
//! site and `x = 0` is not stored.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fm;

/// Relative tolerance for the box-length / period commensurability check.
const COMMENSURATE_RTOL: f64 = 1e-12;

/// Rectangular-barrier (Kronig-Penney) potential parameters.
///
/// The unit cell of length `c = a + b` holds a barrier of height `v0` and
/// width `b` followed by a well of width `a`:
/// `V(x) = v0` for `0 < x ≤ b`, `V(x) = 0` for `b < x ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KronigPenneyParams {
    v0: f64,
    a: f64,
    b: f64,
}

impl KronigPenneyParams {
    /// Validates `v0 ≥ 0` finite, `a > 0`, `b ≥ 0`.
    pub fn new(v0: f64, a: f64, b: f64) -> Result<Self> {
        if !v0.is_finite() || v0 < 0.0 {
            return Err(Error::InvalidInput {
                what: "v0",
                details: format!("barrier height must be finite and >= 0, got {v0}"),
            });
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidInput {
                what: "a",
                details: format!("well width must be finite and > 0, got {a}"),
            });
        }
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidInput {
                what: "b",
                details: format!("barrier width must be finite and >= 0, got {b}"),
            });
        }
        Ok(Self { v0, a, b })
    }

    /// Barrier height (hartree).
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// Well width (bohr).
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Barrier width (bohr).
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Lattice period `c = a + b` (bohr).
    pub fn period(&self) -> f64 {
        self.a + self.b
    }
}

/// Dirac comb parameters: periodic delta barriers `α·Σ_j δ(x − j·c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracCombParams {
    alpha: f64,
    c: f64,
}

impl DiracCombParams {
    /// Validates `alpha ≥ 0` finite and `c > 0`.
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidInput {
                what: "alpha",
                details: format!("delta strength must be finite and >= 0, got {alpha}"),
            });
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidInput {
                what: "c",
                details: format!("lattice distance must be finite and > 0, got {c}"),
            });
        }
        Ok(Self { alpha, c })
    }

    /// Delta strength (hartree·bohr).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lattice distance (bohr).
    pub fn period(&self) -> f64 {
        self.c
    }
}

/// Either supported potential, tagged with its parameters.
///
/// This is also the dispersion-function handle for the analytic route: see
/// [`crate::analytic::dispersion`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    KronigPenney(KronigPenneyParams),
    DiracComb(DiracCombParams),
}

impl Potential {
    /// Lattice period `c` (bohr).
    pub fn period(&self) -> f64 {
        match self {
            Potential::KronigPenney(p) => p.period(),
            Potential::DiracComb(p) => p.period(),
        }
    }

    /// Characteristic energy scale of the potential strength, used to pick
    /// scan resolutions: `v0` for the rectangular barrier, `α/c` for the
    /// comb. Zero for a free particle.
    pub fn strength_scale(&self) -> f64 {
        match self {
            Potential::KronigPenney(p) => p.v0(),
            Potential::DiracComb(p) => p.alpha() / p.period(),
        }
    }

    /// Samples the potential on `grid`. See [`sample_kp`] and [`sample_comb`].
    pub fn sample(&self, grid: &GridSpec) -> Result<SampledPotential> {
        match self {
            Potential::KronigPenney(p) => sample_kp(p, grid),
            Potential::DiracComb(p) => sample_comb(p, grid),
        }
    }
}

/// Uniform discretization of the simulation box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_points: usize,
    box_length: f64,
    n_periods: usize,
}

impl GridSpec {
    /// A grid of `n_points` lattice sites spanning `box_length`, containing
    /// `n_periods` identical cells. `n_points` must divide evenly into the
    /// periods so every cell is sampled identically.
    ///
    /// `n_points ≥ 1` is accepted here so small Dirichlet matrices can be
    /// built; the Bloch assembly enforces its own `N ≥ 3` minimum.
    pub fn new(n_points: usize, box_length: f64, n_periods: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidInput {
                what: "n_points",
                details: format!("need at least 1 lattice point, got {n_points}"),
            });
        }
        if !box_length.is_finite() || box_length <= 0.0 {
            return Err(Error::InvalidInput {
                what: "box_length",
                details: format!("must be finite and > 0, got {box_length}"),
            });
        }
        if n_periods == 0 {
            return Err(Error::InvalidInput {
                what: "n_periods",
                details: format!("need at least 1 period, got {n_periods}"),
            });
        }
        if !n_points.is_multiple_of(n_periods) {
            return Err(Error::InvalidInput {
                what: "n_points",
                details: format!(
                    "{n_points} points cannot be split evenly over {n_periods} periods"
                ),
            });
        }
        Ok(Self {
            n_points,
            box_length,
            n_periods,
        })
    }

    /// Convenience constructor: `points_per_period` sites per cell of
    /// length `period`, repeated `n_periods` times.
    pub fn per_period(points_per_period: usize, period: f64, n_periods: usize) -> Result<Self> {
        let n_points = points_per_period.checked_mul(n_periods).ok_or_else(|| {
            Error::InvalidInput {
                what: "n_points",
                details: format!("{points_per_period} x {n_periods} overflows"),
            }
        })?;
        Self::new(n_points, period * n_periods as f64, n_periods)
    }

    /// Total number of lattice points `N`.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Box length `L` (bohr).
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Grid step `h = L/N` (bohr).
    pub fn step(&self) -> f64 {
        self.box_length / self.n_points as f64
    }

    /// Number of potential periods in the box.
    pub fn n_periods(&self) -> usize {
        self.n_periods
    }

    /// Lattice points per period.
    pub fn points_per_period(&self) -> usize {
        self.n_points / self.n_periods
    }

    /// Coordinate of the `i`-th stored point (0-based index): `x = (i+1)·h`.
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.step()
    }

    /// Checks that the box spans a whole number of periods of length `c`.
    fn check_commensurate(&self, c: f64) -> Result<()> {
        let expected = c * self.n_periods as f64;
        if fm::abs(self.box_length - expected) > COMMENSURATE_RTOL * fm::abs(expected).max(1.0) {
            return Err(Error::GridMismatch {
                box_length: self.box_length,
                expected,
            });
        }
        Ok(())
    }
}

/// A potential sampled on a grid: `values[i] = V(x_i)` with `x_i = (i+1)·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    values: Vec<f64>,
    grid: GridSpec,
}

impl SampledPotential {
    /// Wraps raw values; rejects a length mismatch or non-finite entries.
    pub fn from_values(values: Vec<f64>, grid: GridSpec) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidInput {
                what: "values",
                details: format!(
                    "expected {} samples, got {}",
                    grid.n_points(),
                    values.len()
                ),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "potential samples",
            });
        }
        Ok(Self { values, grid })
    }

    /// Sampled values `V(x_i)` (hartree).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The grid the samples live on.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True if the grid is empty (cannot happen through the constructors).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same potential with the sampling origin shifted by `shift` whole
    /// grid steps (cyclic rotation of the value array). Spectra are
    /// invariant under this operation.
    pub fn cycled(&self, shift: usize) -> Self {
        let n = self.values.len();
        let s = shift % n;
        let mut values = Vec::with_capacity(n);
        values.extend_from_slice(&self.values[s..]);
        values.extend_from_slice(&self.values[..s]);
        Self {
            values,
            grid: self.grid,
        }
    }
}

/// Samples the Kronig-Penney potential.
///
/// Each period cell is laid out barrier-first: the first `⌊b/h⌋` lattice
/// points of the cell carry `v0`. When the barrier edge `b` falls between
/// lattice points, the next point carries the area-weighted remainder
/// `v0·frac(b/h)`, so the integrated barrier strength `h·Σᵢ Vᵢ = v0·b` is
/// exact per period and eigenvalues converge at the full O(h²) rate of the
/// central-difference stencil. (Snapping that cell to `0` or `v0` instead
/// leaves an O(h) sawtooth in the effective barrier width that dominates
/// grid-refinement studies.)
pub fn sample_kp(params: &KronigPenneyParams, grid: &GridSpec) -> Result<SampledPotential> {
    grid.check_commensurate(params.period())?;
    let m = grid.points_per_period();
    let h = grid.step();
    let ratio = params.b() / h;
    if ratio > m as f64 + 1e-9 {
        return Err(Error::InvalidInput {
            what: "b",
            details: format!("barrier width {} exceeds the period", params.b()),
        });
    }
    // Integer/fractional split of the barrier width in grid cells. The 1e-9
    // pad keeps an exactly-on-grid edge (like b/h = 2.0) in the integer part.
    let n_full = fm::floor(ratio + 1e-9) as usize;
    let frac = ratio - n_full as f64;

    let mut cell = Vec::with_capacity(m);
    for j in 0..m {
        let v = if j < n_full {
            params.v0()
        } else if j == n_full && frac > 1e-9 {
            params.v0() * frac
        } else {
            0.0
        };
        cell.push(v);
    }
    let mut values = Vec::with_capacity(grid.n_points());
    for _ in 0..grid.n_periods() {
        values.extend_from_slice(&cell);
    }
    SampledPotential::from_values(values, *grid)
}

/// Samples the Dirac comb.
///
/// The delta at each cell origin is represented by its first lattice point
/// carrying `V = α/h`, the narrowest barrier the grid can hold (width one
/// grid cell), so `h·Σᵢ Vᵢ = α` per period exactly.
pub fn sample_comb(params: &DiracCombParams, grid: &GridSpec) -> Result<SampledPotential> {
    grid.check_commensurate(params.period())?;
    let m = grid.points_per_period();
    let h = grid.step();
    let spike = params.alpha() / h;
    if !spike.is_finite() {
        return Err(Error::NonFinite {
            what: "comb spike alpha/h",
        });
    }
    let mut values = Vec::with_capacity(grid.n_points());
    for _ in 0..grid.n_periods() {
        values.push(spike);
        values.extend(core::iter::repeat_n(0.0, m - 1));
    }
    SampledPotential::from_values(values, *grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kp_params_validate() {
        assert!(KronigPenneyParams::new(0.5, 10.0, 2.0).is_ok());
        assert!(KronigPenneyParams::new(-0.1, 10.0, 2.0).is_err());
        assert!(KronigPenneyParams::new(0.5, 0.0, 2.0).is_err());
        assert!(KronigPenneyParams::new(0.5, 10.0, -1.0).is_err());
        assert!(KronigPenneyParams::new(f64::NAN, 10.0, 2.0).is_err());
        let p = KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap();
        assert_eq!(p.period(), 12.0);
    }

    #[test]
    fn comb_params_validate() {
        assert!(DiracCombParams::new(1.0, 12.0).is_ok());
        assert!(DiracCombParams::new(-1.0, 12.0).is_err());
        assert!(DiracCombParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn grid_divisibility_enforced() {
        assert!(GridSpec::new(10, 12.0, 3).is_err());
        assert!(GridSpec::new(12, 12.0, 3).is_ok());
        assert!(GridSpec::new(0, 12.0, 1).is_err());
        let g = GridSpec::per_period(10000, 12.0, 1).unwrap();
        assert_eq!(g.step(), 12.0 / 10000.0);
        assert_eq!(g.x(0), g.step());
    }

    #[test]
    fn kp_sample_n12_single_period() {
        // v0=0.5, a=10, b=2, N=12: the first two points (x = 1, 2) carry the
        // barrier, everything else including x = 12 is well.
        let p = KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap();
        let g = GridSpec::new(12, 12.0, 1).unwrap();
        let s = sample_kp(&p, &g).unwrap();
        let expect = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(s.values(), &expect);
    }

    #[test]
    fn kp_sample_zero_height_is_zero() {
        let p = KronigPenneyParams::new(0.0, 7.0, 3.0).unwrap();
        let g = GridSpec::new(40, 10.0, 1).unwrap();
        let s = sample_kp(&p, &g).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kp_sample_n10000_count_and_weight() {
        // b/h = 1666.67: 1666 full-height samples plus one fractional one;
        // the integrated strength equals v0*b exactly.
        let p = KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap();
        let g = GridSpec::new(10000, 12.0, 1).unwrap();
        let s = sample_kp(&p, &g).unwrap();
        let full = s.values().iter().filter(|&&v| v == 0.5).count();
        assert_eq!(full, 1666);
        // Brute-force count of i*h in [0, 2): same 1666 points.
        let h = g.step();
        let brute = (1..=10000).filter(|&i| (i as f64) * h < 2.0).count();
        assert_eq!(brute, 1666);
        let integral: f64 = s.values().iter().sum::<f64>() * h;
        assert!((integral - 0.5 * 2.0).abs() < 1e-12);
        // Width accounting: h * (count of full-height points) within h of b.
        assert!((h * full as f64 - 2.0).abs() <= h);
    }

    #[test]
    fn kp_sample_periodic_across_periods() {
        let p = KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap();
        let g = GridSpec::per_period(60, 12.0, 3).unwrap();
        let s = sample_kp(&p, &g).unwrap();
        let m = g.points_per_period();
        for i in 0..s.len() {
            assert_eq!(s.values()[i], s.values()[i % m]);
        }
    }

    #[test]
    fn kp_rejects_incommensurate_grid() {
        let p = KronigPenneyParams::new(0.5, 10.0, 2.0).unwrap();
        let g = GridSpec::new(100, 13.0, 1).unwrap();
        assert!(matches!(
            sample_kp(&p, &g),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn comb_sample_n12() {
        // alpha=1, c=12, N=12: h=1, one point with V = 1, eleven zeros.
        let p = DiracCombParams::new(1.0, 12.0).unwrap();
        let g = GridSpec::new(12, 12.0, 1).unwrap();
        let s = sample_comb(&p, &g).unwrap();
        assert_eq!(s.values()[0], 1.0);
        assert!(s.values()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn comb_sample_zero_strength() {
        let p = DiracCombParams::new(0.0, 12.0).unwrap();
        let g = GridSpec::new(24, 12.0, 1).unwrap();
        let s = sample_comb(&p, &g).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn comb_sample_n10000_sum_rule() {
        let p = DiracCombParams::new(1.0, 12.0).unwrap();
        let g = GridSpec::new(10000, 12.0, 1).unwrap();
        let s = sample_comb(&p, &g).unwrap();
        let h = g.step();
        assert!((s.values()[0] - 10000.0 / 12.0).abs() < 1e-9);
        let total: f64 = s.values().iter().sum::<f64>() * h;
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn comb_sum_rule_multi_period() {
        let p = DiracCombParams::new(0.7, 5.0).unwrap();
        let g = GridSpec::per_period(250, 5.0, 4).unwrap();
        let s = sample_comb(&p, &g).unwrap();
        let total: f64 = s.values().iter().sum::<f64>() * g.step();
        assert!((total - 4.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn cycled_rotates_values() {
        let p = DiracCombParams::new(1.0, 12.0).unwrap();
        let g = GridSpec::new(12, 12.0, 1).unwrap();
        let s = sample_comb(&p, &g).unwrap();
        let r = s.cycled(3);
        assert_eq!(r.values()[9], s.values()[0]);
        assert_eq!(s.cycled(12).values(), s.values());
    }
}
