//! Analytic dispersion relation and transcendental band-edge solver.
//!
//! Matching the piecewise cell solution across one period under the Bloch
//! condition collapses to a single real equation `F(E) = cos(κc)`. For the
//! rectangular barrier (well width `a`, barrier width `b`, height `V₀`):
//!
//! ```text
//! F(E) = (V₀-2E)/(2√E√(V₀-E)) · sinh(√(2(V₀-E))·b) · sin(√(2E)·a)
//!        + cosh(√(2(V₀-E))·b) · cos(√(2E)·a)            (E < V₀)
//! ```
//!
//! with `sinh → sin`, `cosh → cos` above the barrier. Both branches (and
//! the `E → V₀`, `E → 0` limits) are evaluated here through one analytic
//! continuation: with `g(z) = sinh(√z)/√z` and `G(z) = cosh(√z)` extended
//! by their power series through `z = 0`,
//!
//! ```text
//! F(E) = (V₀-2E)·a·b · g(2(V₀-E)b²) · g(-2E·a²) + G(2(V₀-E)b²) · G(-2E·a²)
//! ```
//!
//! which is finite and smooth across the branch point, so no case split or
//! 0/0 can occur. The Dirac comb is the `b → 0`, `V₀b → α` limit:
//! `F(E) = α·c·g(-2E·c²) + G(-2E·c²)`.
//!
//! Energies with `|F(E)| ≤ 1` form the allowed bands. `F` crosses zero
//! exactly once inside every band and nowhere else, so the edge finder
//! first brackets those sign changes, then resolves the two edges between
//! consecutive zeros around the intervening `|F| ≥ 1` lobe. Within a band
//! `F` is strictly monotone, which is what certifies root uniqueness when
//! solving `F(E) = cos(κc)` by bisection.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fm;
use crate::potentials::{DiracCombParams, KronigPenneyParams, Potential};

/// Absolute bisection tolerance for band edges and dispersion roots
/// (hartree).
pub const ROOT_ATOL: f64 = 1e-12;

/// Series switch-over for the analytic continuations: |z| below this uses
/// the truncated power series (the direct formulas lose digits to 0/0).
const SERIES_Z: f64 = 1e-6;

/// Interior samples used to certify monotonicity inside a band.
const MONOTONE_SAMPLES: usize = 33;

/// `sinh(√z)/√z`, continued through `z = 0` (equals `sin(√-z)/√-z` for
/// negative `z`).
fn sinhc(z: f64) -> f64 {
    if fm::abs(z) < SERIES_Z {
        1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0
    } else if z > 0.0 {
        let s = fm::sqrt(z);
        fm::sinh(s) / s
    } else {
        let s = fm::sqrt(-z);
        fm::sin(s) / s
    }
}

/// `cosh(√z)`, continued through `z = 0` (equals `cos(√-z)` for negative `z`).
fn coshc(z: f64) -> f64 {
    if fm::abs(z) < SERIES_Z {
        1.0 + z / 2.0 + z * z / 24.0 + z * z * z / 720.0
    } else if z > 0.0 {
        fm::cosh(fm::sqrt(z))
    } else {
        fm::cos(fm::sqrt(-z))
    }
}

/// Plane-wave / evanescent wave numbers at energy `E` for barrier height
/// `v0`: `k₁ = √(2E)` everywhere, `k₂ = √(2(V₀-E))` only below the barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumbers {
    /// Propagating wave number `√(2E)` (1/bohr).
    pub k1: f64,
    /// Decay constant `√(2(V₀-E))` (1/bohr); `None` above the barrier where
    /// the cell solution oscillates instead of decaying.
    pub k2: Option<f64>,
}

impl WaveNumbers {
    /// Requires `E > 0`.
    pub fn for_energy(e: f64, v0: f64) -> Result<Self> {
        if e <= 0.0 || !e.is_finite() {
            return Err(Error::OutOfDomain {
                what: "energy",
                value: e,
            });
        }
        let k1 = fm::sqrt(2.0 * e);
        let k2 = if e <= v0 {
            Some(fm::sqrt(2.0 * (v0 - e)))
        } else {
            None
        };
        Ok(WaveNumbers { k1, k2 })
    }
}

/// Dispersion function for the rectangular-barrier potential, `E > 0`.
pub fn kp_dispersion(e: f64, p: &KronigPenneyParams) -> Result<f64> {
    if e <= 0.0 || !e.is_finite() {
        return Err(Error::OutOfDomain {
            what: "energy",
            value: e,
        });
    }
    let (v0, a, b) = (p.v0(), p.a(), p.b());
    let zb = 2.0 * (v0 - e) * b * b;
    let za = -2.0 * e * a * a;
    Ok((v0 - 2.0 * e) * a * b * sinhc(zb) * sinhc(za) + coshc(zb) * coshc(za))
}

/// Dispersion function for the Dirac comb, `E > 0`:
/// `α·sin(√(2E)c)/√(2E) + cos(√(2E)c)`.
pub fn comb_dispersion(e: f64, p: &DiracCombParams) -> Result<f64> {
    if e <= 0.0 || !e.is_finite() {
        return Err(Error::OutOfDomain {
            what: "energy",
            value: e,
        });
    }
    let z = -2.0 * e * p.period() * p.period();
    Ok(p.alpha() * p.period() * sinhc(z) + coshc(z))
}

/// Dispersion function of either potential.
pub fn dispersion(pot: &Potential, e: f64) -> Result<f64> {
    match pot {
        Potential::KronigPenney(p) => kp_dispersion(e, p),
        Potential::DiracComb(p) => comb_dispersion(e, p),
    }
}

/// One band's energy interval `|F(E)| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdge {
    /// 1-based band index.
    pub band: usize,
    /// Lower edge (hartree).
    pub e_min: f64,
    /// Upper edge (hartree).
    pub e_max: f64,
}

impl BandEdge {
    /// Band width `e_max - e_min` (hartree).
    pub fn width(&self) -> f64 {
        self.e_max - self.e_min
    }
}

/// Ascending band-edge table.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEdges {
    edges: Vec<BandEdge>,
}

impl BandEdges {
    /// Builds a table from precomputed edges (ascending band index
    /// expected); used by the finite-difference edge extractor as well.
    pub(crate) fn from_edges(edges: Vec<BandEdge>) -> Self {
        BandEdges { edges }
    }

    /// Edge of the 1-based `band`, if present.
    pub fn get(&self, band: usize) -> Option<&BandEdge> {
        self.edges.get(band.checked_sub(1)?)
    }

    /// All edges, ascending.
    pub fn edges(&self) -> &[BandEdge] {
        &self.edges
    }

    /// Number of bands in the table.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// True when the table is empty.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Bisection of `f` on a bracket with a sign change; returns the endpoint
/// on the `keep_negative` side (so edge results land *inside* the band,
/// where `|F| ≤ 1` holds exactly).
fn bisect_to<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, keep_lo: bool) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= ROOT_ATOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_mid >= 0.0) == (f_lo >= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if keep_lo {
        lo
    } else {
        hi
    }
}

/// Plain bisection returning the midpoint.
fn bisect_mid<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= ROOT_ATOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_mid >= 0.0) == (f_lo >= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan resolution for the zero search: fine enough that no band at
/// textbook parameter scales slips between consecutive samples.
fn scan_step(pot: &Potential) -> f64 {
    let c = pot.period();
    let free_scale = core::f64::consts::PI * core::f64::consts::PI / (2.0 * c * c);
    let strength = pot.strength_scale();
    let scale = if strength > 0.0 {
        free_scale.min(strength)
    } else {
        free_scale
    };
    scale / 200.0
}

/// Finds the energy intervals of the lowest `n_bands` allowed bands by
/// scanning `F` for its zeros (one per band) and bisecting the `F = ±1`
/// crossings between consecutive zeros. Edges are certified to lie inside
/// the band: `|F(edge)| ≤ 1` holds exactly for every returned value.
pub fn band_edges(pot: &Potential, n_bands: usize) -> Result<BandEdges> {
    if n_bands == 0 {
        return Err(Error::InvalidInput {
            what: "n_bands",
            details: format!("need at least one band, got {n_bands}"),
        });
    }
    let f = |e: f64| dispersion(pot, e).unwrap_or(f64::NAN);
    let de = scan_step(pot);
    let c = pot.period();
    let free_scale = core::f64::consts::PI * core::f64::consts::PI / (2.0 * c * c);
    let e_start = 1e-12 * free_scale;
    let ceiling = 8.0 * ((n_bands + 3) * (n_bands + 3)) as f64 * free_scale
        + 10.0 * pot.strength_scale()
        + 10.0;

    // Zeros of F: simple sign changes, exactly one inside each band.
    let needed = n_bands + 1;
    let mut zeros: Vec<f64> = Vec::with_capacity(needed);
    let mut e_prev = e_start;
    let mut f_prev = f(e_prev);
    if !f_prev.is_finite() {
        return Err(Error::NonFinite {
            what: "dispersion function",
        });
    }
    while zeros.len() < needed && e_prev < ceiling {
        let e_next = e_prev + de;
        let f_next = f(e_next);
        if f_prev == 0.0 {
            zeros.push(e_prev);
        } else if f_prev * f_next < 0.0 {
            zeros.push(bisect_mid(f, e_prev, e_next));
        }
        e_prev = e_next;
        f_prev = f_next;
    }
    if zeros.len() < needed {
        return Err(Error::ScanCeiling {
            found: zeros.len().saturating_sub(1),
            requested: n_bands,
        });
    }

    // Left edge of band 1: F decreases from its E -> 0 limit through +1.
    // For a free particle F(0+) = 1 and the scan start is already inside
    // the band.
    let mut prev_min = if f(e_start) <= 1.0 {
        e_start
    } else {
        bisect_to(|e| f(e) - 1.0, e_start, zeros[0], false)
    };

    let mut edges = Vec::with_capacity(n_bands);
    for band in 1..=n_bands {
        // Between the zero of band n and the zero of band n+1, s*F rises
        // from 0 through +1 (right edge), tops a lobe with s*F >= 1, and
        // falls back through +1 (next band's left edge); s alternates so
        // the shared lobe is always positive. A degenerate lobe peak at
        // exactly 1 is a touching pair of bands (zero gap).
        let s = if band % 2 == 1 { -1.0 } else { 1.0 };
        let g = |e: f64| s * f(e);
        let (zl, zr) = (zeros[band - 1], zeros[band]);

        // Coarse scan for the lobe peak, then golden-section refinement.
        let coarse = 64;
        let mut best_i = 1;
        let mut best_v = f64::NEG_INFINITY;
        for i in 1..coarse {
            let e = zl + (zr - zl) * (i as f64) / (coarse as f64);
            let v = g(e);
            if v > best_v {
                best_v = v;
                best_i = i;
            }
        }
        let mut lo = zl + (zr - zl) * ((best_i - 1) as f64) / (coarse as f64);
        let mut hi = zl + (zr - zl) * ((best_i + 1) as f64) / (coarse as f64);
        let inv_phi = 0.618_033_988_749_894_9;
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut g1 = g(x1);
        let mut g2 = g(x2);
        while hi - lo > ROOT_ATOL {
            if g1 < g2 {
                lo = x1;
                x1 = x2;
                g1 = g2;
                x2 = lo + inv_phi * (hi - lo);
                g2 = g(x2);
            } else {
                hi = x2;
                x2 = x1;
                g2 = g1;
                x1 = hi - inv_phi * (hi - lo);
                g1 = g(x1);
            }
        }
        let e_peak = 0.5 * (lo + hi);
        let g_peak = g(e_peak);

        let (e_max, next_min) = if g_peak <= 1.0 + 1e-10 {
            // Touching bands: both edges collapse onto the tangency point.
            // Rounding can leave the located peak a hair outside |F| <= 1;
            // walk it back toward the zero (downhill) if so.
            let mut t = e_peak;
            let mut step = (zr - zl) * 1e-13;
            for _ in 0..64 {
                if g(t) <= 1.0 {
                    break;
                }
                t -= step;
                step *= 2.0;
            }
            (t, t)
        } else {
            (
                bisect_to(|e| g(e) - 1.0, zl, e_peak, true),
                bisect_to(|e| 1.0 - g(e), e_peak, zr, false),
            )
        };
        edges.push(BandEdge {
            band,
            e_min: prev_min,
            e_max,
        });
        prev_min = next_min;
    }
    Ok(BandEdges::from_edges(edges))
}

/// Solves `F(E) = cos(2π·kappa_frac)` inside the given band by bisection.
///
/// Uniqueness of the root is certified by sampling `F` across the band and
/// checking strict monotonicity in the direction dictated by the band's
/// parity; a violation is reported as a diagnostic error, never hidden.
/// Band-edge targets (`cos = ±1`) return the corresponding edge, so
/// `|F| ≤ 1` holds exactly on every output.
pub fn solve_band_energy(
    pot: &Potential,
    edges: &BandEdges,
    band: usize,
    kappa_frac: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa_frac) {
        return Err(Error::InvalidInput {
            what: "kappa_frac",
            details: format!("must lie in [0, 1], got {kappa_frac}"),
        });
    }
    let edge = edges.get(band).ok_or(Error::BandOutOfRange {
        band,
        available: edges.len(),
    })?;
    // Left edge value alternates: band 1 runs +1 -> -1, band 2 runs
    // -1 -> +1, and so on.
    let left_sign = if band % 2 == 1 { 1.0 } else { -1.0 };

    let target = if kappa_frac == 0.0 || kappa_frac == 1.0 {
        1.0
    } else if kappa_frac == 0.5 {
        -1.0
    } else {
        fm::cos(2.0 * core::f64::consts::PI * kappa_frac)
    };

    // Degenerate (touching) bands carry zero width; any target maps to the
    // single shared energy.
    if edge.width() <= ROOT_ATOL {
        return Ok(edge.e_min);
    }

    // Certify strict monotonicity on a uniform interior sample.
    let f = |e: f64| dispersion(pot, e).unwrap_or(f64::NAN);
    let mut prev = f(edge.e_min);
    for i in 1..MONOTONE_SAMPLES {
        let e = edge.e_min + edge.width() * (i as f64) / ((MONOTONE_SAMPLES - 1) as f64);
        let cur = f(e);
        if !cur.is_finite() || (cur - prev) * left_sign >= 0.0 {
            return Err(Error::MonotonicityViolation { band });
        }
        prev = cur;
    }

    if target >= 1.0 - 1e-12 {
        return Ok(if left_sign > 0.0 { edge.e_min } else { edge.e_max });
    }
    if target <= -1.0 + 1e-12 {
        return Ok(if left_sign > 0.0 { edge.e_max } else { edge.e_min });
    }
    Ok(bisect_mid(
        |e| (f(e) - target) * left_sign,
        edge.e_min,
        edge.e_max,
    ))
}
