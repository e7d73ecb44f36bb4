//! Numerical kernels for the structured eigensolver.
//!
//! Everything here works on the "bordered tridiagonal" form shared by both
//! Hamiltonians: real diagonal `d`, constant real off-diagonal `o`, and an
//! optional complex corner `γ` at `(0, n-1)` with `conj(γ)` at `(n-1, 0)`.
//!
//! * [`bordered_matvec`] — O(n) matrix-vector product;
//! * [`TriLU`] — LU factorization of a real tridiagonal matrix with partial
//!   pivoting (one extra superdiagonal of fill), LAPACK `gttrf`-style;
//! * [`ShiftedSolver`] — solves `(A - σ)z = x` for the bordered matrix via
//!   the tridiagonal factorization plus a rank-2 Sherman-Morrison-Woodbury
//!   corner correction;
//! * [`symtri_eigen`] — implicit-shift QL eigensolver for the small real
//!   symmetric tridiagonal matrices produced by the Lanczos recurrence.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fm;
use crate::Complex64;

/// y = A·x for the bordered tridiagonal matrix.
pub(crate) fn bordered_matvec(
    diag: &[f64],
    off: f64,
    corner: Complex64,
    x: &[Complex64],
    y: &mut [Complex64],
) {
    let n = diag.len();
    debug_assert_eq!(x.len(), n);
    debug_assert_eq!(y.len(), n);
    for i in 0..n {
        y[i] = x[i] * diag[i];
    }
    for i in 0..n.saturating_sub(1) {
        y[i] += x[i + 1] * off;
        y[i + 1] += x[i] * off;
    }
    if corner != Complex64::new(0.0, 0.0) && n >= 3 {
        y[0] += corner * x[n - 1];
        y[n - 1] += corner.conj() * x[0];
    }
}

/// ⟨a, b⟩ with conjugation on the first argument.
pub(crate) fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// Euclidean norm.
pub(crate) fn cnorm(a: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for x in a {
        acc += x.norm_sqr();
    }
    fm::sqrt(acc)
}

/// a -= s·b
pub(crate) fn caxpy_neg(a: &mut [Complex64], s: Complex64, b: &[Complex64]) {
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x -= s * *y;
    }
}

/// LU factors of a real tridiagonal matrix with partial pivoting.
///
/// Pivoting between adjacent rows introduces a second superdiagonal; the
/// multipliers are bounded by 1 in magnitude, so the factorization is
/// backward stable for any real tridiagonal matrix, indefinite included.
pub(crate) struct TriLU {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLU {
    /// Factors the matrix with subdiagonal `sub`, diagonal `diag`,
    /// superdiagonal `sup` (lengths n-1, n, n-1).
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if fm::abs(d[i]) >= fm::abs(dl[i]) {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = 0.0;
                }
                if i + 2 < n {
                    du2[i] = 0.0;
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let d_next = d[i + 1];
                let u_here = du[i];
                du[i] = d_next;
                d[i + 1] = u_here - fact * d_next;
                if i + 2 < n {
                    let u_next = du[i + 1];
                    du2[i] = u_next;
                    du[i + 1] = -fact * u_next;
                }
                swapped[i] = true;
            }
        }
        TriLU {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    /// Solves T·x = b in place for a real right-hand side.
    pub fn solve_real(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            let t = self.dl[i] * x[i];
            x[i + 1] -= t;
        }
        if n == 0 {
            return;
        }
        x[n - 1] /= self.d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
    }

    /// Solves T·x = b in place for a complex right-hand side (the factors
    /// are real, so real and imaginary parts decouple).
    pub fn solve_complex(&self, x: &mut [Complex64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            let t = x[i] * self.dl[i];
            x[i + 1] -= t;
        }
        if n == 0 {
            return;
        }
        x[n - 1] /= self.d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - x[n - 1] * self.du[n - 2]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - x[i + 1] * self.du[i] - x[i + 2] * self.du2[i]) / self.d[i];
        }
    }
}

/// Factored form of `(A - σI)` for the bordered tridiagonal matrix `A`,
/// ready for repeated solves inside the shift-invert Lanczos iteration.
///
/// The corner pair is a rank-2 update `U·Vᵀ` of the tridiagonal part `T`,
/// handled by the Woodbury identity with a 2x2 capacitance matrix. The two
/// correction vectors `T⁻¹e₀` and `T⁻¹e_{n-1}` are real and cached.
pub(crate) struct ShiftedSolver {
    lu: TriLU,
    corner: Complex64,
    w1: Vec<f64>,
    w2: Vec<f64>,
    cap: [Complex64; 4],
    cap_det: Complex64,
    n: usize,
}

impl ShiftedSolver {
    /// Builds the solver; returns `None` when the shifted tridiagonal part
    /// or the capacitance matrix is numerically singular (the caller then
    /// retries with a nudged shift).
    pub fn build(diag: &[f64], off: f64, corner: Complex64, sigma: f64) -> Option<Self> {
        let n = diag.len();
        let shifted: Vec<f64> = diag.iter().map(|&d| d - sigma).collect();
        let band = vec![off; n.saturating_sub(1)];
        let lu = TriLU::factor(&band, &shifted, &band);
        if lu.d.iter().any(|&p| p == 0.0 || !p.is_finite()) {
            return None;
        }
        let zero = Complex64::new(0.0, 0.0);
        let (w1, w2, cap, cap_det) = if corner == zero || n < 3 {
            (Vec::new(), Vec::new(), [zero; 4], Complex64::new(1.0, 0.0))
        } else {
            let mut w1 = vec![0.0; n];
            w1[0] = 1.0;
            lu.solve_real(&mut w1);
            let mut w2 = vec![0.0; n];
            w2[n - 1] = 1.0;
            lu.solve_real(&mut w2);
            if w1.iter().chain(w2.iter()).any(|v| !v.is_finite()) {
                return None;
            }
            let one = Complex64::new(1.0, 0.0);
            let m00 = one + corner * w1[n - 1];
            let m01 = corner.conj() * w2[n - 1];
            let m10 = corner * w1[0];
            let m11 = one + corner.conj() * w2[0];
            let det = m00 * m11 - m01 * m10;
            let magnitude = m00.norm() * m11.norm() + m01.norm() * m10.norm();
            if !det.is_finite() || det.norm() <= 1e-14 * (magnitude + 1.0) {
                return None;
            }
            (w1, w2, [m00, m01, m10, m11], det)
        };
        Some(ShiftedSolver {
            lu,
            corner,
            w1,
            w2,
            cap,
            cap_det,
            n,
        })
    }

    /// z = (A - σ)⁻¹ x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = x.to_vec();
        self.lu.solve_complex(&mut y);
        if self.corner == Complex64::new(0.0, 0.0) || self.n < 3 {
            return y;
        }
        let n = self.n;
        let r0 = y[n - 1];
        let r1 = y[0];
        let [m00, m01, m10, m11] = self.cap;
        let z0 = (m11 * r0 - m01 * r1) / self.cap_det;
        let z1 = (m00 * r1 - m10 * r0) / self.cap_det;
        let g = self.corner;
        let gc = g.conj();
        for i in 0..n {
            y[i] -= g * z0 * self.w1[i] + gc * z1 * self.w2[i];
        }
        y
    }

    /// One probe solve checked against the residual; weeds out factorizations
    /// that went through a near-zero pivot.
    pub fn healthy(&self, diag: &[f64], off: f64, sigma: f64) -> bool {
        let n = self.n;
        let x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.25, 0.0))
            .collect();
        let z = self.apply(&x);
        if z.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let shifted: Vec<f64> = diag.iter().map(|&d| d - sigma).collect();
        let mut back = vec![Complex64::new(0.0, 0.0); n];
        bordered_matvec(&shifted, off, self.corner, &z, &mut back);
        let mut err = 0.0;
        for i in 0..n {
            err += (back[i] - x[i]).norm_sqr();
        }
        let scale = shifted.iter().fold(0.0f64, |m, &d| m.max(fm::abs(d)))
            + 2.0 * fm::abs(off)
            + 1.0;
        fm::sqrt(err) <= 1e-8 * scale * (cnorm(&z) + cnorm(&x))
    }
}

/// Eigen-decomposition of a small real symmetric tridiagonal matrix.
pub(crate) struct SymTriEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// `vectors[j]` is the eigenvector of `values[j]` (present on request).
    pub vectors: Option<Vec<Vec<f64>>>,
    /// Last component of each eigenvector (always tracked; it feeds the
    /// Lanczos convergence bound β·|s_m|).
    pub last_row: Vec<f64>,
}

/// Implicit-shift QL iteration (`tqli`) on the tridiagonal matrix with
/// diagonal `d` and off-diagonal `e` (`e.len() == d.len() - 1`).
pub(crate) fn symtri_eigen(d_in: &[f64], e_in: &[f64], want_vectors: bool) -> Result<SymTriEigen> {
    let n = d_in.len();
    assert!(n >= 1 && e_in.len() + 1 == n);
    let mut d = d_in.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(e_in);

    // Rotation targets: either the full eigenvector matrix (row-major) or
    // just its last row.
    let mut z_full = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Some(z)
    } else {
        None
    };
    let mut z_last = vec![0.0; n];
    z_last[n - 1] = 1.0;

    let rotate = |i: usize, s: f64, c: f64, z_full: &mut Option<Vec<f64>>, z_last: &mut [f64]| {
        if let Some(z) = z_full.as_mut() {
            for k in 0..n {
                let f = z[k * n + i + 1];
                let g = z[k * n + i];
                z[k * n + i + 1] = s * g + c * f;
                z[k * n + i] = c * g - s * f;
            }
        }
        let f = z_last[i + 1];
        let g = z_last[i];
        z_last[i + 1] = s * g + c * f;
        z_last[i] = c * g - s * f;
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = fm::abs(d[m]) + fm::abs(d[m + 1]);
                if fm::abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::NonConvergence {
                    details: String::from("QL iteration stalled on the projected tridiagonal"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = fm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + fm::copysign(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = fm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
                rotate(i, s, c, &mut z_full, &mut z_last);
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, carrying vectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(core::cmp::Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let last_row: Vec<f64> = order.iter().map(|&j| z_last[j]).collect();
    let vectors = z_full.map(|z| {
        order
            .iter()
            .map(|&j| (0..n).map(|k| z[k * n + j]).collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    });
    Ok(SymTriEigen {
        values,
        vectors,
        last_row,
    })
}

/// Eigen-decomposition of a tiny dense Hermitian matrix (row-major) by
/// cyclic complex Jacobi rotations. Used to split degenerate eigenspaces
/// along a commuting observable; sizes are the degeneracy multiplicities
/// (almost always 2).
pub(crate) fn hermitian_eigen_small(
    a: &[Vec<Complex64>],
) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut vecs: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    for _ in 0..100 {
        let mut off = 0.0;
        let mut scale = 0.0f64;
        for p in 0..n {
            scale = scale.max(fm::abs(m[p][p].re));
            for q in p + 1..n {
                off += m[p][q].norm_sqr();
            }
        }
        if fm::sqrt(off) <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let alpha = m[p][q];
                let r = alpha.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = alpha / r;
                let theta = (m[q][q].re - m[p][p].re) / (2.0 * r);
                let t = if theta >= 0.0 {
                    -1.0 / (theta + fm::sqrt(theta * theta + 1.0))
                } else {
                    1.0 / (-theta + fm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / fm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = mkp * c + mkq * s * phase.conj();
                    m[k][q] = mkq * c - mkp * s * phase;
                    let vkp = vecs[k][p];
                    let vkq = vecs[k][q];
                    vecs[k][p] = vkp * c + vkq * s * phase.conj();
                    vecs[k][q] = vkq * c - vkp * s * phase;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = mpk * c + mqk * s * phase;
                    m[q][k] = mqk * c - mpk * s * phase.conj();
                }
                let sym = (m[p][q] + m[q][p].conj()) * 0.5;
                m[p][q] = sym;
                m[q][p] = sym.conj();
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i][i]
            .re
            .partial_cmp(&m[j][j].re)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[i][i].re).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| vecs[k][j]).collect())
        .collect();
    (values, vectors)
}

/// Deterministic pseudo-random stream for Lanczos start vectors.
pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [-0.5, 0.5).
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / 9_007_199_254_740_992.0) - 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_residual(
        sub: &[f64],
        diag: &[f64],
        sup: &[f64],
        x: &[f64],
        b: &[f64],
    ) -> f64 {
        let n = diag.len();
        let mut r = 0.0f64;
        for i in 0..n {
            let mut acc = diag[i] * x[i];
            if i > 0 {
                acc += sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += sup[i] * x[i + 1];
            }
            r += (acc - b[i]) * (acc - b[i]);
        }
        r.sqrt()
    }

    #[test]
    fn tri_lu_solves_random_indefinite_systems() {
        let mut rng = SplitMix64::new(42);
        for n in [1usize, 2, 3, 5, 17, 64] {
            for _ in 0..20 {
                let sub: Vec<f64> = (0..n - 1.min(n)).map(|_| rng.next_f64() * 4.0).collect();
                let sub = if n > 1 { sub } else { Vec::new() };
                let diag: Vec<f64> = (0..n).map(|_| rng.next_f64() * 2.0).collect();
                let sup: Vec<f64> = (0..n.saturating_sub(1))
                    .map(|_| rng.next_f64() * 4.0)
                    .collect();
                let b: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
                let lu = TriLU::factor(&sub, &diag, &sup);
                let mut x = b.clone();
                lu.solve_real(&mut x);
                if x.iter().all(|v| v.is_finite()) {
                    let scale: f64 = diag.iter().map(|v| v.abs()).fold(0.0, f64::max) + 8.0;
                    let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(
                        dense_residual(&sub, &diag, &sup, &x, &b) <= 1e-10 * scale * (xn + 1.0),
                        "residual too large at n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn shifted_solver_matches_matvec_inverse() {
        let mut rng = SplitMix64::new(7);
        for n in [3usize, 4, 9, 33] {
            for trial in 0..12 {
                let diag: Vec<f64> = (0..n).map(|_| 2.0 + rng.next_f64()).collect();
                let off = -1.3;
                let corner = Complex64::new(rng.next_f64(), rng.next_f64()) * 1.3;
                let sigma = if trial % 3 == 0 { -1.0 } else { rng.next_f64() * 6.0 };
                let solver = match ShiftedSolver::build(&diag, off, corner, sigma) {
                    Some(s) => s,
                    None => continue,
                };
                let x: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.next_f64(), rng.next_f64()))
                    .collect();
                let z = solver.apply(&x);
                let shifted: Vec<f64> = diag.iter().map(|&d| d - sigma).collect();
                let mut back = vec![Complex64::new(0.0, 0.0); n];
                bordered_matvec(&shifted, off, corner, &z, &mut back);
                let mut err = 0.0;
                for i in 0..n {
                    err += (back[i] - x[i]).norm_sqr();
                }
                let zn = cnorm(&z);
                assert!(
                    err.sqrt() <= 1e-9 * 10.0 * (zn + 1.0),
                    "SMW solve residual {} too large (n={n}, sigma={sigma})",
                    err.sqrt()
                );
            }
        }
    }

    #[test]
    fn symtri_eigen_matches_closed_form() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2cos(k pi/(n+1)).
        let n = 12;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let out = symtri_eigen(&d, &e, true).unwrap();
        for (k, &v) in out.values.iter().enumerate() {
            let exact =
                2.0 - 2.0 * ((k + 1) as f64 * core::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-12, "eig {k}: {v} vs {exact}");
        }
        // Eigenvectors: residual check T v = lambda v.
        let vecs = out.vectors.unwrap();
        for (k, v) in vecs.iter().enumerate() {
            for i in 0..n {
                let mut acc = d[i] * v[i];
                if i > 0 {
                    acc += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += e[i] * v[i + 1];
                }
                assert!((acc - out.values[k] * v[i]).abs() < 1e-10);
            }
            assert!((out.last_row[k] - v[n - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn symtri_eigen_handles_degenerate_blocks() {
        // Two decoupled 2x2 blocks with identical spectra.
        let d = vec![1.0, 1.0, 1.0, 1.0];
        let e = vec![0.5, 0.0, 0.5];
        let out = symtri_eigen(&d, &e, false).unwrap();
        assert!((out.values[0] - 0.5).abs() < 1e-14);
        assert!((out.values[1] - 0.5).abs() < 1e-14);
        assert!((out.values[2] - 1.5).abs() < 1e-14);
        assert!((out.values[3] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eigen_small_2x2() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2.
        let a = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0)],
        ];
        let (vals, vecs) = hermitian_eigen_small(&a);
        assert!((vals[0] - 0.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        // Residual A v = lambda v.
        for (k, v) in vecs.iter().enumerate() {
            for i in 0..2 {
                let av = a[i][0] * v[0] + a[i][1] * v[1];
                assert!((av - v[i] * vals[k]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(99);
        let mut b = SplitMix64::new(99);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
