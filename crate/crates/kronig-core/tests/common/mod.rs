//! Shared test oracles: brute-force dense diagonalization, independent of
//! the library's structured solver.
#![allow(dead_code)] // each integration-test binary uses a subset

use kronig_core::Complex64;

/// Dense Hermitian matrix from the structured (diag, off, corner) triple.
pub fn dense_from_parts(diag: &[f64], off: f64, corner: Complex64) -> Vec<Vec<Complex64>> {
    let n = diag.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        m[i][i] = Complex64::new(diag[i], 0.0);
    }
    for i in 0..n.saturating_sub(1) {
        m[i][i + 1] = Complex64::new(off, 0.0);
        m[i + 1][i] = Complex64::new(off, 0.0);
    }
    if n >= 3 && corner != Complex64::new(0.0, 0.0) {
        m[0][n - 1] += corner;
        m[n - 1][0] += corner.conj();
    }
    m
}

/// Eigenvalues of a dense Hermitian matrix by cyclic complex Jacobi
/// rotations, ascending. O(n^3) per sweep; intended for n <= 64.
pub fn dense_hermitian_eigenvalues(a: &[Vec<Complex64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    for _sweep in 0..200 {
        let mut off_norm = 0.0;
        let mut diag_scale = 0.0f64;
        for p in 0..n {
            diag_scale = diag_scale.max(m[p][p].re.abs());
            for q in p + 1..n {
                off_norm += m[p][q].norm_sqr();
            }
        }
        if off_norm.sqrt() <= 1e-14 * diag_scale.max(1e-300) {
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
                let app = m[p][p].re;
                let aqq = m[q][q].re;
                let theta = (aqq - app) / (2.0 * r);
                // Small root of r t^2 + (app - aqq) t - r = 0 for this
                // rotation convention.
                let t = if theta >= 0.0 {
                    -1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Columns: B = M U with U = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = mkp * c + mkq * s * phase.conj();
                    m[k][q] = mkq * c - mkp * s * phase;
                }
                // Rows: M' = U^H B
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = mpk * c + mqk * s * phase;
                    m[q][k] = mqk * c - mpk * s * phase.conj();
                }
                // Clean up rounding on the eliminated pair.
                let sym = (m[p][q] + m[q][p].conj()) * 0.5;
                m[p][q] = sym;
                m[q][p] = sym.conj();
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| m[i][i].re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Eigenvalues of a dense real symmetric matrix by classical Jacobi
/// rotations, ascending. A genuinely real code path, used to check the
/// complex solver at Bloch phases of exactly +-1.
pub fn dense_real_symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..200 {
        let mut off_norm = 0.0;
        let mut diag_scale = 0.0f64;
        for p in 0..n {
            diag_scale = diag_scale.max(m[p][p].abs());
            for q in p + 1..n {
                off_norm += m[p][q] * m[p][q];
            }
        }
        if off_norm.sqrt() <= 1e-14 * diag_scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    -1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp + s * mkq;
                    m[k][q] = c * mkq - s * mkp;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk + s * mqk;
                    m[q][k] = c * mqk - s * mpk;
                }
                let sym = 0.5 * (m[p][q] + m[q][p]);
                m[p][q] = sym;
                m[q][p] = sym;
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Deterministic xorshift-style stream for reproducible "random" tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0);
        lo + (hi - lo) * u
    }
}
