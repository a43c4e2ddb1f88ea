//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is the right tool at these sizes: quadratically convergent, no
//! external dependencies, and it delivers eigenvalues of positive definite
//! matrices with high relative accuracy, which keeps the thermal tails of
//! density-matrix spectra clean.

use super::{C64, ComplexMatrix, LinopsError};

/// Result of [`hermitian_eig`]: eigenvalues ascending, eigenvector columns
/// orthonormal, column `k` paired with eigenvalue `k`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub(crate) fn new_unchecked(eigenvalues: Vec<f64>, eigenvectors: ComplexMatrix) -> Self {
        debug_assert_eq!(eigenvalues.len(), eigenvectors.dim());
        Self { eigenvalues, eigenvectors }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// Rebuild `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.eigenvectors.conjugate_diag(&self.eigenvalues)
    }

    /// `V diag(f(λ)) V†` for a real function of the eigenvalues.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.eigenvectors.conjugate_diag(&mapped)
    }

    /// `V diag(g(λ)) V†` for a complex function of the eigenvalues.
    pub fn map_eigenvalues_complex(&self, g: impl Fn(f64) -> C64) -> ComplexMatrix {
        let mapped: Vec<C64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.eigenvectors.conjugate_cdiag(&mapped)
    }
}

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian within `1e-10` in max-norm. Eigenvalues come
/// out ascending; each eigenvector is gauge-fixed by making its
/// largest-magnitude component real and positive (ties broken by lowest
/// index), so repeated runs are bit-reproducible.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<SpectralDecomposition, LinopsError> {
    h.check_finite()?;
    let defect = h.hermiticity_defect();
    let scale = h.max_norm().max(1.0);
    if defect > 1e-10 * scale.max(1.0) {
        return Err(LinopsError::NonHermitian { defect });
    }

    let n = h.dim();
    let mut a = h.clone();
    // Symmetrize exactly so rotations see a true Hermitian matrix.
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    if n > 1 {
        let fro = a.fro_norm().max(f64::MIN_POSITIVE);
        let tol = 1e-15 * fro;
        let mut converged = false;
        for sweep in 0..MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= tol {
                converged = true;
                break;
            }
            // Threshold strategy: skip entries already far below the sweep scale.
            let skip = off * 1e-9 / (n as f64);
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let m = apq.norm();
                    if m <= skip || m == 0.0 {
                        continue;
                    }
                    rotate(&mut a, &mut v, p, q, apq, m);
                }
            }
            let _ = sweep;
        }
        if !converged {
            // One final check: the threshold loop may have finished the job
            // on the last sweep.
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off > 1e-12 * fro {
                return Err(LinopsError::EigNotConverged { sweeps: MAX_SWEEPS });
            }
        }
    }

    // Sort ascending, permute columns accordingly.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vecs = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        gauge_fix(&mut col);
        vecs.set_column(dst, &col);
    }

    Ok(SpectralDecomposition::new_unchecked(eigenvalues, vecs))
}

/// One complex Jacobi rotation annihilating `a[(p, q)]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, m: f64) {
    let n = a.dim();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let u = apq / m; // phase of the off-diagonal entry

    // Real rotation angle for the phase-stripped 2x2 block [[app, m], [m, aqq]].
    let tau = (aqq - app) / (2.0 * m);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let su = u * s;
    let su_conj = u.conj() * s;

    // Columns: A <- A G with G = [[c, s u], [-s conj(u), c]] on (p, q).
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c - aiq * su_conj;
        a[(i, q)] = aip * su + aiq * c;
    }
    // Rows: A <- G† A.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * su;
        a[(q, j)] = apj * su_conj + aqj * c;
    }
    // Clean the rotated pair exactly.
    let new_app = c * c * app - 2.0 * c * s * m + s * s * aqq;
    let new_aqq = s * s * app + 2.0 * c * s * m + c * c * aqq;
    a[(p, p)] = C64::new(new_app, 0.0);
    a[(q, q)] = C64::new(new_aqq, 0.0);
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);

    // Accumulate eigenvectors: V <- V G.
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * su_conj;
        v[(i, q)] = vip * su + viq * c;
    }
}

/// Make the largest-magnitude component real and positive; ties broken by
/// lowest index. Also renormalizes.
fn gauge_fix(col: &mut [C64]) {
    let mut best = 0;
    let mut best_norm: f64 = 0.0;
    for (i, z) in col.iter().enumerate() {
        let nz = z.norm();
        if nz > best_norm + 1e-15 * best_norm.max(1.0) {
            best = i;
            best_norm = nz;
        }
    }
    if best_norm == 0.0 {
        return;
    }
    let phase = col[best].conj() / best_norm;
    let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in col.iter_mut() {
        *z = *z * phase / norm;
    }
}
