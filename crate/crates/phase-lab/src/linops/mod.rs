//! Dense complex matrix kernel: Hermitian eigendecomposition, PSD square
//! root, matrix exponential, traces and Hilbert-Schmidt inner products.
//!
//! Everything operates on small square matrices (dimension ≲ 100) stored
//! row-major, which is the regime of every model in this crate. All values
//! are immutable after construction and safe to share across threads.

mod eig;
mod expm;
mod matrix;
mod polar;

pub use eig::{hermitian_eig, SpectralDecomposition};
pub use expm::{expm, expm_mul};
pub use matrix::ComplexMatrix;
pub(crate) use polar::unitary_polar_factor;

use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

#[derive(Debug, Error)]
pub enum LinopsError {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NonHermitian { defect: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigNotConverged { sweeps: usize },
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
///
/// Conjugate-symmetric: `hs_inner(a, b) = conj(hs_inner(b, a))`, and
/// `hs_inner(w, w)` is real and nonnegative.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64, LinopsError> {
    if a.dim() != b.dim() {
        return Err(LinopsError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data().iter()) {
        acc += x.conj() * y;
    }
    Ok(acc)
}

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-12, 0)` are clamped to zero; anything below that
/// yields [`LinopsError::NotPsd`].
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix, LinopsError> {
    let spec = hermitian_eig(h)?;
    let min_eig = spec.eigenvalues()[0];
    if min_eig < -1e-12 {
        return Err(LinopsError::NotPsd { min_eig });
    }
    let roots: Vec<f64> = spec.eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(spec.eigenvectors().conjugate_diag(&roots))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hs_inner_of_trace_one_sqrt_is_one() {
        // W = sqrt(rho) with Tr rho = 1 gives <W, W> = Tr rho = 1.
        let rho = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        let w = sqrt_psd(&rho).unwrap();
        let ip = hs_inner(&w, &w).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-14);
        assert!(ip.im.abs() < 1e-15);
    }

    #[test]
    fn hs_inner_against_identity_is_trace() {
        let a = ComplexMatrix::from_rows(&[
            &[c(1.0, 2.0), c(0.5, 0.0)],
            &[c(0.0, -1.0), c(3.0, -4.0)],
        ]);
        let eye = ComplexMatrix::identity(2);
        let ip = hs_inner(&eye, &a).unwrap();
        let tr = a.trace();
        assert!((ip - tr).norm() < 1e-15);
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric() {
        let a = ComplexMatrix::from_rows(&[&[c(1.0, 1.0), c(2.0, -0.5)], &[c(0.0, 3.0), c(-1.0, 0.25)]]);
        let b = ComplexMatrix::from_rows(&[&[c(0.5, -2.0), c(1.5, 0.5)], &[c(2.0, 0.0), c(0.0, -1.0)]]);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let h = ComplexMatrix::from_real_diag(&[4.0, 9.0]);
        let s = sqrt_psd(&h).unwrap();
        let want = ComplexMatrix::from_real_diag(&[2.0, 3.0]);
        assert!(s.sub(&want).max_norm() < 1e-14);
    }

    #[test]
    fn sqrt_of_identity_is_identity() {
        let eye = ComplexMatrix::identity(5);
        let s = sqrt_psd(&eye).unwrap();
        assert!(s.sub(&eye).max_norm() < 1e-13);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let h = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(sqrt_psd(&h), Err(LinopsError::NotPsd { .. })));
    }

    #[test]
    fn sqrt_is_idempotent_consistent() {
        // sqrt(S^2) = S for PSD S.
        let spec_base = ComplexMatrix::from_rows(&[
            &[c(2.0, 0.0), c(0.3, 0.4)],
            &[c(0.3, -0.4), c(1.0, 0.0)],
        ]);
        let s = sqrt_psd(&spec_base).unwrap();
        let s2 = s.mul(&s);
        let again = sqrt_psd(&s2).unwrap();
        assert!(again.sub(&s).max_norm() < 1e-9);
    }
}
