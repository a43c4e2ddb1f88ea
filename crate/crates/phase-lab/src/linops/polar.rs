//! Unitary polar factor of a (possibly severely ill-conditioned) matrix.
//!
//! The thermal square roots multiplied in the polar transport estimator have
//! singular values spanning hundreds of orders of magnitude, so the textbook
//! `M (M†M)^{-1/2}` formula would amplify floating-point noise in the
//! numerically null directions. Instead the well-resolved singular
//! directions are kept and the remainder is completed to an exactly unitary
//! matrix by Gram-Schmidt; the completed directions only ever multiply
//! weights at or below the noise floor.

use super::{C64, ComplexMatrix, LinopsError, hermitian_eig};

const RELATIVE_FLOOR: f64 = 1e-10;

/// Unitary factor `V` of `M = V P` with `P` Hermitian PSD.
pub(crate) fn unitary_polar_factor(m: &ComplexMatrix) -> Result<ComplexMatrix, LinopsError> {
    let n = m.dim();
    let h = m.adjoint().mul(m);
    let spec = hermitian_eig(&h)?;
    let sigma: Vec<f64> = spec.eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).collect();
    let sigma_max = sigma.last().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let floor = sigma_max * RELATIVE_FLOOR;

    // Left singular vectors for the resolved directions, largest σ first so
    // Gram-Schmidt renormalization perturbs the well-conditioned ones least.
    let mut cols: Vec<Option<Vec<C64>>> = vec![None; n];
    let mut accepted: Vec<usize> = Vec::with_capacity(n);
    for j in (0..n).rev() {
        if sigma[j] < floor {
            continue;
        }
        let w = spec.eigenvector(j);
        let mut u = m.apply(&w);
        let inv = 1.0 / sigma[j];
        for z in u.iter_mut() {
            *z *= inv;
        }
        orthogonalize(&mut u, &cols, &accepted);
        if normalize(&mut u) {
            cols[j] = Some(u);
            accepted.push(j);
        }
    }
    // Complete the basis deterministically from canonical vectors.
    if accepted.len() < n {
        for j in 0..n {
            if cols[j].is_some() {
                continue;
            }
            let mut filled = false;
            for basis in 0..n {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[basis] = C64::new(1.0, 0.0);
                orthogonalize(&mut e, &cols, &accepted);
                if normalize(&mut e) {
                    cols[j] = Some(e);
                    accepted.push(j);
                    filled = true;
                    break;
                }
            }
            if !filled {
                return Err(LinopsError::NonFinite);
            }
        }
    }

    let mut u_mat = ComplexMatrix::zeros(n);
    for j in 0..n {
        u_mat.set_column(j, cols[j].as_ref().unwrap());
    }
    Ok(u_mat.mul(&spec.eigenvectors().adjoint()))
}

fn orthogonalize(v: &mut [C64], cols: &[Option<Vec<C64>>], accepted: &[usize]) {
    // Two MGS passes keep orthogonality at machine precision.
    for _ in 0..2 {
        for &idx in accepted {
            let u = cols[idx].as_ref().unwrap();
            let mut overlap = C64::new(0.0, 0.0);
            for (a, b) in u.iter().zip(v.iter()) {
                overlap += a.conj() * *b;
            }
            for (a, b) in u.iter().zip(v.iter_mut()) {
                *b -= overlap * a;
            }
        }
    }
}

fn normalize(v: &mut [C64]) -> bool {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 0.1 {
        return false;
    }
    for z in v.iter_mut() {
        *z /= norm;
    }
    true
}
