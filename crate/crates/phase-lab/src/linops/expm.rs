//! Matrix exponential.
//!
//! (Anti-)Hermitian input takes the eigendecomposition path, which keeps the
//! exponential of an anti-Hermitian generator unitary to machine precision.
//! Everything else goes through scaling-and-squaring with a degree-6
//! diagonal Padé approximant.

use super::{C64, ComplexMatrix, LinopsError, hermitian_eig};

/// Matrix exponential `exp(A)`.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix, LinopsError> {
    a.check_finite()?;
    let scale = a.max_norm().max(1.0);
    if a.hermiticity_defect() <= 1e-12 * scale {
        // exp(H) = V e^λ V†
        let spec = hermitian_eig(a)?;
        return Ok(spec.map_eigenvalues(f64::exp));
    }
    if a.anti_hermiticity_defect() <= 1e-12 * scale {
        // A = -i H with H = iA Hermitian; exp(A) = V e^{-iλ} V†.
        let h = a.scale(C64::new(0.0, 1.0));
        let spec = hermitian_eig(&h)?;
        return Ok(spec.map_eigenvalues_complex(|l| C64::new(0.0, -l).exp()));
    }
    pade6(a)
}

/// `exp(s·A) · G` by a truncated Taylor recurrence, without forming the
/// exponential. Intended for the small-step factors of path-ordered
/// products; falls back to the full exponential when `‖s·A‖` is large.
pub fn expm_mul(a: &ComplexMatrix, s: f64, g: &ComplexMatrix) -> Result<ComplexMatrix, LinopsError> {
    let step_norm = a.one_norm() * s.abs();
    if step_norm > 0.9 {
        let full = expm(&a.scale(C64::new(s, 0.0)))?;
        return Ok(full.mul(g));
    }
    // Horner-style: out = sum_j (sA)^j / j! * G, evaluated as repeated
    // applications term_{j} = (s/j) A term_{j-1}.
    let mut out = g.clone();
    let mut term = g.clone();
    let one = C64::new(1.0, 0.0);
    for j in 1..=24 {
        term = a.mul(&term).scale(C64::new(s / j as f64, 0.0));
        out.add_scaled_assign(one, &term);
        let t = term.max_norm();
        if t <= 1e-17 * out.max_norm().max(1.0) {
            break;
        }
    }
    Ok(out)
}

/// Degree-6 diagonal Padé with scaling and squaring.
fn pade6(a: &ComplexMatrix) -> Result<ComplexMatrix, LinopsError> {
    let n = a.dim();
    let norm = a.one_norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.scale(C64::new(0.5f64.powi(s), 0.0));

    // c_k = (2m-k)! m! / ((2m)! k! (m-k)!) for m = 6.
    let m = 6usize;
    let fact = |k: usize| -> f64 { (1..=k).map(|x| x as f64).product::<f64>().max(1.0) };
    let coeff: Vec<f64> =
        (0..=m).map(|k| fact(2 * m - k) * fact(m) / (fact(2 * m) * fact(k) * fact(m - k))).collect();

    let eye = ComplexMatrix::identity(n);
    let mut powers = Vec::with_capacity(m + 1);
    powers.push(eye.clone());
    for k in 1..=m {
        let next = powers[k - 1].mul(&b);
        powers.push(next);
    }
    let mut num = ComplexMatrix::zeros(n);
    let mut den = ComplexMatrix::zeros(n);
    for k in 0..=m {
        let ck = C64::new(coeff[k], 0.0);
        num.add_scaled_assign(ck, &powers[k]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        den.add_scaled_assign(ck * sign, &powers[k]);
    }
    let mut x = solve(&den, &num)?;
    for _ in 0..s {
        x = x.mul(&x);
    }
    Ok(x)
}

/// Solve `A X = B` by LU with partial pivoting.
fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinopsError> {
    let n = a.dim();
    let mut lu: Vec<C64> = a.data().to_vec();
    let mut x: Vec<C64> = b.data().to_vec();
    let mut piv: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // Pivot.
        let mut pk = k;
        let mut pmax = lu[piv[k] * n + k].norm();
        for r in (k + 1)..n {
            let m = lu[piv[r] * n + k].norm();
            if m > pmax {
                pmax = m;
                pk = r;
            }
        }
        if pmax == 0.0 {
            return Err(LinopsError::NonFinite);
        }
        piv.swap(k, pk);
        let pivot = lu[piv[k] * n + k];
        for r in (k + 1)..n {
            let factor = lu[piv[r] * n + k] / pivot;
            lu[piv[r] * n + k] = factor;
            for c in (k + 1)..n {
                let sub = factor * lu[piv[k] * n + c];
                lu[piv[r] * n + c] -= sub;
            }
        }
    }
    // Forward/back substitution on all columns of B.
    let mut out = ComplexMatrix::zeros(n);
    for col in 0..n {
        let mut y = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = x[piv[i] * n + col];
            for j in 0..i {
                acc -= lu[piv[i] * n + j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= lu[piv[i] * n + j] * out[(j, col)];
            }
            out[(i, col)] = acc / lu[piv[i] * n + i];
        }
    }
    let _ = &mut x;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent oracle: plain Taylor series with many terms.
    fn expm_series(a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::identity(a.dim());
        let mut term = ComplexMatrix::identity(a.dim());
        for j in 1..80 {
            term = a.mul(&term).scale(c(1.0 / j as f64, 0.0));
            out.add_scaled_assign(c(1.0, 0.0), &term);
        }
        out
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(4);
        let e = expm(&z).unwrap();
        assert!(e.sub(&ComplexMatrix::identity(4)).max_norm() < 1e-15);
    }

    #[test]
    fn exp_of_scalar_diagonal() {
        // exp(iπ diag(1, -1)) = diag(-1, -1)
        let a = ComplexMatrix::from_diag(&[c(0.0, PI), c(0.0, -PI)]);
        let e = expm(&a).unwrap();
        let want = ComplexMatrix::from_real_diag(&[-1.0, -1.0]);
        assert!(e.sub(&want).max_norm() < 1e-13);
    }

    #[test]
    fn spin_one_rotation_center_element() {
        // exp(iθ J_y) for j = 1 at θ = π/2: the (m=0, m'=0) entry is cos θ = 0.
        // Oracle: series evaluation.
        let s = 1.0 / 2.0_f64.sqrt();
        let jy = ComplexMatrix::from_rows(&[
            &[c(0.0, 0.0), c(0.0, -s), c(0.0, 0.0)],
            &[c(0.0, s), c(0.0, 0.0), c(0.0, -s)],
            &[c(0.0, 0.0), c(0.0, s), c(0.0, 0.0)],
        ]);
        let theta = PI / 2.0;
        let a = jy.scale(c(0.0, theta));
        let e = expm(&a).unwrap();
        let oracle = expm_series(&a);
        assert!(e.sub(&oracle).max_norm() < 1e-13);
        assert!(e[(1, 1)].norm() < 1e-13);
    }

    #[test]
    fn general_matrix_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2usize, 4, 7] {
            let a = ComplexMatrix::from_fn(dim, |_, _| {
                c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6))
            });
            let e = expm(&a).unwrap();
            let oracle = expm_series(&a);
            assert!(
                e.sub(&oracle).max_norm() < 1e-11 * oracle.max_norm().max(1.0),
                "Padé path mismatch at dim {dim}"
            );
        }
    }

    #[test]
    fn anti_hermitian_exponential_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let dim = 6;
            let mut a = ComplexMatrix::zeros(dim);
            for i in 0..dim {
                a[(i, i)] = c(0.0, rng.gen_range(-0.3..0.3));
                for j in (i + 1)..dim {
                    let z = c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
                    a[(i, j)] = z;
                    a[(j, i)] = -z.conj();
                }
            }
            let e = expm(&a).unwrap();
            assert!(e.unitarity_defect() < 1e-12);
            // exp(A) exp(-A) = 1
            let inv = expm(&a.scale(c(-1.0, 0.0))).unwrap();
            let prod = e.mul(&inv);
            assert!(prod.sub(&ComplexMatrix::identity(dim)).max_norm() < 1e-11);
        }
    }

    #[test]
    fn expm_mul_matches_full_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let dim = 5;
        let mut a = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            a[(i, i)] = c(0.0, rng.gen_range(-1.0..1.0));
            for j in (i + 1)..dim {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(j, i)] = -z.conj();
            }
        }
        let g = ComplexMatrix::from_fn(dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for &s in &[-0.05, 0.02, 0.3, -2.5] {
            let fast = expm_mul(&a, s, &g).unwrap();
            let full = expm(&a.scale(c(s, 0.0))).unwrap().mul(&g);
            assert!(fast.sub(&full).max_norm() < 1e-12 * full.max_norm().max(1.0), "s = {s}");
        }
    }
}
