//! Numeric Uhlmann connection from finite differences of √ρ, and the
//! Berry-connection matrices used by the zero-temperature comparisons.

use super::HolonomyError;
use crate::linops::{C64, ComplexMatrix};
use crate::models::{ModelFamily, ParameterLoop, StateAt};

/// Eigenvalues closer than this are treated as exactly degenerate and their
/// connection coefficient is zeroed; the exact coefficient vanishes smoothly
/// there, so this only suppresses noise amplification.
const DEGENERACY_TOL: f64 = 1e-12;

/// Uhlmann connection contracted with the loop velocity at `t`, assembled
/// from `A_nm = −⟨n|[d√ρ/dt, √ρ]|m⟩/(λ_n + λ_m)` with a central-difference
/// derivative. √ρ is basis-independent, so no gauge alignment is needed.
pub fn numeric_uhlmann_connection(
    model: &ModelFamily,
    lp: &ParameterLoop,
    t: f64,
    h: f64,
) -> Result<ComplexMatrix, HolonomyError> {
    if !(1e-7..=1e-2).contains(&h) {
        return Err(HolonomyError::InvalidStep { h });
    }
    let rho = match model.density_at(lp, t)? {
        StateAt::Density(d) => d,
        StateAt::Grassmann(_) => {
            return Err(HolonomyError::Unsupported { model: "fermion" })
        }
    };
    let min_eig = rho.min_eigenvalue();
    if min_eig <= 0.0 {
        return Err(HolonomyError::RankDeficient { min_eig });
    }

    let s_plus = model.sqrt_density_at(lp, t + h)?;
    let s_minus = model.sqrt_density_at(lp, t - h)?;
    let delta = s_plus.sub(&s_minus);
    let delta_norm = delta.max_norm();
    if delta_norm != 0.0 && delta_norm < 1e3 * f64::EPSILON {
        return Err(HolonomyError::StepTooSmall { delta: delta_norm });
    }
    let sdot = delta.scale(C64::new(0.5 / h, 0.0));
    let s = rho.sqrt_matrix();
    let comm = sdot.mul(&s).sub(&s.mul(&sdot)); // [d√ρ/dt, √ρ]

    let v = rho.spectrum().eigenvectors();
    let lambda = rho.spectrum().eigenvalues();
    let tilde = v.adjoint().mul(&comm).mul(v);
    let dim = tilde.dim();
    let mut scaled = ComplexMatrix::zeros(dim);
    for n in 0..dim {
        for m in 0..dim {
            if (lambda[n] - lambda[m]).abs() <= DEGENERACY_TOL {
                continue;
            }
            let denom = lambda[n] + lambda[m];
            if denom <= 0.0 {
                continue;
            }
            scaled[(n, m)] = -tilde[(n, m)] / denom;
        }
    }
    Ok(v.mul(&scaled).mul(&v.adjoint()))
}

/// Gauge-aligned finite-difference derivative of the eigenvector frame:
/// returns `(V(t), M)` with `M = V†·dV/dt` and each displaced column phased
/// to overlap positively with the central one.
fn frame_derivative(
    model: &ModelFamily,
    lp: &ParameterLoop,
    t: f64,
    h: f64,
) -> Result<(ComplexMatrix, ComplexMatrix), HolonomyError> {
    let dim = model.dim();
    let mut v = ComplexMatrix::zeros(dim);
    let mut vdot = ComplexMatrix::zeros(dim);
    for level in 0..dim {
        let center = model.level_eigvec(lp, t, level)?;
        let plus = align(&center, model.level_eigvec(lp, t + h, level)?);
        let minus = align(&center, model.level_eigvec(lp, t - h, level)?);
        let col: Vec<C64> =
            plus.iter().zip(&minus).map(|(p, m)| (p - m) / C64::new(2.0 * h, 0.0)).collect();
        v.set_column(level, &center);
        vdot.set_column(level, &col);
    }
    let m = v.adjoint().mul(&vdot);
    Ok((v, m))
}

fn align(reference: &[C64], mut sample: Vec<C64>) -> Vec<C64> {
    let mut overlap = C64::new(0.0, 0.0);
    for (r, s) in reference.iter().zip(&sample) {
        overlap += r.conj() * s;
    }
    let n = overlap.norm();
    if n > 0.0 {
        let phase = overlap.conj() / n;
        for z in sample.iter_mut() {
            *z *= phase;
        }
    }
    sample
}

/// `−Σ_{n≠m} |n⟩⟨n|d/dt|m⟩⟨m|`: the zero-temperature limit of the Uhlmann
/// connection, built from gauge-aligned finite-difference eigenvectors.
pub fn berry_connection_offdiag(
    model: &ModelFamily,
    lp: &ParameterLoop,
    t: f64,
    h: f64,
) -> Result<ComplexMatrix, HolonomyError> {
    let (v, mut m) = frame_derivative(model, lp, t, h)?;
    for i in 0..m.dim() {
        m[(i, i)] = C64::new(0.0, 0.0);
    }
    Ok(v.mul(&m).mul(&v.adjoint()).scale(C64::new(-1.0, 0.0)))
}

/// Berry connection matrix `Σ_n ⟨n|d/dt|n⟩ |n⟩⟨n|` in the model's transport
/// gauge.
pub fn berry_connection_matrix(
    model: &ModelFamily,
    lp: &ParameterLoop,
    t: f64,
    h: f64,
) -> Result<ComplexMatrix, HolonomyError> {
    let (v, m) = frame_derivative(model, lp, t, h)?;
    let diag: Vec<C64> = (0..m.dim()).map(|i| m[(i, i)]).collect();
    let dim = v.dim();
    let mut out = ComplexMatrix::zeros(dim);
    for n in 0..dim {
        let col = v.column(n);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += diag[n] * col[i] * col[j].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ConnectionAt;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn infinite_temperature_connection_is_zero() {
        let model = ModelFamily::spin(2, 1.0, 1e-9);
        let lp = ParameterLoop::equator(1, 64);
        let a = numeric_uhlmann_connection(&model, &lp, 0.3, 1e-4).unwrap();
        assert!(a.max_norm() < 1e-9);
    }

    #[test]
    fn one_dim_connection_vanishes_exactly() {
        let model = ModelFamily::one_dim();
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.5, 1, 64);
        let a = numeric_uhlmann_connection(&model, &lp, 0.4, 1e-4).unwrap();
        assert_eq!(a.max_norm(), 0.0);
    }

    #[test]
    fn numeric_matches_analytic_for_boson() {
        let model = ModelFamily::boson(1.0, 2.0, 24);
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.5, 1, 64);
        let t = 0.3;
        let numeric = numeric_uhlmann_connection(&model, &lp, t, 1e-4).unwrap();
        let analytic = match model.analytic_uhlmann_connection(&lp, t).unwrap() {
            ConnectionAt::Matrix(m) => m,
            _ => unreachable!(),
        };
        assert!(
            numeric.sub(&analytic).max_norm() < 5e-4,
            "difference {:.3e}",
            numeric.sub(&analytic).max_norm()
        );
        assert!(numeric.anti_hermiticity_defect() < 1e-8 + 1e-4);
    }

    #[test]
    fn numeric_matches_analytic_for_spin_equator() {
        let model = ModelFamily::spin(2, 1.0, 1.0);
        let lp = ParameterLoop::equator(1, 64);
        let t = 0.22;
        let numeric = numeric_uhlmann_connection(&model, &lp, t, 1e-4).unwrap();
        let analytic = match model.analytic_uhlmann_connection(&lp, t).unwrap() {
            ConnectionAt::Matrix(m) => m,
            _ => unreachable!(),
        };
        assert!(numeric.sub(&analytic).max_norm() < 2e-4);
    }

    #[test]
    fn numeric_matches_analytic_for_spin_latitude() {
        let model = ModelFamily::spin(2, 1.0, 1.7);
        let lp = ParameterLoop::latitude(PI / 3.0, 1, 64).unwrap();
        for &t in &[0.1, 0.55] {
            let numeric = numeric_uhlmann_connection(&model, &lp, t, 1e-4).unwrap();
            let analytic = match model.analytic_uhlmann_connection(&lp, t).unwrap() {
                ConnectionAt::Matrix(m) => m,
                _ => unreachable!(),
            };
            assert!(numeric.sub(&analytic).max_norm() < 2e-4);
        }
    }

    #[test]
    fn zero_temperature_limit_is_projected_berry_connection() {
        // At β = 40 the coefficient (√λn−√λm)²/(λn+λm) is 1 to ~1e-9, so the
        // numeric connection collapses onto −Σ_{n≠m}|n⟩⟨n|dm⟩⟨m|.
        let model = ModelFamily::spin(2, 1.0, 40.0);
        let lp = ParameterLoop::equator(1, 64);
        for &t in &[0.05, 0.4, 0.81] {
            let a = numeric_uhlmann_connection(&model, &lp, t, 1e-4).unwrap();
            let b = berry_connection_offdiag(&model, &lp, t, 1e-4).unwrap();
            assert!(
                a.sub(&b).max_norm() < 1e-3,
                "zero-T mismatch {:.3e} at t = {t}",
                a.sub(&b).max_norm()
            );
        }
    }

    #[test]
    fn step_bounds_are_enforced() {
        let model = ModelFamily::spin(2, 1.0, 1.0);
        let lp = ParameterLoop::equator(1, 64);
        assert!(matches!(
            numeric_uhlmann_connection(&model, &lp, 0.1, 1e-8),
            Err(HolonomyError::InvalidStep { .. })
        ));
        assert!(matches!(
            numeric_uhlmann_connection(&model, &lp, 0.1, 0.5),
            Err(HolonomyError::InvalidStep { .. })
        ));
    }
}
