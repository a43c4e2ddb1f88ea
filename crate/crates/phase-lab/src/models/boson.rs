//! Bosonic coherent states on a truncated Fock space.
//!
//! The thermal oscillator `ρ(0) = e^{-βω(a†a + 1/2)}/Z` is displaced along a
//! planar loop, `ρ(z) = D(z) ρ(0) D†(z)`. The partition function comes from
//! the exact geometric series, so the Boltzmann weights are unaffected by
//! truncation; truncation error is confined to the displaced operators and
//! certified by the occupancy margin and the tail bound.

use super::{DensityMatrix, ModelError, ParameterLoop, PhaseClosedForm, PhaseValue};
use crate::linops::{self, C64, ComplexMatrix, SpectralDecomposition};
use crate::util::principal_angle;
use std::sync::{Arc, OnceLock};

/// Spectral factors of the fixed quadrature generator `a† − a`, reused by
/// every displacement along a sweep.
#[derive(Debug)]
struct QuadratureCache {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct BosonModel {
    pub omega: f64,
    pub beta: f64,
    pub n_cut: usize,
    cache: Arc<OnceLock<QuadratureCache>>,
}

impl BosonModel {
    pub fn new(omega: f64, beta: f64, n_cut: usize) -> Self {
        assert!(omega > 0.0 && beta > 0.0, "boson model needs positive ω and β");
        assert!(n_cut >= 1);
        Self { omega, beta, n_cut, cache: Arc::new(OnceLock::new()) }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        // The quadrature cache is temperature-independent.
        Self { omega: self.omega, beta, n_cut: self.n_cut, cache: Arc::clone(&self.cache) }
    }

    pub fn dim(&self) -> usize {
        self.n_cut + 1
    }

    /// `η = sech(βω/2)`.
    pub fn eta(&self) -> f64 {
        1.0 / (self.beta * self.omega / 2.0).cosh()
    }

    /// `χ = 1 − sech(βω/2)`, the strength of the Uhlmann connection.
    pub fn chi(&self) -> f64 {
        1.0 - self.eta()
    }

    /// Boltzmann weights `λ_n = e^{-βω(n+1/2)}/Z` in Fock order with the
    /// exact partition function `Z = e^{-βω/2}/(1 − e^{-βω})`.
    pub fn fock_weights(&self) -> Vec<f64> {
        let x = self.beta * self.omega;
        let norm = -(-x).exp_m1(); // 1 − e^{-βω}, accurate for small βω
        (0..self.dim()).map(|n| (-x * n as f64).exp() * norm).collect()
    }

    /// True when the thermal weight beyond the truncation is negligible
    /// (`e^{-βω·N_cut} < 1e-14`). Phases remain accurate well beyond this
    /// bound because the tail enters through its own Boltzmann weight, but
    /// state-level invariants (unit trace, full rank) only hold under it.
    pub fn tail_certified(&self) -> bool {
        -self.beta * self.omega * (self.n_cut as f64) < -14.0 * std::f64::consts::LN_10
    }

    /// Occupancy margin needed by a planar loop.
    pub fn required_truncation(lp: &ParameterLoop) -> Option<usize> {
        let (center, radius) = lp.plane_extent()?;
        let c = center.norm();
        Some((c * c + 6.0 * radius * (c + radius) + 10.0).ceil() as usize)
    }

    pub fn check_truncation(&self, lp: &ParameterLoop) -> Result<(), ModelError> {
        if let Some(required) = Self::required_truncation(lp) {
            if self.n_cut < required {
                return Err(ModelError::TruncationTooSmall { required, actual: self.n_cut });
            }
        }
        Ok(())
    }

    fn quadrature(&self) -> Result<&QuadratureCache, ModelError> {
        if let Some(c) = self.cache.get() {
            return Ok(c);
        }
        // H = i(a† − a) is Hermitian; a† − a = V diag(−iλ) V†.
        let dim = self.dim();
        let mut h = ComplexMatrix::zeros(dim);
        for n in 0..dim - 1 {
            let s = ((n + 1) as f64).sqrt();
            h[(n + 1, n)] = C64::new(0.0, s); // i·a†
            h[(n, n + 1)] = C64::new(0.0, -s); // −i·a
        }
        let spec = linops::hermitian_eig(&h)?;
        let _ = self.cache.set(QuadratureCache {
            eigenvalues: spec.eigenvalues().to_vec(),
            eigenvectors: spec.eigenvectors().clone(),
        });
        Ok(self.cache.get().unwrap())
    }

    /// Displacement operator on the truncated Fock space.
    ///
    /// Uses `z a† − z̄ a = e^{iφN}(|z|(a† − a))e^{-iφN}` so a single
    /// eigendecomposition serves every point of a sweep.
    pub fn displacement(&self, z: C64) -> Result<ComplexMatrix, ModelError> {
        let dim = self.dim();
        let r = z.norm();
        if r == 0.0 {
            return Ok(ComplexMatrix::identity(dim));
        }
        let phi = z.arg();
        let q = self.quadrature()?;
        // core = exp(r (a† − a)) = V e^{-i r λ} V†
        let phases: Vec<C64> =
            q.eigenvalues.iter().map(|&l| C64::new(0.0, -r * l).exp()).collect();
        let core = q.eigenvectors.conjugate_cdiag(&phases);
        // conjugate by the number-operator phase
        let mut out = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let ph = C64::new(0.0, phi * (i as f64 - j as f64)).exp();
                out[(i, j)] = ph * core[(i, j)];
            }
        }
        Ok(out)
    }

    /// Apply the displacement to a single Fock basis vector (column `n` of
    /// `D(z)`), cheaper than building the full operator.
    pub fn displacement_column(&self, z: C64, n: usize) -> Result<Vec<C64>, ModelError> {
        let dim = self.dim();
        let r = z.norm();
        let mut e = vec![C64::new(0.0, 0.0); dim];
        e[n] = C64::new(1.0, 0.0);
        if r == 0.0 {
            return Ok(e);
        }
        let phi = z.arg();
        let q = self.quadrature()?;
        e[n] = C64::new(0.0, -phi * n as f64).exp();
        // v ← V e^{-irλ} V† e
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for k in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..dim {
                acc += q.eigenvectors[(i, k)].conj() * e[i];
            }
            v[k] = acc * C64::new(0.0, -r * q.eigenvalues[k]).exp();
        }
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for i in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                acc += q.eigenvectors[(i, k)] * v[k];
            }
            out[i] = acc * C64::new(0.0, phi * i as f64).exp();
        }
        Ok(out)
    }

    pub fn density_at(&self, lp: &ParameterLoop, t: f64) -> Result<DensityMatrix, ModelError> {
        let z = lp.plane_point(t).ok_or(ModelError::IncompatibleLoop { model: "boson" })?;
        let d = self.displacement(z)?;
        let weights = self.fock_weights();
        let matrix = d.conjugate_diag(&weights);
        // Ascending spectrum = reversed Fock order.
        let dim = self.dim();
        let mut asc = weights.clone();
        asc.reverse();
        let mut vecs = ComplexMatrix::zeros(dim);
        for k in 0..dim {
            vecs.set_column(k, &d.column(dim - 1 - k));
        }
        Ok(DensityMatrix::from_parts(
            matrix,
            SpectralDecomposition::new_unchecked(asc, vecs),
        ))
    }

    pub fn sqrt_density_at(&self, lp: &ParameterLoop, t: f64) -> Result<ComplexMatrix, ModelError> {
        let z = lp.plane_point(t).ok_or(ModelError::IncompatibleLoop { model: "boson" })?;
        let d = self.displacement(z)?;
        let roots: Vec<f64> = self.fock_weights().iter().map(|w| w.sqrt()).collect();
        Ok(d.conjugate_diag(&roots))
    }

    /// Analytic Uhlmann connection contracted with the loop velocity:
    /// `A(t) = −χ[(a†−z̄)ż − (a−z)ż̄]`, a tridiagonal anti-Hermitian matrix.
    pub fn connection_at(&self, lp: &ParameterLoop, t: f64) -> Result<ComplexMatrix, ModelError> {
        let z = lp.plane_point(t).ok_or(ModelError::IncompatibleLoop { model: "boson" })?;
        let zdot = lp.plane_velocity(t).ok_or(ModelError::IncompatibleLoop { model: "boson" })?;
        let chi = self.chi();
        let dim = self.dim();
        let mut a = ComplexMatrix::zeros(dim);
        let scalar = C64::new(0.0, 2.0 * chi * (z.conj() * zdot).im);
        for n in 0..dim {
            a[(n, n)] = scalar;
            if n + 1 < dim {
                let s = ((n + 1) as f64).sqrt();
                a[(n + 1, n)] = -chi * zdot * s; // −χ ż a†
                a[(n, n + 1)] = chi * zdot.conj() * s; // +χ ż̄ a
            }
        }
        Ok(a)
    }

    pub fn closed_form_phase(&self, lp: &ParameterLoop) -> Result<PhaseClosedForm, ModelError> {
        let area = lp.signed_area().ok_or(ModelError::UnsupportedLoopForClosedForm)?;
        let eta = self.eta();
        Ok(PhaseClosedForm {
            theta_u: PhaseValue::Angle(principal_angle(-2.0 * (1.0 - eta * eta) * area)),
            theta_b: PhaseValue::Angle(principal_angle(-2.0 * area)),
        })
    }

    pub fn level_eigvec(
        &self,
        lp: &ParameterLoop,
        t: f64,
        level: usize,
    ) -> Result<Vec<C64>, ModelError> {
        let z = lp.plane_point(t).ok_or(ModelError::IncompatibleLoop { model: "boson" })?;
        self.displacement_column(z, level)
    }
}

/// Displacement operator `exp(z a† − z̄ a)` on a fresh truncated Fock space.
///
/// Unitary to the truncation tolerance on the low-occupancy block; the
/// occupancy margin for `|z|` is enforced.
pub fn boson_displacement(z: C64, n_cut: usize) -> Result<ComplexMatrix, ModelError> {
    let r = z.norm();
    let required = (6.0 * r * r + 10.0).ceil() as usize;
    if n_cut < required {
        return Err(ModelError::TruncationTooSmall { required, actual: n_cut });
    }
    let dim = n_cut + 1;
    let mut gen = ComplexMatrix::zeros(dim);
    for n in 0..dim - 1 {
        let s = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = z * s;
        gen[(n, n + 1)] = -z.conj() * s;
    }
    Ok(linops::expm(&gen)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LoopKind;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn low_block(dim: usize) -> usize {
        3 * dim / 4
    }

    #[test]
    fn displacement_at_origin_is_identity() {
        let d = boson_displacement(c(0.0, 0.0), 16).unwrap();
        assert!(d.sub(&ComplexMatrix::identity(17)).max_norm() < 1e-14);
    }

    #[test]
    fn displacement_group_inverse_on_low_block() {
        let d = boson_displacement(c(0.7, -0.4), 32).unwrap();
        let dinv = boson_displacement(c(-0.7, 0.4), 32).unwrap();
        let prod = d.mul(&dinv);
        let eye = ComplexMatrix::identity(33);
        assert!(prod.block_distance(&eye, low_block(33)) < 1e-8);
    }

    #[test]
    fn vacuum_overlap_matches_coherent_state_norm() {
        // ⟨0|D(z)|0⟩ = e^{-|z|²/2}; oracle from the truncated series
        // exponential evaluated independently of the production path.
        let z = c(1.0, 0.0);
        let d = boson_displacement(z, 32).unwrap();
        let want = (-0.5f64).exp();
        assert!((d[(0, 0)] - c(want, 0.0)).norm() < 1e-10);

        let dim = 33;
        let mut gen = ComplexMatrix::zeros(dim);
        for n in 0..dim - 1 {
            let s = ((n + 1) as f64).sqrt();
            gen[(n + 1, n)] = z * s;
            gen[(n, n + 1)] = -z.conj() * s;
        }
        let mut series = ComplexMatrix::identity(dim);
        let mut term = ComplexMatrix::identity(dim);
        for j in 1..60 {
            term = gen.mul(&term).scale(c(1.0 / j as f64, 0.0));
            series.add_scaled_assign(c(1.0, 0.0), &term);
        }
        assert!((series[(0, 0)] - c(want, 0.0)).norm() < 1e-10);
        assert!(d.sub(&series).max_norm() < 1e-9);
    }

    #[test]
    fn truncation_guard_fires() {
        assert!(matches!(
            boson_displacement(c(3.0, 0.0), 8),
            Err(ModelError::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn cached_displacement_matches_free_operator() {
        let model = BosonModel::new(1.0, 1.0, 24);
        for &z in &[c(0.4, 0.2), c(-0.3, 0.6), c(0.0, -0.9)] {
            let fast = model.displacement(z).unwrap();
            let dim = model.dim();
            let mut gen = ComplexMatrix::zeros(dim);
            for n in 0..dim - 1 {
                let s = ((n + 1) as f64).sqrt();
                gen[(n + 1, n)] = z * s;
                gen[(n, n + 1)] = -z.conj() * s;
            }
            let slow = linops::expm(&gen).unwrap();
            assert!(fast.sub(&slow).max_norm() < 1e-11, "mismatch at z = {z}");
            assert!(fast.unitarity_defect() < 1e-11);
        }
    }

    #[test]
    fn displacement_column_matches_full_operator() {
        let model = BosonModel::new(1.0, 1.0, 20);
        let z = c(0.3, -0.5);
        let d = model.displacement(z).unwrap();
        for n in [0usize, 3] {
            let col = model.displacement_column(z, n).unwrap();
            let full = d.column(n);
            let diff: f64 =
                col.iter().zip(&full).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn thermal_spectrum_is_displacement_invariant() {
        let model = BosonModel::new(1.0, 1.0, 28);
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.5, 1, 64);
        let rho0 = model.density_at(&lp, 0.0).unwrap();
        // Boltzmann weights with the exact partition function, ascending.
        let mut want = model.fock_weights();
        want.reverse();
        for (got, w) in rho0.spectrum().eigenvalues().iter().zip(&want) {
            assert!((got - w).abs() < 1e-14);
        }
        // Eigenvalues are invariant along the loop.
        let rho_t = model.density_at(&lp, 0.37).unwrap();
        for (a, b) in rho_t
            .spectrum()
            .eigenvalues()
            .iter()
            .zip(rho0.spectrum().eigenvalues())
        {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(rho_t.matrix().hermiticity_defect() < 1e-12);
        assert!(rho_t.min_eigenvalue() > 0.0);
        assert!(model.tail_certified());
        assert!(rho_t.trace_defect() < 1e-10);
    }

    #[test]
    fn sqrt_density_squares_back() {
        let model = BosonModel::new(1.0, 1.0, 16);
        let lp = ParameterLoop::circle(c(1.0, 0.0), 0.0, 1, 64);
        // z = 1 + 0i fixed point loop (radius 0).
        let s = model.sqrt_density_at(&lp, 0.0).unwrap();
        let rho = model.density_at(&lp, 0.0).unwrap();
        assert!(s.mul(&s).sub(rho.matrix()).max_norm() < 1e-10);
    }

    #[test]
    fn connection_is_tridiagonal_anti_hermitian() {
        let model = BosonModel::new(1.0, 2.0, 24);
        let lp = ParameterLoop::circle(c(0.1, 0.1), 0.5, 1, 64);
        for &t in &[0.0, 0.21, 0.73] {
            let a = model.connection_at(&lp, t).unwrap();
            assert!(a.anti_hermiticity_defect() < 1e-12);
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    if i.abs_diff(j) > 1 {
                        assert_eq!(a[(i, j)], c(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn infinite_temperature_connection_vanishes() {
        let model = BosonModel::new(1.0, 1e-9, 16);
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.4, 1, 64);
        let a = model.connection_at(&lp, 0.2).unwrap();
        assert!(a.max_norm() < 1e-15);
    }

    #[test]
    fn closed_form_values() {
        // ω=1, β=2, circle r=0.5 (area π/4): θ_U = −2 tanh²(1) π/4.
        let model = BosonModel::new(1.0, 2.0, 48);
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.5, 1, 64);
        let pcf = model.closed_form_phase(&lp).unwrap();
        let want = -2.0 * 1.0f64.tanh().powi(2) * std::f64::consts::PI / 4.0;
        assert!((pcf.theta_u.value() - want).abs() < 1e-12);
        assert!((want + 0.911_10).abs() < 5e-6);
        // β → ∞ limit: θ_U → θ_B = −2 S_C.
        let cold = BosonModel::new(1.0, 64.0, 48);
        let pcf_cold = cold.closed_form_phase(&lp).unwrap();
        assert!((pcf_cold.theta_u.value() - pcf_cold.theta_b.value()).abs() < 1e-12);
        assert!((pcf_cold.theta_b.value() + std::f64::consts::PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn occupancy_requirement_follows_loop_extent() {
        let lp = ParameterLoop::new(
            LoopKind::CirclePlane { center: c(1.0, 0.0), radius: 0.5, winding: 1 },
            64,
        )
        .unwrap();
        let req = BosonModel::required_truncation(&lp).unwrap();
        assert_eq!(req, (1.0f64 + 6.0 * 0.5 * 1.5 + 10.0).ceil() as usize);
        let small = BosonModel::new(1.0, 1.0, 8);
        assert!(matches!(
            small.check_truncation(&lp),
            Err(ModelError::TruncationTooSmall { .. })
        ));
    }
}
