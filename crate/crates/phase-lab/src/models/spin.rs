//! Spin-j paramagnet in a magnetic field sweeping a loop on the unit sphere.
//!
//! The Hamiltonian `H(θ,φ) = ω₀ V J_z V†` with
//! `V(θ,φ) = e^{-iφJ_z} e^{-iθJ_y} e^{iφJ_z}` is diagonalized by
//! construction, so density matrices, eigenvector samples, and the analytic
//! Uhlmann connection all come in closed form. The basis is |j m⟩ with
//! m = −j … +j; ladder elements follow √(j(j+1) − m(m±1)).

use super::{DensityMatrix, ModelError, ParameterLoop, PhaseClosedForm, PhaseValue};
use crate::linops::{C64, ComplexMatrix, SpectralDecomposition};
use crate::util::principal_angle;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

#[derive(Debug)]
struct SpinOps {
    jx: ComplexMatrix,
    jy: ComplexMatrix,
    jz: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct SpinModel {
    /// Doubled spin quantum number (2j), so half-integer spins stay exact.
    pub twice_j: u32,
    pub omega0: f64,
    pub beta: f64,
    ops: Arc<OnceLock<SpinOps>>,
}

impl SpinModel {
    pub fn new(twice_j: u32, omega0: f64, beta: f64) -> Self {
        assert!(twice_j >= 1, "spin must be at least 1/2");
        assert!(omega0 > 0.0 && beta > 0.0, "spin model needs positive ω₀ and β");
        Self { twice_j, omega0, beta, ops: Arc::new(OnceLock::new()) }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { twice_j: self.twice_j, omega0: self.omega0, beta, ops: Arc::clone(&self.ops) }
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn eta(&self) -> f64 {
        1.0 / (self.beta * self.omega0 / 2.0).cosh()
    }

    pub fn chi(&self) -> f64 {
        1.0 - self.eta()
    }

    fn m_of_index(&self, idx: usize) -> f64 {
        idx as f64 - self.j()
    }

    fn ops(&self) -> &SpinOps {
        self.ops.get_or_init(|| {
            let dim = self.dim();
            let j = self.j();
            let mut jp = ComplexMatrix::zeros(dim); // raising J₊
            for idx in 0..dim - 1 {
                let m = self.m_of_index(idx);
                let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
                jp[(idx + 1, idx)] = C64::new(amp, 0.0);
            }
            let jm = jp.adjoint();
            let jx = jp.add(&jm).scale(C64::new(0.5, 0.0));
            let jy = jp.sub(&jm).scale(C64::new(0.0, -0.5));
            let jz = ComplexMatrix::from_real_diag(
                &(0..dim).map(|i| self.m_of_index(i)).collect::<Vec<_>>(),
            );
            SpinOps { jx, jy, jz }
        })
    }

    pub fn jx(&self) -> &ComplexMatrix {
        &self.ops().jx
    }

    pub fn jy(&self) -> &ComplexMatrix {
        &self.ops().jy
    }

    pub fn jz(&self) -> &ComplexMatrix {
        &self.ops().jz
    }

    /// Boltzmann weights over m = −j … +j, normalized with the shifted
    /// exponentials so large βω₀ stays finite.
    pub fn weights_by_index(&self) -> Vec<f64> {
        let dim = self.dim();
        let x = self.beta * self.omega0;
        // λ(m) ∝ e^{-x·m}; shift by the ground value m = −j.
        let raw: Vec<f64> =
            (0..dim).map(|i| (-x * (self.m_of_index(i) + self.j())).exp()).collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect()
    }

    /// Weights in energy order (ground = m = −j first).
    pub fn weights_by_level(&self) -> Vec<f64> {
        self.weights_by_index()
    }

    /// Diagonalizing rotation for the loop point at parameter `t`.
    ///
    /// Latitude loops use `V = e^{-iφJz} e^{-iθ₀Jy} e^{iφJz}`; longitude
    /// loops continue the polar angle through the poles,
    /// `V = e^{-iφ₀Jz} e^{-iΘ(t)Jy} e^{iφ₀Jz}` with `Θ = 2πt`.
    pub fn rotation(&self, lp: &ParameterLoop, t: f64) -> Result<ComplexMatrix, ModelError> {
        let (theta, phi) =
            lp.sphere_angles(t).ok_or(ModelError::IncompatibleLoop { model: "spin" })?;
        Ok(self.rotation_angles(theta, phi))
    }

    pub fn rotation_angles(&self, theta: f64, phi: f64) -> ComplexMatrix {
        let dim = self.dim();
        let ry = self.small_d_matrix(theta);
        // e^{-iφJz} ry e^{iφJz}: row m', col m picks up e^{-iφ(m'-m)}.
        ComplexMatrix::from_fn(dim, |r, c| {
            let dm = self.m_of_index(r) - self.m_of_index(c);
            C64::new(0.0, -phi * dm).exp() * ry[(r, c)]
        })
    }

    /// Matrix of `e^{-iθJy}` from the Wigner small-d formula.
    pub fn small_d_matrix(&self, theta: f64) -> ComplexMatrix {
        let dim = self.dim();
        ComplexMatrix::from_fn(dim, |r, c| {
            let m_row = 2 * r as i64 - self.twice_j as i64;
            let m_col = 2 * c as i64 - self.twice_j as i64;
            C64::new(wigner_small_d(self.twice_j, m_row, m_col, theta), 0.0)
        })
    }

    pub fn density_at(&self, lp: &ParameterLoop, t: f64) -> Result<DensityMatrix, ModelError> {
        let v = self.rotation(lp, t)?;
        let weights = self.weights_by_index();
        let matrix = v.conjugate_diag(&weights);
        let dim = self.dim();
        // Ascending eigenvalues = reversed m order (weights decay with m).
        let mut asc = weights.clone();
        asc.reverse();
        let mut vecs = ComplexMatrix::zeros(dim);
        for k in 0..dim {
            vecs.set_column(k, &v.column(dim - 1 - k));
        }
        Ok(DensityMatrix::from_parts(
            matrix,
            SpectralDecomposition::new_unchecked(asc, vecs),
        ))
    }

    pub fn sqrt_density_at(&self, lp: &ParameterLoop, t: f64) -> Result<ComplexMatrix, ModelError> {
        let v = self.rotation(lp, t)?;
        let roots: Vec<f64> = self.weights_by_index().iter().map(|w| w.sqrt()).collect();
        Ok(v.conjugate_diag(&roots))
    }

    /// Analytic Uhlmann connection contracted with the loop velocity:
    /// `A(t) = −iχ[(Jx sinφ − Jy cosφ)·θ̇ + ((Jx cosφ + Jy sinφ)cosθ − Jz sinθ)·sinθ·φ̇]`.
    pub fn connection_at(&self, lp: &ParameterLoop, t: f64) -> Result<ComplexMatrix, ModelError> {
        let (theta, phi) =
            lp.sphere_angles(t).ok_or(ModelError::IncompatibleLoop { model: "spin" })?;
        let (theta_dot, phi_dot) =
            lp.sphere_rates().ok_or(ModelError::IncompatibleLoop { model: "spin" })?;
        let chi = self.chi();
        let ops = self.ops();
        let mut gen = ComplexMatrix::zeros(self.dim());
        if theta_dot != 0.0 {
            gen.add_scaled_assign(C64::new(theta_dot * phi.sin(), 0.0), &ops.jx);
            gen.add_scaled_assign(C64::new(-theta_dot * phi.cos(), 0.0), &ops.jy);
        }
        if phi_dot != 0.0 {
            let s = theta.sin();
            let c = theta.cos();
            gen.add_scaled_assign(C64::new(phi_dot * s * c * phi.cos(), 0.0), &ops.jx);
            gen.add_scaled_assign(C64::new(phi_dot * s * c * phi.sin(), 0.0), &ops.jy);
            gen.add_scaled_assign(C64::new(-phi_dot * s * s, 0.0), &ops.jz);
        }
        Ok(gen.scale(C64::new(0.0, -chi)))
    }

    /// Closed-form phases on the exactly solvable great circles:
    /// `θ_U = arg Σ_m λ_m d^j_{mm}(2πΩχ)` and the latitude Berry phase
    /// `θ_B = −m ∮(1−cosθ)dφ` for the requested level.
    pub fn closed_form_phase(
        &self,
        lp: &ParameterLoop,
        level: usize,
    ) -> Result<PhaseClosedForm, ModelError> {
        if !lp.is_great_circle() {
            return Err(ModelError::UnsupportedLoopForClosedForm);
        }
        let winding = lp.sphere_winding().ok_or(ModelError::UnsupportedLoopForClosedForm)?;
        let angle = 2.0 * PI * winding as f64 * self.chi();
        let weights = self.weights_by_index();
        let mut trace = 0.0;
        for idx in 0..self.dim() {
            let m2 = 2 * idx as i64 - self.twice_j as i64;
            trace += weights[idx] * wigner_small_d(self.twice_j, m2, m2, angle);
        }
        let theta_u = C64::new(trace, 0.0).arg();
        let theta_b = self.berry_phase_closed(lp, level)?;
        Ok(PhaseClosedForm { theta_u: PhaseValue::Angle(theta_u), theta_b })
    }

    /// Berry phase of the energy-ordered level: `−m·2πΩ(1−cosθ₀)` on a
    /// latitude, zero (mod 2π) on a longitude.
    pub fn berry_phase_closed(
        &self,
        lp: &ParameterLoop,
        level: usize,
    ) -> Result<PhaseValue, ModelError> {
        let m = self.m_of_level(level);
        let value = match lp.sphere_angles(0.0) {
            Some(_) => match lp.sphere_rates() {
                Some((_, phi_dot)) if phi_dot != 0.0 => {
                    let (theta0, _) = lp.sphere_angles(0.0).unwrap();
                    let winding = lp.sphere_winding().unwrap() as f64;
                    -m * 2.0 * PI * winding * (1.0 - theta0.cos())
                }
                _ => 0.0,
            },
            None => return Err(ModelError::IncompatibleLoop { model: "spin" }),
        };
        Ok(PhaseValue::Angle(principal_angle(value)))
    }

    /// m value of the energy-ordered level (ground level 0 ↔ m = −j).
    pub fn m_of_level(&self, level: usize) -> f64 {
        level as f64 - self.j()
    }

    pub fn level_eigvec(
        &self,
        lp: &ParameterLoop,
        t: f64,
        level: usize,
    ) -> Result<Vec<C64>, ModelError> {
        let v = self.rotation(lp, t)?;
        Ok(v.column(level))
    }
}

/// Wigner small-d matrix element `d^j_{m'm}(β) = ⟨j m'| e^{-iβJ_y} |j m⟩`.
///
/// Arguments are doubled (2j, 2m', 2m) so half-integer spins stay integral.
pub fn wigner_small_d(twice_j: u32, twice_m_row: i64, twice_m_col: i64, beta: f64) -> f64 {
    let tj = twice_j as i64;
    assert!(
        twice_m_row.abs() <= tj && (twice_m_row - tj) % 2 == 0,
        "m' must step with j"
    );
    assert!(twice_m_col.abs() <= tj && (twice_m_col - tj) % 2 == 0, "m must step with j");

    let jp_mr = ((tj + twice_m_row) / 2) as usize; // j + m'
    let jm_mr = ((tj - twice_m_row) / 2) as usize; // j − m'
    let jp_mc = ((tj + twice_m_col) / 2) as usize; // j + m
    let jm_mc = ((tj - twice_m_col) / 2) as usize; // j − m
    let dm = (twice_m_row - twice_m_col) / 2; // m' − m

    let half = beta / 2.0;
    let cos_h = half.cos();
    let sin_h = half.sin();

    let s_min = 0.max(-dm) as usize;
    let s_max = jp_mc.min(jm_mr);
    let mut sum = 0.0;
    for s in s_min..=s_max {
        let a = jp_mc - s; // (j + m − s)!
        let b = s;
        let c = (dm + s as i64) as usize; // (m' − m + s)!
        let d = jm_mr - s; // (j − m' − s)!
        let sign = if (dm + s as i64) % 2 == 0 { 1.0 } else { -1.0 };
        // (j+m) + (j−m') − 2s = 2j + m − m' − 2s
        let cos_pow = (jp_mc + jm_mr) as i64 - 2 * s as i64;
        let sin_pow = dm + 2 * s as i64;
        let term = sign / (factorial(a) * factorial(b) * factorial(c) * factorial(d))
            * powi(cos_h, cos_pow)
            * powi(sin_h, sin_pow);
        sum += term;
    }
    let prefactor =
        (factorial(jp_mr) * factorial(jm_mr) * factorial(jp_mc) * factorial(jm_mc)).sqrt();
    prefactor * sum
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn powi(x: f64, p: i64) -> f64 {
    debug_assert!(p >= 0, "negative power in Wigner sum");
    x.powi(p as i32)
}
