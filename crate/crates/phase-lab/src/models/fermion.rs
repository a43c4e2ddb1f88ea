//! Fermionic coherent states with Grassmann-valued displacement `ξ(t) = ζ z(t)`.
//!
//! The two-level thermal state `ρ(0) = e^{-βω(b†b − 1/2)}/Z` is displaced by
//! `D(ξ)`, giving a density matrix with Grassmann-valued entries. The
//! Uhlmann connection is exactly linear in the generators, so the
//! path-ordered product terminates at second order in the soul.

use super::{ModelError, ParameterLoop, PhaseClosedForm, PhaseValue};
use crate::grassmann::{GrassmannElement, GrassmannMatrix};
use crate::linops::{C64, ComplexMatrix};

#[derive(Clone, Debug)]
pub struct FermionModel {
    pub omega: f64,
    pub beta: f64,
}

impl FermionModel {
    pub fn new(omega: f64, beta: f64) -> Self {
        assert!(omega > 0.0 && beta > 0.0, "fermion model needs positive ω and β");
        Self { omega, beta }
    }

    pub fn eta(&self) -> f64 {
        1.0 / (self.beta * self.omega / 2.0).cosh()
    }

    pub fn chi(&self) -> f64 {
        1.0 - self.eta()
    }

    /// Thermal weights `(λ_0, λ_1)` with `Z = 2 cosh(βω/2)`; the empty mode
    /// is the ground state.
    pub fn weights(&self) -> [f64; 2] {
        let x = self.beta * self.omega / 2.0;
        let z = 2.0 * x.cosh();
        [x.exp() / z, (-x).exp() / z]
    }

    /// Annihilator `b` in the basis {|0⟩, |1⟩}.
    fn lowering() -> ComplexMatrix {
        let mut b = ComplexMatrix::zeros(2);
        b[(0, 1)] = C64::new(1.0, 0.0);
        b
    }

    /// Grassmann-valued density matrix
    /// `ρ(ξ) = λ_0·1 − tanh(βω/2)·[(b†−ξ̄)(b−ξ) − b†b·0]` expanded over the
    /// algebra basis, with `ξ = ζ z(t)`.
    pub fn density_at(&self, lp: &ParameterLoop, t: f64) -> Result<GrassmannMatrix, ModelError> {
        let z = lp.plane_point(t).ok_or(ModelError::IncompatibleLoop { model: "fermion" })?;
        let c = 1.0 / (1.0 + (-self.beta * self.omega).exp());
        let tanh = (self.beta * self.omega / 2.0).tanh();
        let b = Self::lowering();
        let bdag = b.adjoint();
        let n_op = bdag.mul(&b);

        // body: c·1 − tanh·b†b  (→ diag(λ0, λ1))
        let mut rho = GrassmannMatrix::from_complex(
            &ComplexMatrix::identity(2).scale(C64::new(c, 0.0)).sub(&n_op.scale(C64::new(tanh, 0.0))),
        );
        // + tanh·z·b†ζ + tanh·z̄·ζ̄b − tanh·|z|²·ζ̄ζ·1
        rho = rho.add(&GrassmannMatrix::from_complex_scaled(
            &bdag.scale(z * tanh),
            &GrassmannElement::zeta(),
        ));
        rho = rho.add(&GrassmannMatrix::from_complex_scaled(
            &b.scale(z.conj() * tanh),
            &GrassmannElement::zeta_bar(),
        ));
        rho = rho.add(&GrassmannMatrix::from_complex_scaled(
            &ComplexMatrix::identity(2).scale(C64::new(-tanh * z.norm_sqr(), 0.0)),
            &GrassmannElement::zeta_bar_zeta(),
        ));
        Ok(rho)
    }

    /// Analytic Uhlmann connection contracted with the loop velocity:
    /// `A(t) = −χ[ż b†ζ − ż̄ ζ̄b + (ż̄z − z̄ż) ζ̄ζ]`.
    pub fn connection_at(&self, lp: &ParameterLoop, t: f64) -> Result<GrassmannMatrix, ModelError> {
        let z = lp.plane_point(t).ok_or(ModelError::IncompatibleLoop { model: "fermion" })?;
        let zdot =
            lp.plane_velocity(t).ok_or(ModelError::IncompatibleLoop { model: "fermion" })?;
        let chi = self.chi();
        let b = Self::lowering();
        let bdag = b.adjoint();

        let mut a = GrassmannMatrix::from_complex_scaled(
            &bdag.scale(-chi * zdot),
            &GrassmannElement::zeta(),
        );
        a = a.add(&GrassmannMatrix::from_complex_scaled(
            &b.scale(chi * zdot.conj()),
            &GrassmannElement::zeta_bar(),
        ));
        let scalar = -chi * (zdot.conj() * z - z.conj() * zdot);
        a = a.add(&GrassmannMatrix::from_complex_scaled(
            &ComplexMatrix::identity(2).scale(scalar),
            &GrassmannElement::zeta_bar_zeta(),
        ));
        Ok(a)
    }

    pub fn closed_form_phase(&self, lp: &ParameterLoop) -> Result<PhaseClosedForm, ModelError> {
        let area = lp.signed_area().ok_or(ModelError::UnsupportedLoopForClosedForm)?;
        let eta = self.eta();
        Ok(PhaseClosedForm {
            theta_u: PhaseValue::Soul { body_arg: 0.0, soul: -2.0 * (1.0 - eta * eta) * area },
            theta_b: PhaseValue::Soul { body_arg: 0.0, soul: -2.0 * area },
        })
    }
}
