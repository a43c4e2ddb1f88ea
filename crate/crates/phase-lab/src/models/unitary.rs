//! Generic unitary family `ρ(t) = e^{tG} ρ₀ e^{-tG}` with a constant
//! anti-Hermitian generator and cyclic closure `e^{G} = 1`.
//!
//! This is the workhorse for checking the zero-temperature limit of the
//! Uhlmann connection against the Berry connection matrix on families where
//! the path ordering is controllable.

use super::{DensityMatrix, ModelError, PhaseValue};
use crate::linops::{self, C64, ComplexMatrix, SpectralDecomposition};
use crate::util::principal_angle;
use std::sync::{Arc, OnceLock};

#[derive(Debug)]
struct FlowCache {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

/// Thermal recipe for ρ₀, kept so the family can be re-weighted at another
/// inverse temperature.
#[derive(Clone, Debug)]
struct ThermalSpec {
    /// Energies in ascending order.
    energies: Vec<f64>,
    /// Energy eigenbasis columns; identity when absent.
    basis: Option<ComplexMatrix>,
    beta: f64,
}

#[derive(Clone, Debug)]
pub struct UnitaryFamilyModel {
    generator: ComplexMatrix,
    rho0: DensityMatrix,
    thermal: Option<ThermalSpec>,
    cache: Arc<OnceLock<FlowCache>>,
}

impl UnitaryFamilyModel {
    /// Requires an anti-Hermitian generator with `‖e^{G} − 1‖ ≤ 1e-10` and a
    /// density matrix of matching dimension.
    pub fn new(generator: ComplexMatrix, rho0: DensityMatrix) -> Result<Self, ModelError> {
        if generator.dim() != rho0.dim() {
            return Err(ModelError::InvalidParameter(format!(
                "generator dim {} vs ρ₀ dim {}",
                generator.dim(),
                rho0.dim()
            )));
        }
        let scale = generator.max_norm().max(1.0);
        if generator.anti_hermiticity_defect() > 1e-10 * scale {
            return Err(ModelError::InvalidParameter(
                "generator must be anti-Hermitian".into(),
            ));
        }
        let holonomy_defect = linops::expm(&generator)?
            .sub(&ComplexMatrix::identity(generator.dim()))
            .max_norm();
        if holonomy_defect > 1e-10 {
            return Err(ModelError::NotCyclic { defect: holonomy_defect });
        }
        Ok(Self { generator, rho0, thermal: None, cache: Arc::new(OnceLock::new()) })
    }

    /// Thermal ρ₀ from ascending energies at inverse temperature `beta`,
    /// optionally in a supplied energy eigenbasis. Keeping the recipe lets
    /// [`Self::with_beta`] re-weight the same family.
    pub fn thermal(
        generator: ComplexMatrix,
        energies: &[f64],
        basis: Option<ComplexMatrix>,
        beta: f64,
    ) -> Result<Self, ModelError> {
        if energies.len() != generator.dim() {
            return Err(ModelError::InvalidParameter(format!(
                "{} energies for a dim-{} generator",
                energies.len(),
                generator.dim()
            )));
        }
        if energies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::InvalidParameter("energies must ascend strictly".into()));
        }
        if beta <= 0.0 {
            return Err(ModelError::InvalidParameter("β must be positive".into()));
        }
        let spec = ThermalSpec { energies: energies.to_vec(), basis, beta };
        let rho0 = thermal_density(&spec)?;
        let mut model = Self::new(generator, rho0)?;
        model.thermal = Some(spec);
        Ok(model)
    }

    pub fn beta(&self) -> Option<f64> {
        self.thermal.as_ref().map(|t| t.beta)
    }

    /// Re-weight the thermal ρ₀ at another β; identity for families built
    /// from an explicit ρ₀.
    pub fn with_beta(&self, beta: f64) -> Self {
        match &self.thermal {
            Some(spec) => {
                let new_spec = ThermalSpec { beta, ..spec.clone() };
                let rho0 = thermal_density(&new_spec).expect("weights stay valid under reweighting");
                Self {
                    generator: self.generator.clone(),
                    rho0,
                    thermal: Some(new_spec),
                    cache: Arc::clone(&self.cache),
                }
            }
            None => self.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    fn flow_cache(&self) -> Result<&FlowCache, ModelError> {
        if let Some(c) = self.cache.get() {
            return Ok(c);
        }
        // G = −iH with H Hermitian: e^{tG} = V e^{-itλ} V†.
        let h = self.generator.scale(C64::new(0.0, 1.0));
        let spec = linops::hermitian_eig(&h)?;
        let _ = self.cache.set(FlowCache {
            eigenvalues: spec.eigenvalues().to_vec(),
            eigenvectors: spec.eigenvectors().clone(),
        });
        Ok(self.cache.get().unwrap())
    }

    /// Transport unitary `e^{tG}`.
    pub fn transport(&self, t: f64) -> Result<ComplexMatrix, ModelError> {
        let c = self.flow_cache()?;
        let phases: Vec<C64> =
            c.eigenvalues.iter().map(|&l| C64::new(0.0, -t * l).exp()).collect();
        Ok(c.eigenvectors.conjugate_cdiag(&phases))
    }

    pub fn density_at(&self, t: f64) -> Result<DensityMatrix, ModelError> {
        let d = self.transport(t)?;
        let matrix = d.mul(self.rho0.matrix()).mul(&d.adjoint());
        let vecs = d.mul(self.rho0.spectrum().eigenvectors());
        Ok(DensityMatrix::from_parts(
            matrix,
            SpectralDecomposition::new_unchecked(
                self.rho0.spectrum().eigenvalues().to_vec(),
                vecs,
            ),
        ))
    }

    pub fn sqrt_density_at(&self, t: f64) -> Result<ComplexMatrix, ModelError> {
        let d = self.transport(t)?;
        Ok(d.mul(&self.rho0.sqrt_matrix()).mul(&d.adjoint()))
    }

    pub fn level_eigvec(&self, t: f64, level: usize) -> Result<Vec<C64>, ModelError> {
        let d = self.transport(t)?;
        Ok(d.apply(&self.rho0.level_eigvec(level)))
    }

    /// Berry phase of a level for the constant generator:
    /// `θ_B = i ∮ ⟨n|d/dt|n⟩ dt = i·⟨n(0)|G|n(0)⟩`.
    ///
    /// Valid because the generator is time-independent by construction.
    pub fn berry_phase_closed(&self, level: usize) -> Result<PhaseValue, ModelError> {
        let v = self.rho0.level_eigvec(level);
        let gv = self.generator.apply(&v);
        let mut overlap = C64::new(0.0, 0.0);
        for (a, b) in v.iter().zip(&gv) {
            overlap += a.conj() * b;
        }
        // ⟨n|G|n⟩ is purely imaginary for anti-Hermitian G.
        Ok(PhaseValue::Angle(principal_angle(-overlap.im)))
    }
}

/// Boltzmann weights over the supplied energies, assembled into a density
/// matrix with ascending eigenvalue storage (largest weight last).
fn thermal_density(spec: &ThermalSpec) -> Result<DensityMatrix, ModelError> {
    let dim = spec.energies.len();
    let e0 = spec.energies[0];
    let raw: Vec<f64> = spec.energies.iter().map(|&e| (-spec.beta * (e - e0)).exp()).collect();
    let z: f64 = raw.iter().sum();
    // Energy order carries descending weights; storage wants ascending.
    let mut asc: Vec<f64> = raw.iter().map(|w| w / z).collect();
    asc.reverse();
    let vecs = match &spec.basis {
        Some(b) => {
            if b.dim() != dim {
                return Err(ModelError::InvalidParameter("basis dimension mismatch".into()));
            }
            if b.unitarity_defect() > 1e-10 {
                return Err(ModelError::InvalidParameter("basis must be unitary".into()));
            }
            let mut v = ComplexMatrix::zeros(dim);
            for k in 0..dim {
                v.set_column(k, &b.column(dim - 1 - k));
            }
            v
        }
        None => {
            let mut v = ComplexMatrix::zeros(dim);
            for k in 0..dim {
                v[(dim - 1 - k, k)] = C64::new(1.0, 0.0);
            }
            v
        }
    };
    Ok(DensityMatrix::from_spectrum(SpectralDecomposition::new_unchecked(asc, vecs)))
}
