//! One-dimensional Hilbert space: the excluded special case.
//!
//! The only 1×1 density matrix is [1], the commutator defining the Uhlmann
//! connection is identically zero, and the Uhlmann phase vanishes at every
//! temperature. A pure state transported around a loop is exactly such a
//! one-dimensional space, yet its Berry phase need not vanish: here the ray
//! is the coherent-state vacuum over a planar loop, whose Berry phase is
//! −2·(enclosed area).

use super::{ModelError, ParameterLoop};
use crate::linops::C64;

#[derive(Clone, Copy, Debug, Default)]
pub struct OneDimModel;

impl OneDimModel {
    /// Overlap of successive ray samples, `⟨ψ(t_a)|ψ(t_b)⟩` for the vacuum
    /// coherent ray: `exp(−|δz|²/2 + i·Im(z̄_a z_b))`.
    pub fn ray_overlap(
        &self,
        lp: &ParameterLoop,
        t_a: f64,
        t_b: f64,
    ) -> Result<C64, ModelError> {
        let za = lp.plane_point(t_a).ok_or(ModelError::IncompatibleLoop { model: "one_dim" })?;
        let zb = lp.plane_point(t_b).ok_or(ModelError::IncompatibleLoop { model: "one_dim" })?;
        let damp = -0.5 * (zb - za).norm_sqr();
        let phase = (za.conj() * zb).im;
        Ok(C64::new(damp, phase).exp())
    }
}
