//! Gauge-invariant Wilson-loop Berry phase.
//!
//! `θ = −arg Π_k ⟨n(t_k)|n(t_{k+1})⟩` over periodic samples, matching the
//! sign of `θ_n = i∮⟨n|d/dt|n⟩dt`. The product is invariant under arbitrary
//! per-sample phase choices, so no smooth gauge is ever needed.

use super::{HolonomyError, MIN_STEPS};
use crate::linops::C64;
use crate::models::{ModelFamily, ParameterLoop};
use crate::util::principal_angle;

/// Discrete Berry phase of one energy-ordered level (ground level 0).
pub fn berry_phase_wilson(
    model: &ModelFamily,
    lp: &ParameterLoop,
    level: usize,
    steps: usize,
) -> Result<f64, HolonomyError> {
    if steps < MIN_STEPS {
        return Err(HolonomyError::TooFewSteps { min: MIN_STEPS, got: steps });
    }
    model.check_loop(lp)?;
    let dim = model.dim();
    if level >= dim {
        return Err(HolonomyError::Unsupported { model: model.kind_name() });
    }
    check_level_gap(model, level)?;

    if let ModelFamily::OneDim(m) = model {
        // One-dimensional ray: closed-form successive overlaps.
        let dt = 1.0 / steps as f64;
        let mut product = C64::new(1.0, 0.0);
        for k in 0..steps {
            let t_a = k as f64 * dt;
            let t_b = ((k + 1) % steps) as f64 * dt;
            // Periodic indexing: the final overlap closes on sample 0.
            let t_b = if k + 1 == steps { 0.0 } else { t_b };
            product *= m.ray_overlap(lp, t_a, t_b)?;
        }
        return Ok(principal_angle(-product.arg()));
    }

    if let ModelFamily::Fermion(_) = model {
        return Err(HolonomyError::Unsupported { model: "fermion" });
    }

    let dt = 1.0 / steps as f64;
    let samples: Vec<Vec<C64>> = (0..steps)
        .map(|k| model.level_eigvec(lp, k as f64 * dt, level))
        .collect::<Result<_, _>>()?;
    let mut product = C64::new(1.0, 0.0);
    for k in 0..steps {
        let a = &samples[k];
        let b = &samples[(k + 1) % steps];
        let mut overlap = C64::new(0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            overlap += x.conj() * y;
        }
        product *= overlap;
        // Keep the running product away from underflow on long loops.
        if product.norm() < 1e-100 {
            return Err(HolonomyError::StepTooSmall { delta: product.norm() });
        }
    }
    Ok(principal_angle(-product.arg()))
}

/// Thermal-weight gap around the level; the weights are loop-independent
/// for every family here, so one check covers the whole path.
fn check_level_gap(model: &ModelFamily, level: usize) -> Result<(), HolonomyError> {
    let weights = model.level_weights();
    if weights.len() <= 1 {
        return Ok(());
    }
    let mut gap = f64::INFINITY;
    if level > 0 {
        gap = gap.min((weights[level] - weights[level - 1]).abs());
    }
    if level + 1 < weights.len() {
        gap = gap.min((weights[level] - weights[level + 1]).abs());
    }
    if gap < 1e-12 {
        return Err(HolonomyError::DegenerateLevel { level, gap });
    }
    if gap < 1e-8 {
        return Err(HolonomyError::LevelCrossing { level, gap });
    }
    Ok(())
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

    #[test]
    fn boson_ground_level_gives_minus_two_areas() {
        // Circle r = 0.5: θ_B = −2S_C = −π/2, level-independent.
        let model = ModelFamily::boson(1.0, 1.0, 24);
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.5, 1, 4096);
        let b0 = berry_phase_wilson(&model, &lp, 0, 4096).unwrap();
        assert!((b0 + PI / 2.0).abs() < 1e-5, "got {b0}");
        let b3 = berry_phase_wilson(&model, &lp, 3, 4096).unwrap();
        assert!((b3 - b0).abs() < 1e-8);
    }

    #[test]
    fn spin_equator_ground_level_is_trivial_mod_two_pi() {
        let model = ModelFamily::spin(2, 1.0, 1.0);
        let lp = ParameterLoop::equator(1, 1024);
        let b = berry_phase_wilson(&model, &lp, 0, 1024).unwrap();
        assert!(crate::util::circle_distance(b, 0.0) < 1e-8, "got {b}");
    }

    #[test]
    fn spin_latitude_matches_closed_form() {
        // m = +1 (level 2) on θ₀ = π/3: θ_B = −π.
        let model = ModelFamily::spin(2, 1.0, 1.0);
        let lp = ParameterLoop::latitude(PI / 3.0, 1, 2048).unwrap();
        let b = berry_phase_wilson(&model, &lp, 2, 2048).unwrap();
        assert!(crate::util::circle_distance(b, -PI) < 1e-5, "got {b}");
        // m = −1 (ground) has the opposite sign.
        let b0 = berry_phase_wilson(&model, &lp, 0, 2048).unwrap();
        assert!(crate::util::circle_distance(b0, PI) < 1e-5);
    }

    #[test]
    fn one_dim_ray_carries_area_phase() {
        let model = ModelFamily::one_dim();
        let lp = ParameterLoop::circle(c(0.0, 0.0), 0.5, 1, 2048);
        let b = berry_phase_wilson(&model, &lp, 0, 2048).unwrap();
        assert!((b + PI / 2.0).abs() < 1e-6, "got {b}");
    }

    #[test]
    fn gauge_invariance_under_random_sample_phases() {
        // Multiplying every eigenvector sample by a random phase cannot move
        // the Wilson loop: recompute the product with injected phases.
        let model = ModelFamily::spin(2, 1.0, 1.5);
        let lp = ParameterLoop::latitude(1.1, 1, 256).unwrap();
        let steps = 256;
        let dt = 1.0 / steps as f64;
        let samples: Vec<Vec<C64>> = (0..steps)
            .map(|k| model.level_eigvec(&lp, k as f64 * dt, 1).unwrap())
            .collect();
        let product = |phased: &[Vec<C64>]| -> f64 {
            let mut p = c(1.0, 0.0);
            for k in 0..steps {
                let a = &phased[k];
                let b = &phased[(k + 1) % steps];
                let mut o = c(0.0, 0.0);
                for (x, y) in a.iter().zip(b) {
                    o += x.conj() * y;
                }
                p *= o;
            }
            principal_angle(-p.arg())
        };
        let base = product(&samples);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let phased: Vec<Vec<C64>> = samples
            .iter()
            .map(|v| {
                let ph = C64::from_polar(1.0, rng.gen_range(-PI..PI));
                v.iter().map(|z| z * ph).collect()
            })
            .collect();
        let shifted = product(&phased);
        assert!((base - shifted).abs() < 1e-12);
    }

    #[test]
    fn degenerate_levels_are_rejected() {
        // At β → 0 the thermal weights collapse and the gap check fires.
        let model = ModelFamily::spin(2, 1.0, 1e-13);
        let lp = ParameterLoop::equator(1, 128);
        assert!(matches!(
            berry_phase_wilson(&model, &lp, 0, 128),
            Err(HolonomyError::DegenerateLevel { .. }) | Err(HolonomyError::LevelCrossing { .. })
        ));
    }
}
