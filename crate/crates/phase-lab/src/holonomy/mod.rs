//! Discretized geometric-phase estimators: Wilson-loop Berry phases,
//! numeric Uhlmann connections, path-ordered Uhlmann holonomies with two
//! independent estimators, and the zero-temperature correspondence sweep.

mod connection;
mod correspondence;
mod wilson;

pub use connection::{berry_connection_matrix, berry_connection_offdiag, numeric_uhlmann_connection};
pub use correspondence::{correspondence_check, CorrespondenceOutcome, PhaseReport};
pub use wilson::berry_phase_wilson;

use crate::grassmann::{g_arg_even, gm_exp, gm_mul, gm_trace, GrassmannMatrix};
use crate::linops::{self, C64, ComplexMatrix};
use crate::models::{ConnectionAt, ModelError, ModelFamily, ParameterLoop, PhaseValue, StateAt};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error("eigenvalue gap {gap:.3e} at level {level} is below the crossing threshold")]
    LevelCrossing { level: usize, gap: f64 },
    #[error("level {level} is degenerate (gap {gap:.3e})")]
    DegenerateLevel { level: usize, gap: f64 },
    #[error("density matrix is rank-deficient (min eigenvalue {min_eig:.3e})")]
    RankDeficient { min_eig: f64 },
    #[error("finite-difference step cancels: ‖Δ√ρ‖ = {delta:.3e}")]
    StepTooSmall { delta: f64 },
    #[error("finite-difference step {h:.3e} outside [1e-7, 1e-2]")]
    InvalidStep { h: f64 },
    #[error("|Tr ρ(0)·g| = {magnitude:.3e}: phase undefined at this point")]
    ZeroTrace { magnitude: f64 },
    #[error("need at least {min} path steps, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("operation unsupported for the {model} model")]
    Unsupported { model: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linops(#[from] linops::LinopsError),
    #[error(transparent)]
    Grassmann(#[from] crate::grassmann::GrassmannError),
}

/// Where the connection samples of the product integrator come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConnectionSource {
    /// Model-supplied closed form.
    Analytic,
    /// Central differences of √ρ with step `h`.
    Numeric { h: f64 },
}

/// Discretized holonomy estimators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimator {
    /// Midpoint product of connection exponentials,
    /// `g = Π_k exp(−A(t_{k+1/2})·Δt)`, latest factor leftmost.
    ConnectionProduct(ConnectionSource),
    /// Chain of unitary polar factors of `√ρ(t_{k+1})·√ρ(t_k)`; independent
    /// of any connection formula.
    PolarIsometry,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::ConnectionProduct(_) => "connection_product",
            Estimator::PolarIsometry => "polar_isometry",
        }
    }

    /// Analytic connections where the model has one, numeric otherwise.
    pub fn default_for(model: &ModelFamily) -> Self {
        if model.has_analytic_connection() {
            Estimator::ConnectionProduct(ConnectionSource::Analytic)
        } else {
            Estimator::ConnectionProduct(ConnectionSource::Numeric { h: 1e-4 })
        }
    }
}

/// Holonomy matrix: complex for most families, Grassmann-valued for the
/// fermionic coherent states.
#[derive(Clone, Debug)]
pub enum HolonomyMatrix {
    Complex(ComplexMatrix),
    Grassmann(GrassmannMatrix),
}

/// Result of a discretized path-ordered product.
#[derive(Clone, Debug)]
pub struct Holonomy {
    pub matrix: HolonomyMatrix,
    pub steps: usize,
    pub estimator: Estimator,
    /// Max-norm of `g†g − 1` (body part for Grassmann holonomies).
    pub unitarity_defect: f64,
}

impl Holonomy {
    pub fn complex_matrix(&self) -> Option<&ComplexMatrix> {
        match &self.matrix {
            HolonomyMatrix::Complex(m) => Some(m),
            _ => None,
        }
    }

    pub fn grassmann_matrix(&self) -> Option<&GrassmannMatrix> {
        match &self.matrix {
            HolonomyMatrix::Grassmann(m) => Some(m),
            _ => None,
        }
    }
}

pub(crate) const MIN_STEPS: usize = 64;

fn connection_sample(
    model: &ModelFamily,
    lp: &ParameterLoop,
    t: f64,
    source: ConnectionSource,
) -> Result<ComplexMatrix, HolonomyError> {
    match source {
        ConnectionSource::Analytic => match model.analytic_uhlmann_connection(lp, t)? {
            ConnectionAt::Matrix(m) => Ok(m),
            ConnectionAt::Grassmann(_) => Err(HolonomyError::Unsupported { model: "fermion" }),
        },
        ConnectionSource::Numeric { h } => numeric_uhlmann_connection(model, lp, t, h),
    }
}

/// Path-ordered Uhlmann holonomy `g = P exp(−∮ A_U)` over `steps` uniform
/// intervals; latest factor leftmost.
pub fn uhlmann_holonomy(
    model: &ModelFamily,
    lp: &ParameterLoop,
    steps: usize,
    estimator: Estimator,
) -> Result<Holonomy, HolonomyError> {
    if steps < MIN_STEPS {
        return Err(HolonomyError::TooFewSteps { min: MIN_STEPS, got: steps });
    }
    model.check_loop(lp)?;

    if let ModelFamily::Fermion(_) = model {
        return fermion_holonomy(model, lp, steps, estimator);
    }

    let dt = 1.0 / steps as f64;
    match estimator {
        Estimator::ConnectionProduct(source) => {
            let mut g = ComplexMatrix::identity(model.dim());
            for k in 0..steps {
                let t_mid = (k as f64 + 0.5) * dt;
                let a = connection_sample(model, lp, t_mid, source)?;
                g = linops::expm_mul(&a, -dt, &g)?;
            }
            let defect = g.unitarity_defect();
            Ok(Holonomy {
                matrix: HolonomyMatrix::Complex(g),
                steps,
                estimator,
                unitarity_defect: defect,
            })
        }
        Estimator::PolarIsometry => {
            let weights = model.level_weights();
            let min_w = weights.iter().cloned().fold(f64::INFINITY, f64::min);
            if min_w <= 0.0 {
                return Err(HolonomyError::RankDeficient { min_eig: min_w });
            }
            // √ρ samples, periodic in the index so the loop closes exactly.
            let sqrts: Vec<ComplexMatrix> = (0..steps)
                .into_par_iter()
                .map(|i| model.sqrt_density_at(lp, i as f64 * dt))
                .collect::<Result<_, _>>()?;
            let factors: Vec<ComplexMatrix> = (0..steps)
                .into_par_iter()
                .map(|k| {
                    let m = sqrts[(k + 1) % steps].mul(&sqrts[k]);
                    linops::unitary_polar_factor(&m)
                })
                .collect::<Result<_, _>>()?;
            let mut g = ComplexMatrix::identity(model.dim());
            for f in &factors {
                g = f.mul(&g);
            }
            let defect = g.unitarity_defect();
            Ok(Holonomy {
                matrix: HolonomyMatrix::Complex(g),
                steps,
                estimator,
                unitarity_defect: defect,
            })
        }
    }
}

fn fermion_holonomy(
    model: &ModelFamily,
    lp: &ParameterLoop,
    steps: usize,
    estimator: Estimator,
) -> Result<Holonomy, HolonomyError> {
    let source = match estimator {
        Estimator::ConnectionProduct(ConnectionSource::Analytic) => ConnectionSource::Analytic,
        _ => return Err(HolonomyError::Unsupported { model: "fermion" }),
    };
    let _ = source;
    let dt = 1.0 / steps as f64;
    let mut g = GrassmannMatrix::identity(2);
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let a = match model.analytic_uhlmann_connection(lp, t_mid)? {
            ConnectionAt::Grassmann(a) => a,
            ConnectionAt::Matrix(_) => unreachable!("fermion connection is Grassmann-valued"),
        };
        let factor = gm_exp(&a.scale(C64::new(-dt, 0.0)))?;
        g = gm_mul(&factor, &g);
    }
    let defect = g.body().unitarity_defect();
    Ok(Holonomy {
        matrix: HolonomyMatrix::Grassmann(g),
        steps,
        estimator,
        unitarity_defect: defect,
    })
}

/// Uhlmann phase `θ_U = arg Tr[ρ(0) · g]`, the trace taken after the full
/// path-ordered product.
pub fn uhlmann_phase(
    model: &ModelFamily,
    lp: &ParameterLoop,
    steps: usize,
    estimator: Estimator,
) -> Result<PhaseValue, HolonomyError> {
    let hol = uhlmann_holonomy(model, lp, steps, estimator)?;
    uhlmann_phase_of(model, lp, &hol)
}

/// Phase extraction for an already computed holonomy.
pub fn uhlmann_phase_of(
    model: &ModelFamily,
    lp: &ParameterLoop,
    hol: &Holonomy,
) -> Result<PhaseValue, HolonomyError> {
    match (&hol.matrix, model.density_at(lp, 0.0)?) {
        (HolonomyMatrix::Complex(g), StateAt::Density(rho0)) => {
            let tr = rho0.matrix().trace_product(g);
            let magnitude = tr.norm();
            if magnitude < 1e-12 {
                return Err(HolonomyError::ZeroTrace { magnitude });
            }
            Ok(PhaseValue::Angle(tr.arg()))
        }
        (HolonomyMatrix::Grassmann(g), StateAt::Grassmann(rho0)) => {
            let tr = gm_trace(&gm_mul(&rho0, g));
            if tr.c0.norm() < 1e-12 {
                return Err(HolonomyError::ZeroTrace { magnitude: tr.c0.norm() });
            }
            let arg = g_arg_even(&tr)?;
            Ok(PhaseValue::Soul { body_arg: arg.c0.re, soul: arg.czz.re })
        }
        _ => Err(HolonomyError::Unsupported { model: model.kind_name() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelFamily;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn circle(r: f64, winding: i32, samples: usize) -> ParameterLoop {
        ParameterLoop::circle(c(0.0, 0.0), r, winding, samples)
    }

    #[test]
    fn trivial_loop_gives_identity() {
        let model = ModelFamily::boson(1.0, 2.0, 16);
        let lp = circle(0.0, 1, 64);
        let hol = uhlmann_holonomy(
            &model,
            &lp,
            64,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        let g = hol.complex_matrix().unwrap();
        assert!(g.sub(&ComplexMatrix::identity(17)).max_norm() < 1e-12);
    }

    #[test]
    fn boson_holonomy_matches_closed_form_phase_factor() {
        // β=2, circle r=0.5, K=2048: g → e^{−2i tanh²(1) π/4}·1 on the
        // low-occupancy block.
        let model = ModelFamily::boson(1.0, 2.0, 32);
        let lp = circle(0.5, 1, 2048);
        let hol = uhlmann_holonomy(
            &model,
            &lp,
            2048,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        let g = hol.complex_matrix().unwrap();
        let phase = -2.0 * 1.0f64.tanh().powi(2) * PI / 4.0;
        let want = ComplexMatrix::identity(33).scale(C64::from_polar(1.0, phase));
        let block = 3 * 33 / 4;
        assert!(
            g.block_distance(&want, block) < 1e-4,
            "low-block distance {:.3e}",
            g.block_distance(&want, block)
        );
        assert!(hol.unitarity_defect < 1e-6);
        // Off-diagonal leakage on the low block stays small.
        let mut off: f64 = 0.0;
        for i in 0..block {
            for j in 0..block {
                if i != j {
                    off = off.max(g[(i, j)].norm());
                }
            }
        }
        assert!(off < 1e-4);
    }

    #[test]
    fn boson_phase_reaches_closed_form() {
        let model = ModelFamily::boson(1.0, 2.0, 32);
        let lp = circle(0.5, 1, 2048);
        let phase = uhlmann_phase(
            &model,
            &lp,
            2048,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        let want = -2.0 * 1.0f64.tanh().powi(2) * PI / 4.0;
        assert!(
            (phase.value() - want).abs() < 1e-5,
            "got {} want {want}",
            phase.value()
        );
    }

    #[test]
    fn infinite_temperature_phase_vanishes() {
        let model = ModelFamily::boson(1.0, 1e-6, 24);
        let lp = circle(0.5, 1, 256);
        let phase = uhlmann_phase(
            &model,
            &lp,
            256,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        assert!(phase.value().abs() < 1e-8);
    }

    #[test]
    fn fermion_holonomy_body_and_soul() {
        // Body stays exactly the identity; soul converges to
        // −2i(1−η²)S_C per entry on the diagonal.
        let model = ModelFamily::fermion(1.0, 1.0);
        let lp = circle(0.5, 1, 2048);
        let hol = uhlmann_holonomy(
            &model,
            &lp,
            2048,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        let g = hol.grassmann_matrix().unwrap();
        assert!(g.body().sub(&ComplexMatrix::identity(2)).max_norm() < 1e-14);
        let eta = 1.0 / 0.5f64.cosh();
        let want = -2.0 * (1.0 - eta * eta) * PI / 4.0;
        let soul = g.soul_zz();
        assert!((soul[(0, 0)] - c(0.0, want)).norm() < 1e-6);
        assert!((soul[(1, 1)] - c(0.0, want)).norm() < 1e-6);
    }

    #[test]
    fn fermion_phase_is_grassmann_soul() {
        let model = ModelFamily::fermion(1.0, 4.0);
        let lp = circle(0.5, 1, 1024);
        let phase = uhlmann_phase(
            &model,
            &lp,
            1024,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        let eta = 1.0 / 2.0f64.cosh();
        let want = -2.0 * (1.0 - eta * eta) * PI / 4.0;
        match phase {
            PhaseValue::Soul { body_arg, soul } => {
                assert!(body_arg.abs() < 1e-10);
                assert!((soul - want).abs() < 1e-6);
            }
            _ => panic!("fermion phase must carry a soul"),
        }
    }

    #[test]
    fn spin_equator_phase_follows_closed_form() {
        // βω₀ = 1: positive closed-form argument, θ_U = 0.
        let lp = ParameterLoop::equator(1, 256);
        let warm = ModelFamily::spin(2, 1.0, 1.0);
        let got = uhlmann_phase(
            &warm,
            &lp,
            256,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        assert!(got.value().abs() < 1e-10, "got {}", got.value());

        // βω₀ = 2 arcsech(1/2): the closed-form argument is −1/Z, θ_U = π.
        let beta_c = 2.0 * (2.0f64 + 3.0f64.sqrt()).ln();
        let critical = ModelFamily::spin(2, 1.0, beta_c);
        let got_c = uhlmann_phase(
            &critical,
            &lp,
            256,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        assert!(crate::util::circle_distance(got_c.value(), PI) < 1e-9);
    }

    #[test]
    fn polar_and_connection_estimators_agree_on_spin() {
        let model = ModelFamily::spin(2, 1.0, 1.0);
        let lp = ParameterLoop::latitude(PI / 3.0, 1, 512).unwrap();
        let a = uhlmann_phase(
            &model,
            &lp,
            512,
            Estimator::ConnectionProduct(ConnectionSource::Analytic),
        )
        .unwrap();
        let b = uhlmann_phase(&model, &lp, 512, Estimator::PolarIsometry).unwrap();
        assert!(
            crate::util::circle_distance(a.value(), b.value()) < 1e-5,
            "connection {} vs polar {}",
            a.value(),
            b.value()
        );
    }

    #[test]
    fn winding_reversal_negates_phase() {
        let model = ModelFamily::boson(1.0, 2.0, 24);
        let fwd = circle(0.4, 1, 512);
        let bwd = fwd.reversed();
        let a = uhlmann_phase(&model, &fwd, 512, Estimator::default_for(&model)).unwrap();
        let b = uhlmann_phase(&model, &bwd, 512, Estimator::default_for(&model)).unwrap();
        assert!((a.value() + b.value()).abs() < 1e-8);
    }

    #[test]
    fn step_floor_is_enforced() {
        let model = ModelFamily::boson(1.0, 1.0, 16);
        let lp = circle(0.3, 1, 64);
        assert!(matches!(
            uhlmann_holonomy(&model, &lp, 32, Estimator::default_for(&model)),
            Err(HolonomyError::TooFewSteps { .. })
        ));
    }
}
