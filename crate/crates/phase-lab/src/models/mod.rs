//! Parametrized model families: thermal states transported around loops,
//! analytic Uhlmann connections where closed forms exist, and closed-form
//! phase oracles.

mod boson;
mod fermion;
mod loops;
mod one_dim;
mod spin;
mod unitary;

pub use boson::{boson_displacement, BosonModel};
pub use fermion::FermionModel;
pub use loops::{LoopKind, ParameterLoop};
pub use one_dim::OneDimModel;
pub use spin::{wigner_small_d, SpinModel};
pub use unitary::UnitaryFamilyModel;

use crate::grassmann::{GrassmannError, GrassmannMatrix};
use crate::linops::{C64, ComplexMatrix, LinopsError, SpectralDecomposition};
use crate::util::principal_angle;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("loop kind incompatible with {model} model")]
    IncompatibleLoop { model: &'static str },
    #[error("Fock truncation too small: need at least {required}, got {actual}")]
    TruncationTooSmall { required: usize, actual: usize },
    #[error("model has no analytic connection")]
    NoAnalyticForm,
    #[error("no closed-form phase for this model/loop combination")]
    UnsupportedLoopForClosedForm,
    #[error("family is not cyclic: ‖exp(G) − 1‖ = {defect:.3e}")]
    NotCyclic { defect: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linops(#[from] LinopsError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

/// Full-rank thermal density matrix with its spectral decomposition cached.
///
/// Eigenvalues ascending; level `l` (energy-ordered, ground level 0) maps to
/// storage column `dim − 1 − l` because Boltzmann weights decrease with
/// energy.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    /// Build from a model-supplied spectral decomposition. The caller
    /// guarantees Hermiticity and ascending eigenvalue order.
    pub(crate) fn from_spectrum(spectrum: SpectralDecomposition) -> Self {
        let matrix = spectrum.reconstruct();
        Self { matrix, spectrum }
    }

    pub(crate) fn from_parts(matrix: ComplexMatrix, spectrum: SpectralDecomposition) -> Self {
        Self { matrix, spectrum }
    }

    /// Diagonalize an externally supplied density matrix.
    pub fn from_matrix(matrix: &ComplexMatrix) -> Result<Self, ModelError> {
        let spectrum = crate::linops::hermitian_eig(matrix)?;
        if spectrum.eigenvalues()[0] < -1e-12 {
            return Err(ModelError::InvalidParameter(format!(
                "density matrix has negative eigenvalue {:.3e}",
                spectrum.eigenvalues()[0]
            )));
        }
        Ok(Self { matrix: matrix.clone(), spectrum })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Deviation of the trace from one. Nonzero beyond roundoff only when a
    /// truncated Fock space cannot hold the full thermal weight.
    pub fn trace_defect(&self) -> f64 {
        (self.trace() - C64::new(1.0, 0.0)).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.eigenvalues()[0]
    }

    /// Hermitian square root `V diag(√λ) V†`.
    pub fn sqrt_matrix(&self) -> ComplexMatrix {
        self.spectrum.map_eigenvalues(|l| l.max(0.0).sqrt())
    }

    /// Storage column of the energy-ordered level (ground level 0 holds the
    /// largest weight).
    pub fn level_column_index(&self, level: usize) -> usize {
        self.dim() - 1 - level
    }

    pub fn level_eigvec(&self, level: usize) -> Vec<C64> {
        self.spectrum.eigenvector(self.level_column_index(level))
    }

    pub fn level_weight(&self, level: usize) -> f64 {
        self.spectrum.eigenvalues()[self.level_column_index(level)]
    }
}

/// State of a model at one loop point: a density matrix, or its
/// Grassmann-valued counterpart for the fermionic family.
#[derive(Clone, Debug)]
pub enum StateAt {
    Density(DensityMatrix),
    Grassmann(GrassmannMatrix),
}

impl StateAt {
    pub fn density(&self) -> Option<&DensityMatrix> {
        match self {
            StateAt::Density(d) => Some(d),
            StateAt::Grassmann(_) => None,
        }
    }

    pub fn grassmann(&self) -> Option<&GrassmannMatrix> {
        match self {
            StateAt::Grassmann(g) => Some(g),
            StateAt::Density(_) => None,
        }
    }
}

/// Connection contracted with the loop velocity: an anti-Hermitian generator
/// per unit t, or its Grassmann-valued counterpart.
#[derive(Clone, Debug)]
pub enum ConnectionAt {
    Matrix(ComplexMatrix),
    Grassmann(GrassmannMatrix),
}

/// A geometric phase: an ordinary angle, or a Grassmann-even value whose
/// geometric content sits in the ζ̄ζ coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseValue {
    Angle(f64),
    Soul { body_arg: f64, soul: f64 },
}

impl PhaseValue {
    /// The headline number: the angle, or the soul coefficient for
    /// Grassmann-valued phases.
    pub fn value(&self) -> f64 {
        match self {
            PhaseValue::Angle(a) => *a,
            PhaseValue::Soul { soul, .. } => *soul,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            PhaseValue::Angle(a) => Some(*a),
            _ => None,
        }
    }
}

/// Closed-form phases for one (model, loop, level) triple, branch-reduced
/// to `(−π, π]`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseClosedForm {
    pub theta_u: PhaseValue,
    pub theta_b: PhaseValue,
}

/// The model zoo.
#[derive(Clone, Debug)]
pub enum ModelFamily {
    Boson(BosonModel),
    Fermion(FermionModel),
    Spin(SpinModel),
    Unitary(UnitaryFamilyModel),
    OneDim(OneDimModel),
}

impl ModelFamily {
    pub fn boson(omega: f64, beta: f64, n_cut: usize) -> Self {
        ModelFamily::Boson(BosonModel::new(omega, beta, n_cut))
    }

    pub fn fermion(omega: f64, beta: f64) -> Self {
        ModelFamily::Fermion(FermionModel::new(omega, beta))
    }

    pub fn spin(twice_j: u32, omega0: f64, beta: f64) -> Self {
        ModelFamily::Spin(SpinModel::new(twice_j, omega0, beta))
    }

    pub fn unitary_family(
        generator: ComplexMatrix,
        rho0: DensityMatrix,
    ) -> Result<Self, ModelError> {
        Ok(ModelFamily::Unitary(UnitaryFamilyModel::new(generator, rho0)?))
    }

    pub fn one_dim() -> Self {
        ModelFamily::OneDim(OneDimModel)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelFamily::Boson(_) => "boson",
            ModelFamily::Fermion(_) => "fermion",
            ModelFamily::Spin(_) => "spin",
            ModelFamily::Unitary(_) => "unitary_family",
            ModelFamily::OneDim(_) => "one_dim",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelFamily::Boson(m) => m.dim(),
            ModelFamily::Fermion(_) => 2,
            ModelFamily::Spin(m) => m.dim(),
            ModelFamily::Unitary(m) => m.dim(),
            ModelFamily::OneDim(_) => 1,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            ModelFamily::Boson(m) => Some(m.beta),
            ModelFamily::Fermion(m) => Some(m.beta),
            ModelFamily::Spin(m) => Some(m.beta),
            ModelFamily::Unitary(m) => m.beta(),
            ModelFamily::OneDim(_) => None,
        }
    }

    /// Same family at a different inverse temperature. Unitary families
    /// re-weight when built from a thermal recipe; the one-dimensional model
    /// has no thermal content.
    pub fn with_beta(&self, beta: f64) -> Self {
        match self {
            ModelFamily::Boson(m) => ModelFamily::Boson(m.with_beta(beta)),
            ModelFamily::Fermion(m) => ModelFamily::Fermion(FermionModel::new(m.omega, beta)),
            ModelFamily::Spin(m) => ModelFamily::Spin(m.with_beta(beta)),
            ModelFamily::Unitary(m) => ModelFamily::Unitary(m.with_beta(beta)),
            ModelFamily::OneDim(_) => self.clone(),
        }
    }

    pub fn check_loop(&self, lp: &ParameterLoop) -> Result<(), ModelError> {
        let ok = match self {
            ModelFamily::Boson(_) | ModelFamily::Fermion(_) | ModelFamily::OneDim(_) => {
                lp.is_planar()
            }
            ModelFamily::Spin(_) => lp.is_spherical(),
            ModelFamily::Unitary(_) => true,
        };
        if ok {
            if let ModelFamily::Boson(m) = self {
                m.check_truncation(lp)?;
            }
            Ok(())
        } else {
            Err(ModelError::IncompatibleLoop { model: self.kind_name() })
        }
    }

    /// Density matrix (or Grassmann density) at loop parameter `t`.
    pub fn density_at(&self, lp: &ParameterLoop, t: f64) -> Result<StateAt, ModelError> {
        self.check_loop(lp)?;
        match self {
            ModelFamily::Boson(m) => Ok(StateAt::Density(m.density_at(lp, t)?)),
            ModelFamily::Fermion(m) => Ok(StateAt::Grassmann(m.density_at(lp, t)?)),
            ModelFamily::Spin(m) => Ok(StateAt::Density(m.density_at(lp, t)?)),
            ModelFamily::Unitary(m) => Ok(StateAt::Density(m.density_at(t)?)),
            ModelFamily::OneDim(_) => {
                Ok(StateAt::Density(DensityMatrix::from_parts(
                    ComplexMatrix::identity(1),
                    SpectralDecomposition::new_unchecked(vec![1.0], ComplexMatrix::identity(1)),
                )))
            }
        }
    }

    /// Hermitian square root of the density matrix at `t` (complex-valued
    /// families only).
    pub fn sqrt_density_at(
        &self,
        lp: &ParameterLoop,
        t: f64,
    ) -> Result<ComplexMatrix, ModelError> {
        match self {
            ModelFamily::Boson(m) => m.sqrt_density_at(lp, t),
            ModelFamily::Spin(m) => m.sqrt_density_at(lp, t),
            ModelFamily::Unitary(m) => m.sqrt_density_at(t),
            ModelFamily::OneDim(_) => Ok(ComplexMatrix::identity(1)),
            ModelFamily::Fermion(_) => Err(ModelError::IncompatibleLoop { model: "fermion" }),
        }
    }

    pub fn has_analytic_connection(&self) -> bool {
        matches!(self, ModelFamily::Boson(_) | ModelFamily::Fermion(_) | ModelFamily::Spin(_))
    }

    /// Analytic Uhlmann connection contracted with the loop velocity.
    pub fn analytic_uhlmann_connection(
        &self,
        lp: &ParameterLoop,
        t: f64,
    ) -> Result<ConnectionAt, ModelError> {
        self.check_loop(lp)?;
        match self {
            ModelFamily::Boson(m) => Ok(ConnectionAt::Matrix(m.connection_at(lp, t)?)),
            ModelFamily::Fermion(m) => Ok(ConnectionAt::Grassmann(m.connection_at(lp, t)?)),
            ModelFamily::Spin(m) => Ok(ConnectionAt::Matrix(m.connection_at(lp, t)?)),
            _ => Err(ModelError::NoAnalyticForm),
        }
    }

    /// Closed-form Uhlmann and Berry phases where the path ordering is
    /// exactly solvable.
    pub fn closed_form_phase(
        &self,
        lp: &ParameterLoop,
        level: usize,
    ) -> Result<PhaseClosedForm, ModelError> {
        self.check_loop(lp)?;
        match self {
            ModelFamily::Boson(m) => m.closed_form_phase(lp),
            ModelFamily::Fermion(m) => m.closed_form_phase(lp),
            ModelFamily::Spin(m) => m.closed_form_phase(lp, level),
            _ => Err(ModelError::UnsupportedLoopForClosedForm),
        }
    }

    /// Closed-form Berry phase of one level, available more broadly than the
    /// full closed-form pair.
    pub fn berry_phase_closed(
        &self,
        lp: &ParameterLoop,
        level: usize,
    ) -> Result<PhaseValue, ModelError> {
        self.check_loop(lp)?;
        match self {
            ModelFamily::Boson(_) | ModelFamily::OneDim(_) => {
                let area = lp.signed_area().ok_or(ModelError::UnsupportedLoopForClosedForm)?;
                Ok(PhaseValue::Angle(principal_angle(-2.0 * area)))
            }
            ModelFamily::Fermion(_) => {
                let area = lp.signed_area().ok_or(ModelError::UnsupportedLoopForClosedForm)?;
                Ok(PhaseValue::Soul { body_arg: 0.0, soul: -2.0 * area })
            }
            ModelFamily::Spin(m) => m.berry_phase_closed(lp, level),
            ModelFamily::Unitary(m) => m.berry_phase_closed(level),
        }
    }

    /// Eigenvector of the energy-ordered `level` at loop parameter `t`,
    /// in the gauge induced by the model construction.
    pub fn level_eigvec(
        &self,
        lp: &ParameterLoop,
        t: f64,
        level: usize,
    ) -> Result<Vec<C64>, ModelError> {
        self.check_loop(lp)?;
        match self {
            ModelFamily::Boson(m) => m.level_eigvec(lp, t, level),
            ModelFamily::Spin(m) => m.level_eigvec(lp, t, level),
            ModelFamily::Unitary(m) => m.level_eigvec(t, level),
            ModelFamily::OneDim(_) | ModelFamily::Fermion(_) => {
                Err(ModelError::IncompatibleLoop { model: self.kind_name() })
            }
        }
    }

    /// Thermal weights ordered by level (ground first). Loop-independent for
    /// every family in the zoo.
    pub fn level_weights(&self) -> Vec<f64> {
        match self {
            ModelFamily::Boson(m) => m.fock_weights(),
            ModelFamily::Fermion(m) => m.weights().to_vec(),
            ModelFamily::Spin(m) => m.weights_by_level(),
            ModelFamily::Unitary(m) => {
                let d = m.rho0().dim();
                (0..d).map(|l| m.rho0().level_weight(l)).collect()
            }
            ModelFamily::OneDim(_) => vec![1.0],
        }
    }
}
