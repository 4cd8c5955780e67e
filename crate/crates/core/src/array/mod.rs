//! Finite-array physics: geometry, coupling, excitations, far fields and
//! power bookkeeping.

mod excitation;
mod geometry;
mod pattern;
mod power;
mod scattering;

pub use excitation::{ExcitationSet, FeasibilityMode};
pub use geometry::{ArrayGeometry, Direction, PhysicsConstants};
pub use pattern::{AngleAxis, AngleGrid, ElementPattern, ElementPatternSet};
pub use power::{input_power, ElementIsolation, IsolationReport};
pub use scattering::{PassivityCheck, ScatteringMatrix};

pub(crate) use geometry::dot3;
pub(crate) use power::coherent_power_density;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("geometry needs at least one element")]
    EmptyGeometry,
    #[error("element position is not finite")]
    NonFinitePosition,
    #[error("invalid carrier frequency {frequency_hz} Hz")]
    InvalidFrequency { frequency_hz: f64 },
    #[error("physics constants must be strictly positive")]
    InvalidConstants,
    #[error("scattering matrix of order {order} cannot hold {entries} entries")]
    BadMatrixShape { order: usize, entries: usize },
    #[error("scattering matrix entry is not finite")]
    NonFiniteMatrixEntry,
    #[error("excitation set is empty")]
    EmptyExcitation,
    #[error("excitation weight is not finite")]
    NonFiniteExcitation,
    #[error("phase-only excitation has |w+_{index}| = {magnitude}, expected 1")]
    NotPhaseOnly { index: usize, magnitude: f64 },
    #[error("dimension mismatch: expected {expected} elements, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("active reflection undefined: |w+_{index}| = 0")]
    SingularExcitation { index: usize },
    #[error("zero input power")]
    ZeroInputPower,
    #[error("direction (theta {theta_deg} deg, phi {phi_deg} deg) outside pattern coverage")]
    OutsideCoverage { theta_deg: f64, phi_deg: f64 },
    #[error("invalid angular axis start {start_deg} step {step_deg} count {count}")]
    BadAxis {
        start_deg: f64,
        step_deg: f64,
        count: usize,
    },
    #[error("theta grid covers [{start_deg}, {stop_deg}] deg, must cover [0, 180]")]
    ThetaCoverage { start_deg: f64, stop_deg: f64 },
    #[error("pattern set has no elements")]
    EmptyPatternSet,
    #[error(
        "element {element} pattern has {actual_theta}/{actual_phi} nodes, grid expects {expected}"
    )]
    PatternSizeMismatch {
        element: usize,
        expected: usize,
        actual_theta: usize,
        actual_phi: usize,
    },
    #[error("element {element} pattern contains non-finite values")]
    NonFinitePattern { element: usize },
    #[error("quadrature step {step_deg} deg must be in (0, 1] and divide 180")]
    InvalidQuadratureStep { step_deg: f64 },
    #[error("zero power density toward the scan direction")]
    ZeroPowerDensity,
}

/// The immutable physics context: geometry, scattering matrix, embedded
/// element patterns and constants. Every operation on it is a pure function
/// of its inputs, so models are freely shared across threads.
#[derive(Debug, Clone)]
pub struct ArrayModel {
    geometry: ArrayGeometry,
    scattering: ScatteringMatrix,
    patterns: ElementPatternSet,
    constants: PhysicsConstants,
}

impl ArrayModel {
    pub fn new(
        geometry: ArrayGeometry,
        scattering: ScatteringMatrix,
        patterns: ElementPatternSet,
        constants: PhysicsConstants,
    ) -> Result<Self, ModelError> {
        constants.validate()?;
        if scattering.order() != geometry.len() {
            return Err(ModelError::DimensionMismatch {
                expected: geometry.len(),
                actual: scattering.order(),
            });
        }
        if patterns.len() != geometry.len() {
            return Err(ModelError::DimensionMismatch {
                expected: geometry.len(),
                actual: patterns.len(),
            });
        }
        Ok(Self {
            geometry,
            scattering,
            patterns,
            constants,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn scattering(&self) -> &ScatteringMatrix {
        &self.scattering
    }

    pub fn patterns(&self) -> &ElementPatternSet {
        &self.patterns
    }

    pub fn constants(&self) -> &PhysicsConstants {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.geometry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_empty()
    }
}
