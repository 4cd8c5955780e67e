//! File formats and synthetic fixtures.

mod pattern_file;
mod synthetic;
mod touchstone;

pub use pattern_file::{emit_pattern_file, parse_pattern_file, PatternDocument};
pub use synthetic::{analytic_patterns, synthetic_coupling, AnalyticPatternKind, SyntheticCouplingSpec};
pub use touchstone::{FrequencyUnit, NumberFormat, TouchstoneDocument};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("port count mismatch: file has {file_ports}, expected {expected}")]
    PortMismatch { file_ports: usize, expected: usize },
    #[error("no frequency points in document")]
    NoFrequencies,
    #[error("pattern grid hole: first missing node element {element} theta {theta_deg} phi {phi_deg}")]
    GridHole { element: usize, theta_deg: f64, phi_deg: f64 },
    #[error("duplicate pattern node: element {element} theta {theta_deg} phi {phi_deg}")]
    DuplicateNode { element: usize, theta_deg: f64, phi_deg: f64 },
    #[error("synthetic coupling is not passive: spectral norm {norm} >= 1")]
    NotPassive { norm: f64 },
    #[error("invalid synthetic coupling spec: {0}")]
    BadCouplingSpec(String),
    #[error(transparent)]
    Model(#[from] crate::array::ModelError),
}
