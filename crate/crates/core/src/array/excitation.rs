//! Incident excitation sets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Direction, ModelError};

/// Feasibility class an excitation set was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityMode {
    /// Unit magnitudes, only phases are free.
    #[serde(rename = "phase-only")]
    PhaseOnly,
    /// Both magnitudes and phases are free within bounds.
    #[serde(rename = "magnitude-phase")]
    MagnitudePhase,
}

/// Incident excitation coefficients `w⁺` for one scan angle.
///
/// Weights use square-root-watt normalization: `|w⁺_n|²` is the input power
/// delivered to element n, so total input power is a plain sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSet {
    weights: Vec<Complex64>,
    scan: Direction,
    scan_index: Option<usize>,
    mode: FeasibilityMode,
}

impl ExcitationSet {
    pub fn new(
        weights: Vec<Complex64>,
        scan: Direction,
        mode: FeasibilityMode,
    ) -> Result<Self, ModelError> {
        if weights.is_empty() {
            return Err(ModelError::EmptyExcitation);
        }
        if weights
            .iter()
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(ModelError::NonFiniteExcitation);
        }
        if mode == FeasibilityMode::PhaseOnly {
            for (n, w) in weights.iter().enumerate() {
                if (w.norm() - 1.0).abs() > 1e-9 {
                    return Err(ModelError::NotPhaseOnly {
                        index: n,
                        magnitude: w.norm(),
                    });
                }
            }
        }
        Ok(Self {
            weights,
            scan,
            scan_index: None,
            mode,
        })
    }

    /// Unit-magnitude set from phases in radians.
    pub fn phase_only(phases_rad: &[f64], scan: Direction) -> Result<Self, ModelError> {
        let weights = phases_rad
            .iter()
            .map(|p| Complex64::from_polar(1.0, *p))
            .collect();
        Self::new(weights, scan, FeasibilityMode::PhaseOnly)
    }

    /// Free-magnitude set; magnitudes must still be finite.
    pub fn magnitude_phase(
        weights: Vec<Complex64>,
        scan: Direction,
    ) -> Result<Self, ModelError> {
        Self::new(weights, scan, FeasibilityMode::MagnitudePhase)
    }

    pub fn with_scan_index(mut self, q: usize) -> Self {
        self.scan_index = Some(q);
        self
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scan(&self) -> Direction {
        self.scan
    }

    pub fn scan_index(&self) -> Option<usize> {
        self.scan_index
    }

    pub fn mode(&self) -> FeasibilityMode {
        self.mode
    }

    /// Phases in radians, wrapped into [-π, π).
    pub fn phases_rad(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| {
                let p = w.arg();
                if p >= std::f64::consts::PI {
                    p - 2.0 * std::f64::consts::PI
                } else {
                    p
                }
            })
            .collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.norm()).collect()
    }
}
