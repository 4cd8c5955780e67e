//! Array geometry and angular conventions.
//!
//! Angles follow the physics convention: `theta` is measured from the +z
//! axis, `phi` from +x towards +y. All public interfaces speak degrees;
//! radians only appear inside computations.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Physical constants entering the radiated-power expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicsConstants {
    /// Wave impedance ν of the propagation medium, ohms.
    pub impedance_ohms: f64,
    /// Speed of light, meters per second.
    pub speed_of_light_m_s: f64,
}

impl Default for PhysicsConstants {
    fn default() -> Self {
        Self {
            impedance_ohms: 376.730,
            speed_of_light_m_s: 299_792_458.0,
        }
    }
}

impl PhysicsConstants {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.impedance_ohms > 0.0) || !(self.speed_of_light_m_s > 0.0) {
            return Err(ModelError::InvalidConstants);
        }
        Ok(())
    }
}

/// A far-field direction `(theta, phi)` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl Direction {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Self {
        Self { theta_deg, phi_deg }
    }

    /// Folds the angles into `theta ∈ [0°, 180°]`, `phi ∈ [0°, 360°)`.
    ///
    /// Signed elevations such as `(-75°, 0°)` denote the mirrored direction
    /// `(75°, 180°)`; lookups into tabulated patterns always canonicalize
    /// first while the user-facing scan coordinates stay as configured.
    pub fn canonical(&self) -> Direction {
        let mut theta = self.theta_deg.rem_euclid(360.0);
        let mut phi = self.phi_deg;
        if theta > 180.0 {
            theta = 360.0 - theta;
            phi += 180.0;
        }
        Direction::new(theta, phi.rem_euclid(360.0))
    }

    /// Unit vector (x, y, z) pointing along the direction.
    pub fn unit_vector(&self) -> [f64; 3] {
        let theta = self.theta_deg.to_radians();
        let phi = self.phi_deg.to_radians();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(theta {} deg, phi {} deg)", self.theta_deg, self.phi_deg)
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Element positions plus the carrier that fixes the free-space wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions_m: Vec<[f64; 3]>,
    frequency_hz: f64,
    wavenumber: f64,
}

impl ArrayGeometry {
    /// Builds a geometry from explicit element positions in meters.
    pub fn new(
        positions_m: Vec<[f64; 3]>,
        frequency_hz: f64,
        constants: &PhysicsConstants,
    ) -> Result<Self, ModelError> {
        constants.validate()?;
        if positions_m.is_empty() {
            return Err(ModelError::EmptyGeometry);
        }
        if positions_m
            .iter()
            .any(|p| p.iter().any(|v| !v.is_finite()))
        {
            return Err(ModelError::NonFinitePosition);
        }
        if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
            return Err(ModelError::InvalidFrequency { frequency_hz });
        }
        let wavenumber = 2.0 * std::f64::consts::PI * frequency_hz / constants.speed_of_light_m_s;
        Ok(Self {
            positions_m,
            frequency_hz,
            wavenumber,
        })
    }

    /// Uniform linear array along the y axis, centered on the origin.
    pub fn linear(
        count: usize,
        spacing_m: f64,
        frequency_hz: f64,
        constants: &PhysicsConstants,
    ) -> Result<Self, ModelError> {
        let mid = (count as f64 - 1.0) / 2.0;
        let positions = (0..count)
            .map(|n| [0.0, (n as f64 - mid) * spacing_m, 0.0])
            .collect();
        Self::new(positions, frequency_hz, constants)
    }

    /// Uniform planar lattice in the xy plane, centered on the origin.
    /// Elements are ordered row-major with x varying fastest.
    pub fn planar(
        nx: usize,
        ny: usize,
        dx_m: f64,
        dy_m: f64,
        frequency_hz: f64,
        constants: &PhysicsConstants,
    ) -> Result<Self, ModelError> {
        let mx = (nx as f64 - 1.0) / 2.0;
        let my = (ny as f64 - 1.0) / 2.0;
        let mut positions = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                positions.push([(ix as f64 - mx) * dx_m, (iy as f64 - my) * dy_m, 0.0]);
            }
        }
        Self::new(positions, frequency_hz, constants)
    }

    pub fn len(&self) -> usize {
        self.positions_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_m.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions_m
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    /// Free-space wavenumber k0 = 2πf/c, radians per meter.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn wavelength_m(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavenumber
    }
}
