//! Synthetic coupling matrices and analytic element patterns for
//! desk-scale fixtures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::IoError;
use crate::array::{
    AngleAxis, AngleGrid, ArrayGeometry, Direction, ElementPattern, ElementPatternSet,
    ScatteringMatrix,
};

/// Distance-decay coupling model.
///
/// `S_nn = γ`, `S_nm = c0 · exp(-|r_n - r_m|/ρ) · exp(-j·k0·|r_n - r_m|)`.
/// The exponential decay makes edge elements genuinely different from the
/// interior, which is the regime where excitation-side reflection control
/// has the most room to work; very large ρ approaches uniform coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCouplingSpec {
    /// Common self-reflection coefficient γ.
    pub self_reflection: (f64, f64),
    /// Coupling amplitude c0, in [0, 1).
    pub coupling_amplitude: f64,
    /// Decay length ρ in meters.
    pub decay_length_m: f64,
}

impl SyntheticCouplingSpec {
    fn validate(&self) -> Result<(), IoError> {
        let gamma = Complex64::new(self.self_reflection.0, self.self_reflection.1);
        if !gamma.re.is_finite() || !gamma.im.is_finite() {
            return Err(IoError::BadCouplingSpec("non-finite self reflection".into()));
        }
        if !(0.0..1.0).contains(&self.coupling_amplitude) {
            return Err(IoError::BadCouplingSpec(format!(
                "coupling amplitude {} outside [0, 1)",
                self.coupling_amplitude
            )));
        }
        if !(self.decay_length_m > 0.0) {
            return Err(IoError::BadCouplingSpec(format!(
                "decay length {} must be positive",
                self.decay_length_m
            )));
        }
        Ok(())
    }
}

/// Builds the synthetic scattering matrix and verifies passivity; parameter
/// combinations with spectral norm ≥ 1 are rejected with the computed norm.
pub fn synthetic_coupling(
    geometry: &ArrayGeometry,
    spec: &SyntheticCouplingSpec,
) -> Result<ScatteringMatrix, IoError> {
    spec.validate()?;
    let n = geometry.len();
    let k0 = geometry.wavenumber();
    let gamma = Complex64::new(spec.self_reflection.0, spec.self_reflection.1);
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        entries[a * n + a] = gamma;
        for b in (a + 1)..n {
            let pa = geometry.positions()[a];
            let pb = geometry.positions()[b];
            let dist = ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2) + (pa[2] - pb[2]).powi(2))
                .sqrt();
            let value = spec.coupling_amplitude
                * (-dist / spec.decay_length_m).exp()
                * Complex64::from_polar(1.0, -k0 * dist);
            entries[a * n + b] = value;
            entries[b * n + a] = value;
        }
    }
    let matrix = ScatteringMatrix::new(n, entries)?;
    let norm = matrix.spectral_norm();
    if norm >= 1.0 {
        return Err(IoError::NotPassive { norm });
    }
    Ok(matrix)
}

/// Idealized element patterns for fixtures; identical for every element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnalyticPatternKind {
    /// `E_theta ≡ 1` everywhere.
    Isotropic,
    /// `E_theta = cosᵉ(angle from broadside)` in the forward hemisphere,
    /// zero behind it.
    Cosine { exponent: f64 },
}

/// Tabulates an analytic pattern on a `step × step` degree grid. The
/// broadside axis orients the cosine pattern (+z for planar apertures,
/// +x for azimuth-scanned linear fixtures).
pub fn analytic_patterns(
    kind: AnalyticPatternKind,
    geometry: &ArrayGeometry,
    theta_step_deg: f64,
    phi_step_deg: f64,
    broadside_axis: [f64; 3],
) -> Result<ElementPatternSet, IoError> {
    if let AnalyticPatternKind::Cosine { exponent } = kind {
        if !(exponent >= 0.0) {
            return Err(IoError::BadCouplingSpec(format!(
                "cosine exponent {exponent} must be non-negative"
            )));
        }
    }
    let axis_norm = (broadside_axis[0].powi(2)
        + broadside_axis[1].powi(2)
        + broadside_axis[2].powi(2))
    .sqrt();
    if !(axis_norm > 0.0) || !axis_norm.is_finite() {
        return Err(IoError::BadCouplingSpec("broadside axis must be nonzero".into()));
    }
    let axis = [
        broadside_axis[0] / axis_norm,
        broadside_axis[1] / axis_norm,
        broadside_axis[2] / axis_norm,
    ];

    let theta = AngleAxis::from_range(0.0, theta_step_deg, 180.0)?;
    let n_phi = (360.0 / phi_step_deg).round();
    if (n_phi * phi_step_deg - 360.0).abs() > 1e-6 || n_phi < 1.0 {
        return Err(IoError::BadCouplingSpec(format!(
            "phi step {phi_step_deg} must divide 360"
        )));
    }
    let phi = AngleAxis::new(0.0, phi_step_deg, n_phi as usize)?;
    let grid = AngleGrid::new(theta, phi)?;

    let mut e_theta = Vec::with_capacity(grid.node_count());
    for it in 0..grid.theta().count() {
        for ip in 0..grid.phi().count() {
            let dir = Direction::new(grid.theta().value(it), grid.phi().value(ip));
            let value = match kind {
                AnalyticPatternKind::Isotropic => 1.0,
                AnalyticPatternKind::Cosine { exponent } => {
                    let r = dir.unit_vector();
                    let c = r[0] * axis[0] + r[1] * axis[1] + r[2] * axis[2];
                    if c > 0.0 {
                        c.powf(exponent)
                    } else {
                        0.0
                    }
                }
            };
            e_theta.push(Complex64::new(value, 0.0));
        }
    }
    let zero = vec![Complex64::new(0.0, 0.0); e_theta.len()];
    let elements = (0..geometry.len())
        .map(|_| ElementPattern {
            e_theta: e_theta.clone(),
            e_phi: zero.clone(),
        })
        .collect();
    Ok(ElementPatternSet::new(grid, elements)?)
}
