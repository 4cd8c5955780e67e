//! Beam quality metrics on a declared evaluation grid.

use serde::{Deserialize, Serialize};

use super::SynthesisError;
use crate::array::{coherent_power_density, input_power, ArrayModel, Direction, ExcitationSet};

/// Rectangular (θ, φ) evaluation grid; both ranges are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsGrid {
    pub theta_start_deg: f64,
    pub theta_step_deg: f64,
    pub theta_stop_deg: f64,
    pub phi_start_deg: f64,
    pub phi_step_deg: f64,
    pub phi_stop_deg: f64,
}

impl Default for MetricsGrid {
    fn default() -> Self {
        Self {
            theta_start_deg: 0.0,
            theta_step_deg: 1.0,
            theta_stop_deg: 180.0,
            phi_start_deg: 0.0,
            phi_step_deg: 1.0,
            phi_stop_deg: 359.0,
        }
    }
}

impl MetricsGrid {
    fn axis(start: f64, step: f64, stop: f64) -> Result<Vec<f64>, SynthesisError> {
        if !(step > 0.0) || stop < start {
            return Err(SynthesisError::InvalidMetricsGrid(format!(
                "bad axis {start}:{step}:{stop}"
            )));
        }
        let count = ((stop - start) / step).floor() as usize + 1;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    }

    pub fn theta_values(&self) -> Result<Vec<f64>, SynthesisError> {
        Self::axis(self.theta_start_deg, self.theta_step_deg, self.theta_stop_deg)
    }

    pub fn phi_values(&self) -> Result<Vec<f64>, SynthesisError> {
        Self::axis(self.phi_start_deg, self.phi_step_deg, self.phi_stop_deg)
    }
}

/// Metrics of one realized beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamMetrics {
    /// Normalized sidelobe level in dB; −inf when the main lobe covers the
    /// whole evaluation grid.
    pub sll_db: f64,
    /// Array gain `4π·maxψ/P_in` in dBi.
    pub gain_dbi: f64,
    /// Scan angle error: commanded θ minus realized beam-peak θ, degrees.
    pub scan_error_deg: f64,
    pub peak: Direction,
    pub peak_psi_w_sr: f64,
}

/// Evaluates ψ over the grid and derives SLL, gain and pointing error.
///
/// The main-lobe region is the rectangle around the global peak bounded by
/// the first local minimum along each of the four grid directions; on flat
/// patterns (single isotropic element) the sidelobe level degenerates to
/// the −inf sentinel and the pointing error to zero.
pub fn beam_metrics(
    model: &ArrayModel,
    excitation: &ExcitationSet,
    scan: Direction,
    grid: &MetricsGrid,
) -> Result<BeamMetrics, SynthesisError> {
    let thetas = grid.theta_values()?;
    let phis = grid.phi_values()?;
    let p_in = input_power(excitation);
    if p_in == 0.0 {
        return Err(SynthesisError::Model(
            crate::array::ModelError::ZeroInputPower,
        ));
    }

    let total = model.scattering().total_excitations(excitation)?;
    let k0 = model.geometry().wavenumber();
    let nu = model.constants().impedance_ohms;

    let rows = thetas.len();
    let cols = phis.len();
    let mut psi = vec![0.0f64; rows * cols];
    let mut peak_val = f64::NEG_INFINITY;
    let mut min_val = f64::INFINITY;
    let mut peak_rc = (0usize, 0usize);
    for (r, theta) in thetas.iter().enumerate() {
        for (c, phi) in phis.iter().enumerate() {
            let dir = Direction::new(*theta, *phi);
            let (tt, tp) = model.direction_terms(dir)?;
            let v = coherent_power_density(k0, nu, &total, &tt, &tp);
            psi[r * cols + c] = v;
            if v > peak_val {
                peak_val = v;
                peak_rc = (r, c);
            }
            min_val = min_val.min(v);
        }
    }

    let gain_dbi = 10.0 * (4.0 * std::f64::consts::PI * peak_val / p_in).log10();

    // flat pattern: no resolvable lobe structure
    if peak_val - min_val <= 1e-12 * peak_val.abs().max(f64::MIN_POSITIVE) {
        return Ok(BeamMetrics {
            sll_db: f64::NEG_INFINITY,
            gain_dbi,
            scan_error_deg: 0.0,
            peak: scan,
            peak_psi_w_sr: peak_val,
        });
    }

    let (pr, pc) = peak_rc;
    let at = |r: usize, c: usize| psi[r * cols + c];

    // walk from the peak while the cut is strictly decreasing
    let mut r_lo = pr;
    while r_lo > 0 && at(r_lo - 1, pc) < at(r_lo, pc) {
        r_lo -= 1;
    }
    let mut r_hi = pr;
    while r_hi + 1 < rows && at(r_hi + 1, pc) < at(r_hi, pc) {
        r_hi += 1;
    }
    let mut c_lo = pc;
    while c_lo > 0 && at(pr, c_lo - 1) < at(pr, c_lo) {
        c_lo -= 1;
    }
    let mut c_hi = pc;
    while c_hi + 1 < cols && at(pr, c_hi + 1) < at(pr, c_hi) {
        c_hi += 1;
    }

    let mut side_max: Option<f64> = None;
    for r in 0..rows {
        for c in 0..cols {
            if r >= r_lo && r <= r_hi && c >= c_lo && c <= c_hi {
                continue;
            }
            let v = at(r, c);
            side_max = Some(side_max.map_or(v, |m: f64| m.max(v)));
        }
    }
    let sll_db = match side_max {
        Some(v) if v > 0.0 => 10.0 * (v / peak_val).log10(),
        _ => f64::NEG_INFINITY,
    };

    let peak = Direction::new(thetas[pr], phis[pc]);
    Ok(BeamMetrics {
        sll_db,
        gain_dbi,
        scan_error_deg: scan.theta_deg - peak.theta_deg,
        peak,
        peak_psi_w_sr: peak_val,
    })
}
