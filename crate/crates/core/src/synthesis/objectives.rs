//! The two synthesis objectives and their decision-space encoding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SynthesisError;
use crate::array::{
    coherent_power_density, ArrayModel, Direction, ExcitationSet, FeasibilityMode, ModelError,
};
use crate::baseline::wrap_phase;
use crate::moea::{DecisionSpace, EvalFailure, MoeaProblem, VariableKind};

/// Feasibility set for the excitation coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilitySpec {
    pub mode: FeasibilityMode,
    /// Magnitude bounds, used only in magnitude-and-phase mode.
    pub magnitude_bounds: (f64, f64),
    /// Optional phase quantization step in degrees; must divide 360.
    pub phase_quantization_deg: Option<f64>,
}

impl FeasibilitySpec {
    pub fn phase_only() -> Self {
        Self {
            mode: FeasibilityMode::PhaseOnly,
            magnitude_bounds: (1.0, 1.0),
            phase_quantization_deg: None,
        }
    }

    pub fn magnitude_phase(lo: f64, hi: f64) -> Self {
        Self {
            mode: FeasibilityMode::MagnitudePhase,
            magnitude_bounds: (lo, hi),
            phase_quantization_deg: None,
        }
    }

    pub fn with_phase_quantization(mut self, step_deg: f64) -> Self {
        self.phase_quantization_deg = Some(step_deg);
        self
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if let Some(step) = self.phase_quantization_deg {
            if !(step > 0.0) {
                return Err(SynthesisError::InvalidFeasibility(format!(
                    "phase quantization step {step} must be positive"
                )));
            }
            let n = (360.0 / step).round();
            if n < 1.0 || (n * step - 360.0).abs() > 1e-9 {
                return Err(SynthesisError::InvalidFeasibility(format!(
                    "phase quantization step {step} does not divide 360"
                )));
            }
        }
        if self.mode == FeasibilityMode::MagnitudePhase {
            let (lo, hi) = self.magnitude_bounds;
            if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo || !(hi > 0.0) {
                return Err(SynthesisError::InvalidFeasibility(format!(
                    "magnitude bounds [{lo}, {hi}] invalid"
                )));
            }
        }
        Ok(())
    }

    pub fn n_vars(&self, elements: usize) -> usize {
        match self.mode {
            FeasibilityMode::PhaseOnly => elements,
            FeasibilityMode::MagnitudePhase => 2 * elements,
        }
    }

    /// Decision space: N circular phases, with N leading magnitude
    /// variables in magnitude-and-phase mode.
    pub fn space(&self, elements: usize) -> Result<DecisionSpace, SynthesisError> {
        self.validate()?;
        let mut vars = Vec::with_capacity(self.n_vars(elements));
        if self.mode == FeasibilityMode::MagnitudePhase {
            let (lo, hi) = self.magnitude_bounds;
            vars.extend(std::iter::repeat(VariableKind::Bounded { lo, hi }).take(elements));
        }
        vars.extend(std::iter::repeat(VariableKind::Circular).take(elements));
        DecisionSpace::new(vars).map_err(|e| SynthesisError::InvalidFeasibility(e.to_string()))
    }

    /// Snaps phase variables to the quantization lattice, if any.
    pub fn repair(&self, elements: usize, x: &mut [f64]) {
        if let Some(step_deg) = self.phase_quantization_deg {
            let step = step_deg.to_radians();
            let offset = x.len() - elements;
            for xi in &mut x[offset..] {
                *xi = wrap_phase((*xi / step).round() * step);
            }
        }
    }

    /// Decision vector → excitation weights.
    pub fn decode(&self, x: &[f64], scan: Direction) -> Result<ExcitationSet, ModelError> {
        match self.mode {
            FeasibilityMode::PhaseOnly => ExcitationSet::phase_only(x, scan),
            FeasibilityMode::MagnitudePhase => {
                let n = x.len() / 2;
                let weights = (0..n)
                    .map(|i| Complex64::from_polar(x[i], x[n + i]))
                    .collect();
                ExcitationSet::magnitude_phase(weights, scan)
            }
        }
    }

    /// Excitation weights → decision vector (phases wrapped to [-π, π)).
    pub fn encode(&self, excitation: &ExcitationSet) -> Vec<f64> {
        match self.mode {
            FeasibilityMode::PhaseOnly => excitation.phases_rad(),
            FeasibilityMode::MagnitudePhase => {
                let mut x = excitation.magnitudes();
                x.extend(excitation.phases_rad());
                x
            }
        }
    }
}

/// First objective `Φ_REFL`: the total reflected power fraction toward the
/// scan angle.
pub fn phi_refl(model: &ArrayModel, excitation: &ExcitationSet) -> Result<f64, ModelError> {
    model.scattering().reflected_power_fraction(excitation)
}

/// Second objective `Φ_RAD`: inverse of the power density radiated along
/// the scan direction.
pub fn phi_rad(
    model: &ArrayModel,
    excitation: &ExcitationSet,
    scan: Direction,
) -> Result<f64, ModelError> {
    let psi = model.power_density(excitation, scan)?;
    if psi <= 0.0 {
        return Err(ModelError::ZeroPowerDensity);
    }
    Ok(1.0 / psi)
}

/// One scan angle wired as a two-objective minimization problem.
///
/// The per-element propagation phases and interpolated patterns toward the
/// scan direction are cached at construction, leaving one matrix-vector
/// product and two dot products per evaluation.
pub struct ScanProblem<'m> {
    model: &'m ArrayModel,
    scan: Direction,
    feasibility: FeasibilitySpec,
    space: DecisionSpace,
    terms_theta: Vec<Complex64>,
    terms_phi: Vec<Complex64>,
}

impl<'m> ScanProblem<'m> {
    pub fn new(
        model: &'m ArrayModel,
        scan: Direction,
        feasibility: FeasibilitySpec,
    ) -> Result<Self, SynthesisError> {
        feasibility.validate()?;
        let space = feasibility.space(model.len())?;
        let (terms_theta, terms_phi) = model.direction_terms(scan)?;
        Ok(Self {
            model,
            scan,
            feasibility,
            space,
            terms_theta,
            terms_phi,
        })
    }

    pub fn scan(&self) -> Direction {
        self.scan
    }

    pub fn feasibility(&self) -> &FeasibilitySpec {
        &self.feasibility
    }

    pub fn decode(&self, x: &[f64]) -> Result<ExcitationSet, ModelError> {
        self.feasibility.decode(x, self.scan)
    }

    pub fn encode(&self, excitation: &ExcitationSet) -> Vec<f64> {
        self.feasibility.encode(excitation)
    }

    /// `[Φ_REFL, Φ_RAD]` for raw weights through the cached scan terms.
    pub fn evaluate_weights(&self, weights: &[Complex64]) -> Result<[f64; 2], ModelError> {
        let scattering = self.model.scattering();
        let zeta = scattering.zeta_of_weights(weights)?;
        let total = scattering.total_of_weights(weights);
        let psi = coherent_power_density(
            self.model.geometry().wavenumber(),
            self.model.constants().impedance_ohms,
            &total,
            &self.terms_theta,
            &self.terms_phi,
        );
        if psi <= 0.0 {
            return Err(ModelError::ZeroPowerDensity);
        }
        Ok([zeta, 1.0 / psi])
    }
}

impl MoeaProblem for ScanProblem<'_> {
    fn space(&self) -> &DecisionSpace {
        &self.space
    }

    fn repair(&self, x: &mut [f64]) {
        self.feasibility.repair(self.model.len(), x);
    }

    fn evaluate(&self, x: &[f64]) -> Result<[f64; 2], EvalFailure> {
        let excitation = self
            .feasibility
            .decode(x, self.scan)
            .map_err(|e| EvalFailure(e.to_string()))?;
        self.evaluate_weights(excitation.weights())
            .map_err(|e| EvalFailure(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{ArrayGeometry, PhysicsConstants, ScatteringMatrix};
    use crate::io::{analytic_patterns, AnalyticPatternKind};
    use approx::assert_relative_eq;

    fn model(n: usize) -> ArrayModel {
        let constants = PhysicsConstants::default();
        let lambda = constants.speed_of_light_m_s / 2.0e9;
        let geometry = ArrayGeometry::linear(n, 0.47 * lambda, 2.0e9, &constants).unwrap();
        let patterns = analytic_patterns(
            AnalyticPatternKind::Isotropic,
            &geometry,
            2.0,
            2.0,
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        ArrayModel::new(geometry, ScatteringMatrix::zeros(n), patterns, constants).unwrap()
    }

    #[test]
    fn phi_refl_matches_fraction() {
        let m = model(2);
        let e = ExcitationSet::phase_only(&[0.0, 0.0], Direction::new(90.0, 0.0)).unwrap();
        assert_relative_eq!(phi_refl(&m, &e).unwrap(), 0.0);
    }

    #[test]
    fn phi_rad_inverse_of_density() {
        let m = model(2);
        let scan = Direction::new(90.0, 20.0);
        let e = crate::baseline::std_weights(m.geometry(), scan).unwrap();
        let psi = m.power_density(&e, scan).unwrap();
        assert_relative_eq!(phi_rad(&m, &e, scan).unwrap(), 1.0 / psi, max_relative = 1e-15);
        // 34.6 dBW/sr corresponds to about 3.47e-4
        let psi_db = 34.6_f64;
        let phi = 1.0 / 10f64.powf(psi_db / 10.0);
        assert_relative_eq!(phi, 3.467e-4, epsilon = 1e-6);
    }

    #[test]
    fn phi_rad_scales_inversely_with_power() {
        let m = model(2);
        let scan = Direction::new(90.0, 0.0);
        let unit = ExcitationSet::phase_only(&[0.0, 0.0], scan).unwrap();
        let doubled = ExcitationSet::magnitude_phase(
            vec![Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)],
            scan,
        )
        .unwrap();
        let a = phi_rad(&m, &unit, scan).unwrap();
        let b = phi_rad(&m, &doubled, scan).unwrap();
        assert_relative_eq!(a / b, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn scan_problem_matches_public_ops() {
        let m = model(3);
        let scan = Direction::new(90.0, 35.0);
        let p = ScanProblem::new(&m, scan, FeasibilitySpec::phase_only()).unwrap();
        let e = crate::baseline::std_weights(m.geometry(), scan).unwrap();
        let f = p.evaluate_weights(e.weights()).unwrap();
        assert_relative_eq!(f[0], phi_refl(&m, &e).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(f[1], phi_rad(&m, &e, scan).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn encode_decode_roundtrip_po() {
        let spec = FeasibilitySpec::phase_only();
        let scan = Direction::new(90.0, 10.0);
        let e = ExcitationSet::phase_only(&[0.3, -1.2, 2.9], scan).unwrap();
        let x = spec.encode(&e);
        let back = spec.decode(&x, scan).unwrap();
        for (a, b) in e.weights().iter().zip(back.weights()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn encode_decode_roundtrip_mp() {
        let spec = FeasibilitySpec::magnitude_phase(0.2, 1.0);
        let scan = Direction::new(90.0, 10.0);
        let e = ExcitationSet::magnitude_phase(
            vec![Complex64::from_polar(0.5, 0.3), Complex64::from_polar(0.9, -2.0)],
            scan,
        )
        .unwrap();
        let x = spec.encode(&e);
        assert_eq!(x.len(), 4);
        let back = spec.decode(&x, scan).unwrap();
        for (a, b) in e.weights().iter().zip(back.weights()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn quantization_snaps_phases() {
        let spec = FeasibilitySpec::phase_only().with_phase_quantization(45.0);
        spec.validate().unwrap();
        let mut x = vec![0.1, 0.8, -0.4];
        spec.repair(3, &mut x);
        let step = 45f64.to_radians();
        for xi in &x {
            let ratio = xi / step;
            assert_relative_eq!(ratio, ratio.round(), epsilon = 1e-9);
        }
        // snapped values stay in [-pi, pi)
        assert!(x.iter().all(|v| (-std::f64::consts::PI..std::f64::consts::PI).contains(v)));
    }

    #[test]
    fn quantization_must_divide_circle() {
        let spec = FeasibilitySpec::phase_only().with_phase_quantization(50.0);
        assert!(spec.validate().is_err());
    }
}
