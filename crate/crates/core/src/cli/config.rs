//! Run configuration: one TOML document describes the model, the scan
//! grid, the optimizer and every output knob. No environment variables are
//! consulted, so a config file plus a seed pins a run completely.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::array::{
    ArrayGeometry, ArrayModel, Direction, ElementPatternSet, FeasibilityMode, PhysicsConstants,
    ScatteringMatrix,
};
use crate::baseline::ScanGrid;
use crate::io::{
    analytic_patterns, parse_pattern_file, synthetic_coupling, AnalyticPatternKind,
    SyntheticCouplingSpec, TouchstoneDocument,
};
use crate::moea::MoeaConfig;
use crate::synthesis::{
    FeasibilitySpec, FovSpec, MetricsGrid, PsiThresholdRule, SelectionCriterion, SweepParams,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub frequency_hz: f64,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub constants: PhysicsConstants,
    pub scattering: ScatteringConfig,
    pub patterns: PatternConfig,
    pub scan: ScanConfig,
    #[serde(default)]
    pub feasibility: FeasibilityConfig,
    #[serde(default)]
    pub moea: MoeaSection,
    #[serde(default)]
    pub fov: FovSection,
    #[serde(default)]
    pub selection: SelectionSection,
    #[serde(default)]
    pub metrics: MetricsGrid,
    #[serde(default)]
    pub report: ReportSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeometryConfig {
    /// Uniform line along y, spacing in carrier wavelengths.
    Linear { count: usize, spacing_wavelengths: f64 },
    /// Uniform lattice in the xy plane.
    Planar {
        nx: usize,
        ny: usize,
        dx_wavelengths: f64,
        dy_wavelengths: f64,
    },
    Explicit { positions_m: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScatteringConfig {
    Synthetic {
        /// Complex self reflection as [re, im].
        self_reflection: [f64; 2],
        coupling_amplitude: f64,
        #[serde(default)]
        decay_length_m: Option<f64>,
        #[serde(default)]
        decay_length_wavelengths: Option<f64>,
    },
    File {
        path: PathBuf,
        /// Frequency point to extract; defaults to the carrier.
        #[serde(default)]
        select_frequency_hz: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum PatternConfig {
    Analytic {
        #[serde(flatten)]
        kind: AnalyticPatternKind,
        #[serde(default = "one_degree")]
        theta_step_deg: f64,
        #[serde(default = "one_degree")]
        phi_step_deg: f64,
        #[serde(default = "zenith")]
        broadside_axis: [f64; 3],
    },
    File { path: PathBuf },
}

fn one_degree() -> f64 {
    1.0
}

fn zenith() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VaryAngle {
    Theta,
    Phi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScanConfig {
    /// 1-D cut: one angle varies, the other is fixed.
    Cut {
        vary: VaryAngle,
        fixed_deg: f64,
        start_deg: f64,
        step_deg: f64,
        stop_deg: f64,
        #[serde(default)]
        boresight_index: Option<usize>,
    },
    /// Row-major 2-D lattice over theta (rows) and phi (columns).
    Lattice {
        theta_start_deg: f64,
        theta_step_deg: f64,
        theta_stop_deg: f64,
        phi_start_deg: f64,
        phi_step_deg: f64,
        phi_stop_deg: f64,
        #[serde(default)]
        boresight_index: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeasibilityConfig {
    pub mode: FeasibilityMode,
    pub magnitude_bounds: Option<[f64; 2]>,
    pub phase_quantization_deg: Option<f64>,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        Self {
            mode: FeasibilityMode::PhaseOnly,
            magnitude_bounds: None,
            phase_quantization_deg: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoeaSection {
    pub population: usize,
    pub iterations: u64,
    pub eta_crossover: f64,
    pub eta_mutation: f64,
    pub mutation_probability: Option<f64>,
    pub epsilon: [f64; 2],
    pub seed: u64,
}

impl Default for MoeaSection {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 1000,
            eta_crossover: 15.0,
            eta_mutation: 20.0,
            mutation_probability: None,
            epsilon: [5e-3, 2.5e-2],
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FovSection {
    pub zeta_threshold: f64,
    pub psi_rule: PsiRuleName,
    pub scan_loss_db: f64,
    pub psi_threshold_w_sr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiRuleName {
    ScanLoss,
    Absolute,
}

impl Default for FovSection {
    fn default() -> Self {
        Self {
            zeta_threshold: 0.10,
            psi_rule: PsiRuleName::ScanLoss,
            scan_loss_db: -6.0,
            psi_threshold_w_sr: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSection {
    pub criterion: SelectionCriterion,
    pub tolerance: f64,
    pub warm_start: bool,
}

impl Default for SelectionSection {
    fn default() -> Self {
        Self {
            criterion: SelectionCriterion::MatchStd,
            tolerance: 1e-3,
            warm_start: false,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    /// Scan indices the report command tabulates; empty means all.
    pub q_values: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Worker threads for the sweep; 0 uses every available core.
    pub workers: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_validated(&text)
    }

    pub fn from_str_validated(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.frequency_hz > 0.0) {
            return Err(CliError::Config(format!(
                "frequency_hz {} must be positive",
                self.frequency_hz
            )));
        }
        self.constants
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.moea_config()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.fov_spec()?
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.feasibility_spec()?
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if let ScatteringConfig::Synthetic {
            decay_length_m,
            decay_length_wavelengths,
            ..
        } = &self.scattering
        {
            match (decay_length_m, decay_length_wavelengths) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Config(
                        "give decay_length_m or decay_length_wavelengths, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(CliError::Config(
                        "synthetic scattering needs decay_length_m or decay_length_wavelengths"
                            .into(),
                    ))
                }
                _ => {}
            }
        }
        self.build_grid()?;
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        self.constants.speed_of_light_m_s / self.frequency_hz
    }

    pub fn build_geometry(&self) -> Result<ArrayGeometry, CliError> {
        let lambda = self.wavelength_m();
        let geometry = match &self.geometry {
            GeometryConfig::Linear {
                count,
                spacing_wavelengths,
            } => ArrayGeometry::linear(
                *count,
                spacing_wavelengths * lambda,
                self.frequency_hz,
                &self.constants,
            ),
            GeometryConfig::Planar {
                nx,
                ny,
                dx_wavelengths,
                dy_wavelengths,
            } => ArrayGeometry::planar(
                *nx,
                *ny,
                dx_wavelengths * lambda,
                dy_wavelengths * lambda,
                self.frequency_hz,
                &self.constants,
            ),
            GeometryConfig::Explicit { positions_m } => {
                ArrayGeometry::new(positions_m.clone(), self.frequency_hz, &self.constants)
            }
        };
        geometry.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn synthetic_coupling_spec(&self) -> Option<SyntheticCouplingSpec> {
        match &self.scattering {
            ScatteringConfig::Synthetic {
                self_reflection,
                coupling_amplitude,
                decay_length_m,
                decay_length_wavelengths,
            } => {
                let decay = decay_length_m
                    .or(decay_length_wavelengths.map(|w| w * self.wavelength_m()))?;
                Some(SyntheticCouplingSpec {
                    self_reflection: (self_reflection[0], self_reflection[1]),
                    coupling_amplitude: *coupling_amplitude,
                    decay_length_m: decay,
                })
            }
            ScatteringConfig::File { .. } => None,
        }
    }

    /// Builds the scattering matrix; file paths resolve against `base_dir`.
    /// Returns the matrix plus human-readable warnings (non-passive data,
    /// off-frequency selection).
    pub fn build_scattering(
        &self,
        geometry: &ArrayGeometry,
        base_dir: &Path,
    ) -> Result<(ScatteringMatrix, Vec<String>), CliError> {
        let mut warnings = Vec::new();
        let matrix = match &self.scattering {
            ScatteringConfig::Synthetic { .. } => {
                let spec = self.synthetic_coupling_spec().expect("validated synthetic");
                synthetic_coupling(geometry, &spec)
                    .map_err(|e| CliError::Config(e.to_string()))?
            }
            ScatteringConfig::File {
                path,
                select_frequency_hz,
            } => {
                let full = resolve(base_dir, path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    CliError::Ingestion(format!("cannot read {}: {e}", full.display()))
                })?;
                let doc = TouchstoneDocument::parse(&text, geometry.len())
                    .map_err(|e| CliError::Ingestion(format!("{}: {e}", full.display())))?;
                let want = select_frequency_hz.unwrap_or(self.frequency_hz);
                let (matrix, deviation) = doc
                    .matrix_at(want)
                    .map_err(|e| CliError::Ingestion(e.to_string()))?;
                if deviation > 1e-3 {
                    warnings.push(format!(
                        "selected frequency point deviates {:.3}% from {want} Hz",
                        deviation * 100.0
                    ));
                }
                matrix
            }
        };
        let passivity = matrix.passivity();
        if !passivity.is_passive {
            warnings.push(format!(
                "scattering matrix is not passive: spectral norm {:.6}",
                passivity.spectral_norm
            ));
        }
        Ok((matrix, warnings))
    }

    pub fn build_patterns(
        &self,
        geometry: &ArrayGeometry,
        base_dir: &Path,
    ) -> Result<ElementPatternSet, CliError> {
        match &self.patterns {
            PatternConfig::Analytic {
                kind,
                theta_step_deg,
                phi_step_deg,
                broadside_axis,
            } => analytic_patterns(*kind, geometry, *theta_step_deg, *phi_step_deg, *broadside_axis)
                .map_err(|e| CliError::Config(e.to_string())),
            PatternConfig::File { path } => {
                let full = resolve(base_dir, path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    CliError::Ingestion(format!("cannot read {}: {e}", full.display()))
                })?;
                let doc = parse_pattern_file(&text)
                    .map_err(|e| CliError::Ingestion(format!("{}: {e}", full.display())))?;
                doc.to_pattern_set()
                    .map_err(|e| CliError::Ingestion(e.to_string()))
            }
        }
    }

    pub fn build_model(&self, base_dir: &Path) -> Result<(ArrayModel, Vec<String>), CliError> {
        let geometry = self.build_geometry()?;
        let (scattering, warnings) = self.build_scattering(&geometry, base_dir)?;
        let patterns = self.build_patterns(&geometry, base_dir)?;
        let model = ArrayModel::new(geometry, scattering, patterns, self.constants)
            .map_err(|e| CliError::Ingestion(e.to_string()))?;
        Ok((model, warnings))
    }

    pub fn build_grid(&self) -> Result<ScanGrid, CliError> {
        fn axis(start: f64, step: f64, stop: f64) -> Result<Vec<f64>, CliError> {
            if !(step > 0.0) || stop < start {
                return Err(CliError::Config(format!("bad scan axis {start}:{step}:{stop}")));
            }
            let count = ((stop - start) / step).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        // boresight defaults to the least-steered sample
        fn nearest_zero(values: &[f64]) -> usize {
            values
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
                .map(|(i, _)| i)
                .unwrap_or(0)
        }

        let grid = match &self.scan {
            ScanConfig::Cut {
                vary,
                fixed_deg,
                start_deg,
                step_deg,
                stop_deg,
                boresight_index,
            } => {
                let values = axis(*start_deg, *step_deg, *stop_deg)?;
                let directions: Vec<Direction> = values
                    .iter()
                    .map(|v| match vary {
                        VaryAngle::Phi => Direction::new(*fixed_deg, *v),
                        VaryAngle::Theta => Direction::new(*v, *fixed_deg),
                    })
                    .collect();
                let boresight = boresight_index.unwrap_or_else(|| nearest_zero(&values));
                ScanGrid::cut(directions, boresight)
            }
            ScanConfig::Lattice {
                theta_start_deg,
                theta_step_deg,
                theta_stop_deg,
                phi_start_deg,
                phi_step_deg,
                phi_stop_deg,
                boresight_index,
            } => {
                let thetas = axis(*theta_start_deg, *theta_step_deg, *theta_stop_deg)?;
                let phis = axis(*phi_start_deg, *phi_step_deg, *phi_stop_deg)?;
                let mut directions = Vec::with_capacity(thetas.len() * phis.len());
                for t in &thetas {
                    for p in &phis {
                        directions.push(Direction::new(*t, *p));
                    }
                }
                let boresight = boresight_index.unwrap_or_else(|| {
                    nearest_zero(&thetas) * phis.len() + nearest_zero(&phis)
                });
                ScanGrid::lattice(directions, thetas.len(), phis.len(), boresight)
            }
        };
        grid.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn feasibility_spec(&self) -> Result<FeasibilitySpec, CliError> {
        let spec = match self.feasibility.mode {
            FeasibilityMode::PhaseOnly => FeasibilitySpec::phase_only(),
            FeasibilityMode::MagnitudePhase => {
                let bounds = self.feasibility.magnitude_bounds.ok_or_else(|| {
                    CliError::Config(
                        "magnitude-phase mode needs feasibility.magnitude_bounds".into(),
                    )
                })?;
                FeasibilitySpec::magnitude_phase(bounds[0], bounds[1])
            }
        };
        Ok(match self.feasibility.phase_quantization_deg {
            Some(step) => spec.with_phase_quantization(step),
            None => spec,
        })
    }

    pub fn moea_config(&self) -> MoeaConfig {
        MoeaConfig {
            population_size: self.moea.population,
            iterations: self.moea.iterations,
            eta_crossover: self.moea.eta_crossover,
            eta_mutation: self.moea.eta_mutation,
            mutation_probability: self.moea.mutation_probability,
            seed: self.moea.seed,
        }
    }

    pub fn fov_spec(&self) -> Result<FovSpec, CliError> {
        let psi_rule = match self.fov.psi_rule {
            PsiRuleName::ScanLoss => PsiThresholdRule::ScanLoss {
                loss_db: self.fov.scan_loss_db,
            },
            PsiRuleName::Absolute => PsiThresholdRule::Absolute {
                threshold_w_sr: self.fov.psi_threshold_w_sr.ok_or_else(|| {
                    CliError::Config("absolute psi rule needs fov.psi_threshold_w_sr".into())
                })?,
            },
        };
        Ok(FovSpec {
            zeta_threshold: self.fov.zeta_threshold,
            psi_rule,
        })
    }

    pub fn sweep_params(&self) -> Result<SweepParams, CliError> {
        Ok(SweepParams {
            feasibility: self.feasibility_spec()?,
            moea: self.moea_config(),
            epsilon: self.moea.epsilon,
            fov: self.fov_spec()?,
            criterion: self.selection.criterion,
            selection_tolerance: self.selection.tolerance,
            warm_start: self.selection.warm_start,
        })
    }
}

fn resolve(base_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}
