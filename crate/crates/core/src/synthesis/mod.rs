//! Per-scan-angle excitation synthesis: objectives, optimizer wiring,
//! trade-off selection, field-of-view analysis and beam metrics.

mod fov;
mod metrics;
mod objectives;
mod selection;
mod sweep;

pub use fov::{fov, fov_from_mask, FovReport, FovSpec, MethodFov, PsiThresholdRule};
pub use metrics::{beam_metrics, BeamMetrics, MetricsGrid};
pub use objectives::{phi_rad, phi_refl, FeasibilitySpec, ScanProblem};
pub use selection::{select_tradeoff, Selected, SelectionCriterion};
pub use sweep::{sweep, MethodSample, ScanResult, SweepOutcome, SweepParams};

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::array::{ArrayModel, Direction, ExcitationSet, ModelError};
use crate::baseline::{std_weights, GridError};
use crate::moea::{self, EpsilonSpec, MoeaConfig, MoeaError, ParetoArchive};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Moea(#[from] MoeaError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("archive is empty")]
    EmptyArchive,
    #[error("invalid feasibility spec: {0}")]
    InvalidFeasibility(String),
    #[error("invalid field-of-view spec: {0}")]
    InvalidFov(String),
    #[error("invalid metrics grid: {0}")]
    InvalidMetricsGrid(String),
    #[error("{} scan angle(s) failed: {}", failures.len(), summarize(failures))]
    PerScan { failures: Vec<(usize, String)> },
}

fn summarize(failures: &[(usize, String)]) -> String {
    failures
        .iter()
        .take(3)
        .map(|(q, msg)| format!("q {q}: {msg}"))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Synthesis output for a single scan angle.
#[derive(Debug, Clone)]
pub struct ScanSynthesis {
    pub scan: Direction,
    pub archive: ParetoArchive,
    pub std_objectives: [f64; 2],
    pub std_excitation: ExcitationSet,
    pub eps: EpsilonSpec,
}

/// Runs the ε-MOEA for one scan angle.
///
/// The baseline solution is evaluated first: its `Φ_RAD` becomes the
/// normalization reference for the second objective's ε-boxes (the first is
/// boxed raw over its natural [0, 1] range), and its decision vector is
/// injected as a population seed so the resulting front can never lose the
/// baseline's box. `extra_seeds` join the initial population the same way.
pub fn synthesize_scan_angle(
    model: &ArrayModel,
    scan: Direction,
    feasibility: &FeasibilitySpec,
    config: &MoeaConfig,
    epsilon: [f64; 2],
    rng: ChaCha8Rng,
    extra_seeds: &[Vec<f64>],
) -> Result<ScanSynthesis, SynthesisError> {
    let problem = ScanProblem::new(model, scan, *feasibility)?;
    let std_excitation = std_weights(model.geometry(), scan)?;
    let std_objectives = problem.evaluate_weights(std_excitation.weights())?;

    let eps = EpsilonSpec::new(epsilon, [1.0, std_objectives[1]]).map_err(MoeaError::from)?;

    let mut seeds = Vec::with_capacity(1 + extra_seeds.len());
    seeds.push(problem.encode(&std_excitation));
    seeds.extend_from_slice(extra_seeds);

    let archive = moea::run_with_rng(&problem, config, eps, rng, &seeds)?;

    Ok(ScanSynthesis {
        scan,
        archive,
        std_objectives,
        std_excitation,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{ArrayGeometry, PhysicsConstants, ScatteringMatrix};
    use crate::io::{
        analytic_patterns, synthetic_coupling, AnalyticPatternKind, SyntheticCouplingSpec,
    };
    use rand::SeedableRng;

    fn model(n: usize, coupled: bool) -> ArrayModel {
        let constants = PhysicsConstants::default();
        let lambda = constants.speed_of_light_m_s / 2.0e9;
        let spacing = 0.47 * lambda;
        let geometry = ArrayGeometry::linear(n, spacing, 2.0e9, &constants).unwrap();
        let s = if coupled {
            synthetic_coupling(
                &geometry,
                &SyntheticCouplingSpec {
                    self_reflection: (0.1, 0.0),
                    coupling_amplitude: 0.4,
                    decay_length_m: spacing,
                },
            )
            .unwrap()
        } else {
            ScatteringMatrix::zeros(n)
        };
        let patterns = analytic_patterns(
            AnalyticPatternKind::Isotropic,
            &geometry,
            2.0,
            2.0,
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        ArrayModel::new(geometry, s, patterns, constants).unwrap()
    }

    fn small_config(seed: u64) -> MoeaConfig {
        MoeaConfig {
            population_size: 16,
            iterations: 200,
            seed,
            ..MoeaConfig::default()
        }
    }

    #[test]
    fn zero_coupling_std_is_optimal() {
        let m = model(4, false);
        let scan = Direction::new(90.0, 40.0);
        let syn = synthesize_scan_angle(
            &m,
            scan,
            &FeasibilitySpec::phase_only(),
            &small_config(1),
            [5e-3, 2.5e-2],
            ChaCha8Rng::seed_from_u64(1),
            &[],
        )
        .unwrap();
        // every candidate has zero reflection; the baseline maximizes psi
        assert!(syn.std_objectives[0] < 1e-15);
        let sel = select_tradeoff(
            &syn.archive,
            syn.std_objectives,
            SelectionCriterion::MatchStd,
            1e-3,
        )
        .unwrap();
        let selected_obj = match sel {
            Selected::Member(i) => syn.archive.entry(i).objectives,
            Selected::StdFallback => syn.std_objectives,
        };
        assert!(selected_obj[0] < 1e-15);
        // within one epsilon box of the baseline radiation level
        assert!(selected_obj[1] <= syn.std_objectives[1] * (1.0 + 2.5e-2));
    }

    #[test]
    fn coupled_archive_improves_on_baseline() {
        let m = model(5, true);
        let scan = Direction::new(90.0, 52.0);
        let syn = synthesize_scan_angle(
            &m,
            scan,
            &FeasibilitySpec::phase_only(),
            &MoeaConfig {
                population_size: 30,
                iterations: 600,
                seed: 3,
                ..MoeaConfig::default()
            },
            [5e-3, 2.5e-2],
            ChaCha8Rng::seed_from_u64(3),
            &[],
        )
        .unwrap();
        // with the baseline seeded, some member must cover its box, and on
        // this coupled fixture the optimizer finds strictly lower zeta at
        // comparable radiation
        let std_box = syn.eps.box_index(syn.std_objectives);
        assert!(syn.archive.covers_box(std_box));
        let budget = syn.std_objectives[1] * (1.0 + 2.5e-2);
        let best_zeta = syn
            .archive
            .entries()
            .iter()
            .filter(|e| e.objectives[1] <= budget)
            .map(|e| e.objectives[0])
            .fold(f64::INFINITY, f64::min);
        assert!(
            best_zeta < syn.std_objectives[0],
            "best {} vs std {}",
            best_zeta,
            syn.std_objectives[0]
        );
    }

    #[test]
    fn archive_invariants_after_synthesis() {
        let m = model(3, true);
        let syn = synthesize_scan_angle(
            &m,
            Direction::new(90.0, 30.0),
            &FeasibilitySpec::phase_only(),
            &small_config(7),
            [5e-3, 2.5e-2],
            ChaCha8Rng::seed_from_u64(7),
            &[],
        )
        .unwrap();
        syn.archive.check_invariants().unwrap();
        assert!(!syn.archive.is_empty());
    }
}
