//! Per-scan-angle synthesis over a whole grid.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fov::{fov, FovReport, FovSpec};
use super::objectives::FeasibilitySpec;
use super::selection::{select_tradeoff, Selected, SelectionCriterion};
use super::{synthesize_scan_angle, SynthesisError};
use crate::array::{ArrayModel, Direction, ExcitationSet};
use crate::baseline::ScanGrid;
use crate::moea::{EpsilonSpec, MoeaConfig, ParetoArchive};

/// Everything a sweep needs besides the model and the grid.
#[derive(Debug, Clone)]
pub struct SweepParams {
    pub feasibility: FeasibilitySpec,
    pub moea: MoeaConfig,
    pub epsilon: [f64; 2],
    pub fov: FovSpec,
    pub criterion: SelectionCriterion,
    pub selection_tolerance: f64,
    /// Feed each scan angle the previous angle's selected solution as an
    /// extra seed. Runs sequentially when enabled; off by default because
    /// the per-angle problems are independent.
    pub warm_start: bool,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            feasibility: FeasibilitySpec::phase_only(),
            moea: MoeaConfig::default(),
            epsilon: [5e-3, 2.5e-2],
            fov: FovSpec::default(),
            criterion: SelectionCriterion::MatchStd,
            selection_tolerance: 1e-3,
            warm_start: false,
        }
    }
}

/// On-scan sample of one method at one scan angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSample {
    pub psi_w_sr: f64,
    pub zeta: f64,
    pub objectives: [f64; 2],
}

impl MethodSample {
    fn from_objectives(objectives: [f64; 2]) -> Self {
        Self {
            psi_w_sr: 1.0 / objectives[1],
            zeta: objectives[0],
            objectives,
        }
    }
}

/// Complete synthesis record for one scan angle.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub q: usize,
    pub scan: Direction,
    pub std_excitation: ExcitationSet,
    pub std: MethodSample,
    pub selected_excitation: ExcitationSet,
    pub selected: MethodSample,
    pub selected_fallback: bool,
    pub archive: ParetoArchive,
    pub eps: EpsilonSpec,
    /// Per-element ARL (linear) under the baseline and selected
    /// excitations; NaN where an element's incident weight is zero.
    pub arl_std: Vec<f64>,
    pub arl_selected: Vec<f64>,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub per_scan: Vec<ScanResult>,
    pub fov: FovReport,
}

fn arl_or_nan(model: &ArrayModel, excitation: &ExcitationSet) -> Vec<f64> {
    (0..model.len())
        .map(|n| {
            model
                .scattering()
                .active_reflection(excitation, n)
                .map(|g| g.norm_sqr())
                .unwrap_or(f64::NAN)
        })
        .collect()
}

fn run_one(
    model: &ArrayModel,
    grid: &ScanGrid,
    params: &SweepParams,
    q: usize,
    extra_seeds: &[Vec<f64>],
) -> Result<ScanResult, SynthesisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.moea.seed);
    rng.set_stream(q as u64);
    let scan = grid.direction(q);
    let synthesis = synthesize_scan_angle(
        model,
        scan,
        &params.feasibility,
        &params.moea,
        params.epsilon,
        rng,
        extra_seeds,
    )?;
    let selection = select_tradeoff(
        &synthesis.archive,
        synthesis.std_objectives,
        params.criterion,
        params.selection_tolerance,
    )?;
    let (selected_excitation, selected_objectives, selected_fallback) = match selection {
        Selected::Member(i) => {
            let entry = synthesis.archive.entry(i);
            let excitation = params
                .feasibility
                .decode(&entry.decision, scan)?
                .with_scan_index(q);
            (excitation, entry.objectives, false)
        }
        Selected::StdFallback => (
            synthesis.std_excitation.clone().with_scan_index(q),
            synthesis.std_objectives,
            true,
        ),
    };

    let arl_std = arl_or_nan(model, &synthesis.std_excitation);
    let arl_selected = arl_or_nan(model, &selected_excitation);

    Ok(ScanResult {
        q,
        scan,
        std: MethodSample::from_objectives(synthesis.std_objectives),
        std_excitation: synthesis.std_excitation.with_scan_index(q),
        selected: MethodSample::from_objectives(selected_objectives),
        selected_excitation,
        selected_fallback,
        archive: synthesis.archive,
        eps: synthesis.eps,
        arl_std,
        arl_selected,
    })
}

/// Synthesizes every scan angle of the grid, selects the per-angle
/// trade-off and assembles the field-of-view report.
///
/// Scan angles are independent problems: each one draws its own RNG stream
/// `(master seed, q)`, so results do not depend on the worker count and the
/// merged output is deterministic.
pub fn sweep(
    model: &ArrayModel,
    grid: &ScanGrid,
    params: &SweepParams,
) -> Result<SweepOutcome, SynthesisError> {
    params.fov.validate()?;
    params.feasibility.validate()?;

    let results: Vec<Result<ScanResult, SynthesisError>> = if params.warm_start {
        let mut out = Vec::with_capacity(grid.len());
        let mut previous: Option<Vec<f64>> = None;
        for q in 0..grid.len() {
            let seeds: Vec<Vec<f64>> = previous.iter().cloned().collect();
            let r = run_one(model, grid, params, q, &seeds);
            if let Ok(ref res) = r {
                previous = Some(params.feasibility.encode(&res.selected_excitation));
            }
            out.push(r);
        }
        out
    } else {
        (0..grid.len())
            .into_par_iter()
            .map(|q| run_one(model, grid, params, q, &[]))
            .collect()
    };

    let mut per_scan = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (q, r) in results.into_iter().enumerate() {
        match r {
            Ok(res) => per_scan.push(res),
            Err(e) => failures.push((q, e.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(SynthesisError::PerScan { failures });
    }

    let std_series: Vec<(f64, f64)> = per_scan.iter().map(|r| (r.std.psi_w_sr, r.std.zeta)).collect();
    let po_series: Vec<(f64, f64)> = per_scan
        .iter()
        .map(|r| (r.selected.psi_w_sr, r.selected.zeta))
        .collect();
    let fov_report = fov(grid, &std_series, Some(&po_series), &params.fov)?;

    Ok(SweepOutcome {
        per_scan,
        fov: fov_report,
    })
}
