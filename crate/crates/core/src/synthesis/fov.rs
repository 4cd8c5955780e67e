//! Field-of-view analysis.
//!
//! A scan direction belongs to the field of view when the on-scan power
//! density clears ψ_TH and the reflected power fraction stays below ζ_TH.
//! The reported FoV is the connected component of feasible grid nodes that
//! contains the boresight sample, so isolated feasible islands far from
//! boresight do not count.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use super::SynthesisError;
use crate::baseline::ScanGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum PsiThresholdRule {
    /// Fixed threshold in watts per steradian.
    Absolute { threshold_w_sr: f64 },
    /// Threshold placed `loss_db` (≤ 0) below the baseline's boresight
    /// density.
    ScanLoss { loss_db: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FovSpec {
    pub zeta_threshold: f64,
    pub psi_rule: PsiThresholdRule,
}

impl Default for FovSpec {
    fn default() -> Self {
        Self {
            zeta_threshold: 0.10,
            psi_rule: PsiThresholdRule::ScanLoss { loss_db: -6.0 },
        }
    }
}

impl FovSpec {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        if !(self.zeta_threshold > 0.0 && self.zeta_threshold <= 1.0) {
            return Err(SynthesisError::InvalidFov(format!(
                "zeta threshold {} outside (0, 1]",
                self.zeta_threshold
            )));
        }
        if let PsiThresholdRule::ScanLoss { loss_db } = self.psi_rule {
            if !(loss_db <= 0.0) {
                return Err(SynthesisError::InvalidFov(format!(
                    "scan loss {loss_db} dB must be non-positive"
                )));
            }
        }
        Ok(())
    }
}

/// Per-method feasibility result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodFov {
    /// Raw per-direction feasibility `m_q`.
    pub mask: Vec<bool>,
    /// Sorted indices of the boresight-connected feasible component.
    pub fov_indices: Vec<usize>,
    pub q_fov: usize,
    /// `α_FoV = Q_FoV / Q`.
    pub alpha: f64,
    pub boresight_feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FovReport {
    pub psi_threshold_w_sr: f64,
    pub std: MethodFov,
    pub optimized: Option<MethodFov>,
    /// `Δζ_q = ζ_q^STD − ζ_q^PO` over the whole grid.
    pub delta_zeta: Option<Vec<f64>>,
    /// Maximum of `Δζ_q` over the optimized FoV; `None` when that FoV is
    /// empty.
    pub delta_zeta_max: Option<f64>,
}

/// Boresight-connected feasible component of a mask.
pub fn fov_from_mask(grid: &ScanGrid, mask: &[bool]) -> MethodFov {
    let boresight = grid.boresight();
    let mut indices = Vec::new();
    let boresight_feasible = mask[boresight];
    if boresight_feasible {
        let mut seen = vec![false; mask.len()];
        let mut queue = VecDeque::new();
        seen[boresight] = true;
        queue.push_back(boresight);
        while let Some(q) = queue.pop_front() {
            indices.push(q);
            for m in grid.neighbors(q) {
                if mask[m] && !seen[m] {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        indices.sort_unstable();
    }
    let q_fov = indices.len();
    MethodFov {
        mask: mask.to_vec(),
        fov_indices: indices,
        q_fov,
        alpha: q_fov as f64 / mask.len() as f64,
        boresight_feasible,
    }
}

/// Builds the report from per-direction `(ψ_scan, ζ)` series. The scan-loss
/// threshold is anchored at the baseline's boresight density for both
/// methods, matching how the feasibility condition is stated.
pub fn fov(
    grid: &ScanGrid,
    std_series: &[(f64, f64)],
    optimized_series: Option<&[(f64, f64)]>,
    spec: &FovSpec,
) -> Result<FovReport, SynthesisError> {
    spec.validate()?;
    if std_series.len() != grid.len() {
        return Err(SynthesisError::InvalidFov(format!(
            "series length {} does not match grid length {}",
            std_series.len(),
            grid.len()
        )));
    }
    if let Some(po) = optimized_series {
        if po.len() != grid.len() {
            return Err(SynthesisError::InvalidFov(format!(
                "optimized series length {} does not match grid length {}",
                po.len(),
                grid.len()
            )));
        }
    }
    let psi_threshold_w_sr = match spec.psi_rule {
        PsiThresholdRule::Absolute { threshold_w_sr } => threshold_w_sr,
        PsiThresholdRule::ScanLoss { loss_db } => {
            std_series[grid.boresight()].0 * 10f64.powf(loss_db / 10.0)
        }
    };

    let build_mask = |series: &[(f64, f64)]| -> Vec<bool> {
        series
            .iter()
            .map(|(psi, zeta)| *psi >= psi_threshold_w_sr && *zeta <= spec.zeta_threshold)
            .collect()
    };

    let std = fov_from_mask(grid, &build_mask(std_series));
    let (optimized, delta_zeta, delta_zeta_max) = match optimized_series {
        Some(po_series) => {
            let po = fov_from_mask(grid, &build_mask(po_series));
            let delta: Vec<f64> = std_series
                .iter()
                .zip(po_series)
                .map(|((_, zs), (_, zp))| zs - zp)
                .collect();
            let max = po
                .fov_indices
                .iter()
                .map(|&q| delta[q])
                .fold(None, |acc: Option<f64>, v| {
                    Some(acc.map_or(v, |a| a.max(v)))
                });
            (Some(po), Some(delta), max)
        }
        None => (None, None, None),
    };

    Ok(FovReport {
        psi_threshold_w_sr,
        std,
        optimized,
        delta_zeta,
        delta_zeta_max,
    })
}
