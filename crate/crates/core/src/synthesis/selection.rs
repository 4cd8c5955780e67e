//! Trade-off selection from a synthesized Pareto front.

use serde::{Deserialize, Serialize};

use super::SynthesisError;
use crate::moea::ParetoArchive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionCriterion {
    /// Keep the baseline's radiation level and take the smallest reflected
    /// fraction available at that level.
    MatchStd,
    /// Global minimum of the reflected fraction.
    MinRefl,
    /// Maximum distance to the chord between the front extremes in
    /// normalized objective space.
    Knee,
}

/// Outcome of a selection: an archive index, or the baseline when the
/// archive offers nothing at least as good.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selected {
    Member(usize),
    StdFallback,
}

/// Picks the trade-off solution.
///
/// `match-std` holds the radiation budget at the archive's own resolution:
/// members qualify when their `Φ_RAD` ε-box is no worse than the baseline's
/// (one box is the finest level the archive distinguishes), with
/// `(1 + tolerance)` as a floating-point guard. Among qualifiers the
/// minimum `Φ_REFL` wins; when none qualify, or the best qualifier does not
/// actually improve on the baseline's reflected fraction, the baseline
/// itself is kept and flagged.
pub fn select_tradeoff(
    archive: &ParetoArchive,
    std_objectives: [f64; 2],
    criterion: SelectionCriterion,
    tolerance: f64,
) -> Result<Selected, SynthesisError> {
    if archive.is_empty() {
        return Err(SynthesisError::EmptyArchive);
    }
    let entries = archive.entries();
    let by_objectives = |i: &usize, j: &usize| {
        let a = entries[*i].objectives;
        let b = entries[*j].objectives;
        a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(i.cmp(j))
    };

    match criterion {
        SelectionCriterion::MatchStd => {
            let guard = std_objectives[1] * (1.0 + tolerance);
            let std_box = archive.spec().box_index(std_objectives)[1];
            let best = (0..entries.len())
                .filter(|i| {
                    entries[*i].objectives[1] <= guard || entries[*i].box_index[1] <= std_box
                })
                .min_by(by_objectives);
            match best {
                Some(i) if entries[i].objectives[0] <= std_objectives[0] => {
                    Ok(Selected::Member(i))
                }
                _ => Ok(Selected::StdFallback),
            }
        }
        SelectionCriterion::MinRefl => {
            let i = (0..entries.len()).min_by(by_objectives).expect("non-empty");
            Ok(Selected::Member(i))
        }
        SelectionCriterion::Knee => Ok(Selected::Member(knee_index(archive))),
    }
}

fn knee_index(archive: &ParetoArchive) -> usize {
    let entries = archive.entries();
    if entries.len() == 1 {
        return 0;
    }
    let min0 = entries.iter().map(|e| e.objectives[0]).fold(f64::INFINITY, f64::min);
    let max0 = entries.iter().map(|e| e.objectives[0]).fold(f64::NEG_INFINITY, f64::max);
    let min1 = entries.iter().map(|e| e.objectives[1]).fold(f64::INFINITY, f64::min);
    let max1 = entries.iter().map(|e| e.objectives[1]).fold(f64::NEG_INFINITY, f64::max);
    let span0 = (max0 - min0).max(f64::MIN_POSITIVE);
    let span1 = (max1 - min1).max(f64::MIN_POSITIVE);
    let norm = |f: [f64; 2]| [(f[0] - min0) / span0, (f[1] - min1) / span1];

    // chord ends: best-Φ_REFL member and best-Φ_RAD member
    let end_a = (0..entries.len())
        .min_by(|i, j| {
            entries[*i].objectives[0]
                .total_cmp(&entries[*j].objectives[0])
                .then(i.cmp(j))
        })
        .expect("non-empty");
    let end_b = (0..entries.len())
        .min_by(|i, j| {
            entries[*i].objectives[1]
                .total_cmp(&entries[*j].objectives[1])
                .then(i.cmp(j))
        })
        .expect("non-empty");
    if end_a == end_b {
        return end_a;
    }
    let a = norm(entries[end_a].objectives);
    let b = norm(entries[end_b].objectives);
    let chord = [b[0] - a[0], b[1] - a[1]];
    let chord_len = (chord[0] * chord[0] + chord[1] * chord[1]).sqrt();

    let mut best = end_a;
    let mut best_dist = f64::NEG_INFINITY;
    for (i, e) in entries.iter().enumerate() {
        let p = norm(e.objectives);
        let dist = if chord_len > 0.0 {
            ((p[0] - a[0]) * chord[1] - (p[1] - a[1]) * chord[0]).abs() / chord_len
        } else {
            0.0
        };
        if dist > best_dist {
            best_dist = dist;
            best = i;
        }
    }
    best
}
