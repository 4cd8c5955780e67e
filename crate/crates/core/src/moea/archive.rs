//! ε-dominance archive.
//!
//! Objective space is partitioned into boxes of size ε per objective (after
//! normalization). The archive keeps at most one member per box and no
//! member whose box is dominated by another member's box, which bounds the
//! archive size and guarantees spread along the front.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("epsilon values must be strictly positive, got {0:?}")]
    NonPositiveEpsilon([f64; 2]),
    #[error("normalization references must be strictly positive, got {0:?}")]
    NonPositiveNormalization([f64; 2]),
    #[error("objective values must be finite and non-negative, got {0:?}")]
    InvalidObjectives([f64; 2]),
}

/// Box sizes ε per objective plus the per-objective normalization reference
/// that makes them scale-free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSpec {
    epsilon: [f64; 2],
    normalization: [f64; 2],
}

impl EpsilonSpec {
    pub fn new(epsilon: [f64; 2], normalization: [f64; 2]) -> Result<Self, ArchiveError> {
        if epsilon.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(ArchiveError::NonPositiveEpsilon(epsilon));
        }
        if normalization.iter().any(|n| !(*n > 0.0) || !n.is_finite()) {
            return Err(ArchiveError::NonPositiveNormalization(normalization));
        }
        Ok(Self {
            epsilon,
            normalization,
        })
    }

    /// Unit normalization: objectives are boxed raw.
    pub fn raw(epsilon: [f64; 2]) -> Result<Self, ArchiveError> {
        Self::new(epsilon, [1.0, 1.0])
    }

    pub fn epsilon(&self) -> [f64; 2] {
        self.epsilon
    }

    pub fn normalization(&self) -> [f64; 2] {
        self.normalization
    }

    pub fn normalized(&self, objectives: [f64; 2]) -> [f64; 2] {
        [
            objectives[0] / self.normalization[0],
            objectives[1] / self.normalization[1],
        ]
    }

    /// Box index `B_i = floor(f_i_norm / ε_i)`; values exactly on an edge
    /// belong to the upper box.
    pub fn box_index(&self, objectives: [f64; 2]) -> [i64; 2] {
        let f = self.normalized(objectives);
        [
            (f[0] / self.epsilon[0]).floor() as i64,
            (f[1] / self.epsilon[1]).floor() as i64,
        ]
    }
}

/// `a` Pareto-dominates `b`: no worse in both objectives, better in one.
pub fn pareto_dominates(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

fn box_dominates(a: [i64; 2], b: [i64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Archive member: decision vector plus its objectives and box.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub decision: Vec<f64>,
    pub objectives: [f64; 2],
    pub box_index: [i64; 2],
}

/// What `offer` did with a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfferOutcome {
    /// Candidate joined a previously empty box, evicting `evicted`
    /// box-dominated members.
    Accepted { evicted: usize },
    /// Candidate won the same-box duel against the incumbent.
    ReplacedIncumbent,
    Rejected,
}

impl OfferOutcome {
    pub fn accepted(&self) -> bool {
        !matches!(self, OfferOutcome::Rejected)
    }
}

/// Variable-size set of mutually ε-non-dominated solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoArchive {
    spec: EpsilonSpec,
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new(spec: EpsilonSpec) -> Self {
        Self {
            spec,
            entries: Vec::new(),
        }
    }

    pub fn spec(&self) -> &EpsilonSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &ArchiveEntry {
        &self.entries[i]
    }

    /// Offers a candidate to the archive.
    ///
    /// Acceptance rules, in order:
    /// 1. rejected if any member's box strictly dominates the candidate's;
    /// 2. a same-box conflict is resolved by Pareto dominance, then by
    ///    Euclidean distance to the box's lower corner in normalized space
    ///    (smaller wins), with exact ties keeping the incumbent;
    /// 3. otherwise the candidate enters and every member whose box it
    ///    strictly dominates is evicted.
    pub fn offer(
        &mut self,
        decision: &[f64],
        objectives: [f64; 2],
    ) -> Result<OfferOutcome, ArchiveError> {
        if objectives.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(ArchiveError::InvalidObjectives(objectives));
        }
        let bx = self.spec.box_index(objectives);

        if self
            .entries
            .iter()
            .any(|e| box_dominates(e.box_index, bx))
        {
            return Ok(OfferOutcome::Rejected);
        }

        if let Some(pos) = self.entries.iter().position(|e| e.box_index == bx) {
            let incumbent = &self.entries[pos];
            let replace = if pareto_dominates(objectives, incumbent.objectives) {
                true
            } else if pareto_dominates(incumbent.objectives, objectives) {
                false
            } else {
                self.corner_distance(objectives, bx) < self.corner_distance(incumbent.objectives, bx)
            };
            if replace {
                self.entries[pos] = ArchiveEntry {
                    decision: decision.to_vec(),
                    objectives,
                    box_index: bx,
                };
                return Ok(OfferOutcome::ReplacedIncumbent);
            }
            return Ok(OfferOutcome::Rejected);
        }

        let before = self.entries.len();
        self.entries.retain(|e| !box_dominates(bx, e.box_index));
        let evicted = before - self.entries.len();
        self.entries.push(ArchiveEntry {
            decision: decision.to_vec(),
            objectives,
            box_index: bx,
        });
        Ok(OfferOutcome::Accepted { evicted })
    }

    fn corner_distance(&self, objectives: [f64; 2], bx: [i64; 2]) -> f64 {
        let f = self.spec.normalized(objectives);
        let eps = self.spec.epsilon();
        let dx = f[0] - bx[0] as f64 * eps[0];
        let dy = f[1] - bx[1] as f64 * eps[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Checks the structural invariants: one member per box and mutual
    /// box-non-dominance. Cheap enough to run inside instrumented loops.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, a) in self.entries.iter().enumerate() {
            for (j, b) in self.entries.iter().enumerate() {
                if i == j {
                    continue;
                }
                if a.box_index == b.box_index {
                    return Err(format!("entries {i} and {j} share box {:?}", a.box_index));
                }
                if box_dominates(a.box_index, b.box_index) {
                    return Err(format!(
                        "entry {i} box {:?} dominates entry {j} box {:?}",
                        a.box_index, b.box_index
                    ));
                }
            }
        }
        Ok(())
    }

    /// True if some member's box Pareto-dominates-or-equals `bx`.
    pub fn covers_box(&self, bx: [i64; 2]) -> bool {
        self.entries
            .iter()
            .any(|e| e.box_index[0] <= bx[0] && e.box_index[1] <= bx[1])
    }
}
