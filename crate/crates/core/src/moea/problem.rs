//! Problem abstraction optimized by the ε-MOEA.

use rand::Rng;
use thiserror::Error;

use crate::baseline::wrap_phase;

/// One decision variable: a bounded interval or a circular (wrap-around)
/// angle stored in [-π, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariableKind {
    Bounded { lo: f64, hi: f64 },
    Circular,
}

impl VariableKind {
    /// Width used to scale mutation steps.
    pub fn range(&self) -> f64 {
        match self {
            VariableKind::Bounded { lo, hi } => hi - lo,
            VariableKind::Circular => 2.0 * std::f64::consts::PI,
        }
    }

    /// Brings a value back into the feasible set: clamp for bounded
    /// variables, wrap for circular ones.
    pub fn confine(&self, x: f64) -> f64 {
        match self {
            VariableKind::Bounded { lo, hi } => x.clamp(*lo, *hi),
            VariableKind::Circular => wrap_phase(x),
        }
    }
}

/// Ordered list of decision variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSpace {
    vars: Vec<VariableKind>,
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("decision space needs at least one variable")]
    Empty,
    #[error("variable {index} has invalid bounds [{lo}, {hi}]")]
    BadBounds { index: usize, lo: f64, hi: f64 },
}

impl DecisionSpace {
    pub fn new(vars: Vec<VariableKind>) -> Result<Self, SpaceError> {
        if vars.is_empty() {
            return Err(SpaceError::Empty);
        }
        for (index, v) in vars.iter().enumerate() {
            if let VariableKind::Bounded { lo, hi } = v {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(SpaceError::BadBounds {
                        index,
                        lo: *lo,
                        hi: *hi,
                    });
                }
            }
        }
        Ok(Self { vars })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[VariableKind] {
        &self.vars
    }

    pub fn confine(&self, x: &mut [f64]) {
        for (v, xi) in self.vars.iter().zip(x.iter_mut()) {
            *xi = v.confine(*xi);
        }
    }

    /// Uniform sample within bounds (circular variables over [-π, π)).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| match v {
                VariableKind::Bounded { lo, hi } => {
                    if hi > lo {
                        rng.gen_range(*lo..*hi)
                    } else {
                        *lo
                    }
                }
                VariableKind::Circular => {
                    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
                }
            })
            .collect()
    }
}

/// Objective-evaluation failure carried out of the optimizer unchanged.
#[derive(Debug, Error)]
#[error("objective evaluation failed: {0}")]
pub struct EvalFailure(pub String);

/// A two-objective minimization problem over a mixed bounded/circular
/// decision space. Evaluation must be a pure function so concurrent runs
/// can share the problem.
pub trait MoeaProblem: Sync {
    fn space(&self) -> &DecisionSpace;

    /// Post-variation repair hook (e.g. snapping to a quantized set).
    /// Default: identity.
    fn repair(&self, _x: &mut [f64]) {}

    fn evaluate(&self, x: &[f64]) -> Result<[f64; 2], EvalFailure>;
}
