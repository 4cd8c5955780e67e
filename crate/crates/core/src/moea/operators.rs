//! Variation operators: simulated binary crossover and polynomial mutation.

use rand::Rng;

use super::problem::DecisionSpace;

/// SBX (Deb & Agrawal) applied per variable; returns both children.
/// Values are left unconfined, the caller wraps/clamps afterwards.
pub(crate) fn sbx_crossover<R: Rng>(
    parent_a: &[f64],
    parent_b: &[f64],
    eta_c: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let exponent = 1.0 / (eta_c + 1.0);
    let mut child_a = Vec::with_capacity(parent_a.len());
    let mut child_b = Vec::with_capacity(parent_a.len());
    for (&pa, &pb) in parent_a.iter().zip(parent_b) {
        let u: f64 = rng.gen();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(exponent)
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(exponent)
        };
        child_a.push(0.5 * ((1.0 + beta) * pa + (1.0 - beta) * pb));
        child_b.push(0.5 * ((1.0 - beta) * pa + (1.0 + beta) * pb));
    }
    (child_a, child_b)
}

/// Polynomial mutation (Deb & Goyal) with per-variable probability; the
/// perturbation scale is the variable's range (2π for circular variables).
pub(crate) fn polynomial_mutation<R: Rng>(
    x: &mut [f64],
    space: &DecisionSpace,
    eta_m: f64,
    probability: f64,
    rng: &mut R,
) {
    let exponent = 1.0 / (eta_m + 1.0);
    for (xi, var) in x.iter_mut().zip(space.vars()) {
        if rng.gen::<f64>() >= probability {
            continue;
        }
        let u: f64 = rng.gen();
        let delta = if u < 0.5 {
            (2.0 * u).powf(exponent) - 1.0
        } else {
            1.0 - (2.0 * (1.0 - u)).powf(exponent)
        };
        *xi += delta * var.range();
    }
}
