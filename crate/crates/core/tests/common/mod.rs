//! Shared fixtures and independent numerical oracles for integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use widescan::array::{
    ArrayGeometry, ArrayModel, Direction, ExcitationSet, PhysicsConstants, ScatteringMatrix,
};
use widescan::io::{analytic_patterns, synthetic_coupling, AnalyticPatternKind, SyntheticCouplingSpec};

pub const CARRIER_HZ: f64 = 2.0e9;

pub fn wavelength() -> f64 {
    PhysicsConstants::default().speed_of_light_m_s / CARRIER_HZ
}

/// Linear fixture along y with isotropic elements and optional synthetic
/// coupling (None makes S = 0).
pub fn linear_fixture(n: usize, spec: Option<SyntheticCouplingSpec>) -> ArrayModel {
    let constants = PhysicsConstants::default();
    let spacing = 0.47 * wavelength();
    let geometry = ArrayGeometry::linear(n, spacing, CARRIER_HZ, &constants).unwrap();
    let scattering = match spec {
        Some(s) => synthetic_coupling(&geometry, &s).unwrap(),
        None => ScatteringMatrix::zeros(n),
    };
    let patterns = analytic_patterns(
        AnalyticPatternKind::Isotropic,
        &geometry,
        1.0,
        1.0,
        [1.0, 0.0, 0.0],
    )
    .unwrap();
    ArrayModel::new(geometry, scattering, patterns, constants).unwrap()
}

pub fn localized_coupling(spacing_m: f64) -> SyntheticCouplingSpec {
    SyntheticCouplingSpec {
        self_reflection: (0.1, 0.1),
        coupling_amplitude: 0.6,
        decay_length_m: spacing_m,
    }
}

pub fn random_excitation<R: Rng>(n: usize, rng: &mut R, scan: Direction) -> ExcitationSet {
    let weights: Vec<Complex64> = (0..n)
        .map(|_| {
            Complex64::from_polar(
                rng.gen_range(0.1..2.0),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
        })
        .collect();
    ExcitationSet::magnitude_phase(weights, scan).unwrap()
}

/// N-point DFT matrix scaled by 1/sqrt(N): unitary for every N.
pub fn dft_unitary(n: usize) -> ScatteringMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let phase = -2.0 * std::f64::consts::PI * (row * col) as f64 / n as f64;
            entries.push(Complex64::from_polar(scale, phase));
        }
    }
    ScatteringMatrix::new(n, entries).unwrap()
}

/// Independent singular-value oracle.
///
/// Embeds the Hermitian Gram matrix `SᴴS = X + iY` as the real symmetric
/// `[[X, -Y], [Y, X]]` (eigenvalues doubled) and diagonalizes with a plain
/// cyclic Jacobi sweep; shares no code with the implementation path it is
/// used to check.
pub fn singular_values_oracle(s: &ScatteringMatrix) -> Vec<f64> {
    let n = s.order();
    // gram = S^H S
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += s.get(k, i).conj() * s.get(k, j);
            }
            gram[i * n + j] = acc;
        }
    }
    // real symmetric embedding, size 2n
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = gram[i * n + j];
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let eigen = jacobi_eigenvalues(&mut a, m);
    // each eigenvalue of the Gram matrix appears twice in the embedding
    let mut sv: Vec<f64> = eigen.iter().map(|l| l.max(0.0).sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv.into_iter().step_by(2).collect()
}

fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[cfg(test)]
mod oracle_self_checks {
    use super::*;

    #[test]
    fn oracle_matches_known_singular_values() {
        // diag(0.3) has all singular values 0.3
        let s = ScatteringMatrix::diagonal(&[Complex64::new(0.3, 0.0); 3]);
        let sv = singular_values_oracle(&s);
        for v in sv {
            assert!((v - 0.3).abs() < 1e-12);
        }
        // unitary: all 1
        let u = dft_unitary(4);
        for v in singular_values_oracle(&u) {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
