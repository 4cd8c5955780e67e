//! N-port scattering matrix of the coupled array.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ModelError;

/// Dense N×N scattering matrix, row-major storage.
///
/// The matrix maps incident port waves to reflected port waves and is the
/// excitation-independent description of the inter-element coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    order: usize,
    entries: Vec<Complex64>,
}

/// Result of the passivity inspection. Ingested matrices that fail it are
/// accepted with a warning; measured or simulated data is often mildly
/// non-passive from numerical noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassivityCheck {
    pub spectral_norm: f64,
    pub is_passive: bool,
}

impl ScatteringMatrix {
    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// perfect square of the port count.
    pub fn new(order: usize, entries: Vec<Complex64>) -> Result<Self, ModelError> {
        if order == 0 || entries.len() != order * order {
            return Err(ModelError::BadMatrixShape {
                order,
                entries: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::NonFiniteMatrixEntry);
        }
        Ok(Self { order, entries })
    }

    /// All-zero matrix (perfectly matched, fully decoupled array).
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![Complex64::new(0.0, 0.0); order * order],
        }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let order = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); order * order];
        for (n, &v) in diag.iter().enumerate() {
            entries[n * order + n] = v;
        }
        Self { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix-vector product `S·w`.
    pub(crate) fn matvec(&self, w: &[Complex64]) -> Vec<Complex64> {
        let n = self.order;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for row in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            let base = row * n;
            for col in 0..n {
                acc += self.entries[base + col] * w[col];
            }
            out[row] = acc;
        }
        out
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.order, self.order, &self.entries);
        m.svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Checks that every singular value is at most one.
    pub fn passivity(&self) -> PassivityCheck {
        let spectral_norm = self.spectral_norm();
        PassivityCheck {
            spectral_norm,
            is_passive: spectral_norm <= 1.0 + 1e-12,
        }
    }

    /// Hermitian-symmetry-free reciprocity check used by the fixture
    /// generator: `S = Sᵀ` exactly.
    pub fn is_symmetric(&self) -> bool {
        for n in 0..self.order {
            for m in (n + 1)..self.order {
                if self.get(n, m) != self.get(m, n) {
                    return false;
                }
            }
        }
        true
    }
}
