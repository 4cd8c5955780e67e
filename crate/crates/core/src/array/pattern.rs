//! Tabulated embedded element patterns with bilinear interpolation.

use num_complex::Complex64;

use super::{Direction, ModelError};

/// A uniform angular axis `start + i·step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleAxis {
    start_deg: f64,
    step_deg: f64,
    count: usize,
}

impl AngleAxis {
    pub fn new(start_deg: f64, step_deg: f64, count: usize) -> Result<Self, ModelError> {
        if count == 0 || !(step_deg > 0.0) && count > 1 || !start_deg.is_finite() {
            return Err(ModelError::BadAxis {
                start_deg,
                step_deg,
                count,
            });
        }
        Ok(Self {
            start_deg,
            step_deg,
            count,
        })
    }

    /// Axis from an inclusive `start:step:stop` range.
    pub fn from_range(start_deg: f64, step_deg: f64, stop_deg: f64) -> Result<Self, ModelError> {
        if !(step_deg > 0.0) || stop_deg < start_deg - 1e-9 {
            return Err(ModelError::BadAxis {
                start_deg,
                step_deg,
                count: 0,
            });
        }
        let span = stop_deg - start_deg;
        let n = (span / step_deg).round();
        if (n * step_deg - span).abs() > 1e-6 {
            return Err(ModelError::BadAxis {
                start_deg,
                step_deg,
                count: 0,
            });
        }
        Self::new(start_deg, step_deg, n as usize + 1)
    }

    pub fn start_deg(&self) -> f64 {
        self.start_deg
    }

    pub fn step_deg(&self) -> f64 {
        self.step_deg
    }

    pub fn stop_deg(&self) -> f64 {
        self.start_deg + self.step_deg * (self.count as f64 - 1.0)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start_deg + self.step_deg * i as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.value(i))
    }

    /// Interpolation cell for `x`: lower node index and fractional offset.
    /// Returns `None` outside the covered range (1e-9 deg slack at the ends).
    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if self.count == 1 {
            return ((x - self.start_deg).abs() <= 1e-9).then_some((0, 0.0));
        }
        let t = (x - self.start_deg) / self.step_deg;
        if t < -1e-9 || t > (self.count - 1) as f64 + 1e-9 {
            return None;
        }
        let t = t.clamp(0.0, (self.count - 1) as f64);
        let mut i = t.floor() as usize;
        if i >= self.count - 1 {
            i = self.count - 2;
        }
        Some((i, t - i as f64))
    }

    /// Interpolation cell on a periodic axis with period `count·step`.
    fn locate_wrapped(&self, x: f64) -> (usize, f64) {
        let period = self.step_deg * self.count as f64;
        let t = (x - self.start_deg).rem_euclid(period) / self.step_deg;
        let mut i = t.floor() as usize;
        if i >= self.count {
            i = 0;
        }
        (i, t - i as f64)
    }
}

/// Regular (theta, phi) grid shared by every element pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    theta: AngleAxis,
    phi: AngleAxis,
    phi_wraps: bool,
}

impl AngleGrid {
    pub fn new(theta: AngleAxis, phi: AngleAxis) -> Result<Self, ModelError> {
        if theta.start_deg().abs() > 1e-6 || (theta.stop_deg() - 180.0).abs() > 1e-6 {
            return Err(ModelError::ThetaCoverage {
                start_deg: theta.start_deg(),
                stop_deg: theta.stop_deg(),
            });
        }
        let phi_wraps = (phi.step_deg() * phi.count() as f64 - 360.0).abs() <= 1e-6;
        Ok(Self {
            theta,
            phi,
            phi_wraps,
        })
    }

    pub fn theta(&self) -> &AngleAxis {
        &self.theta
    }

    pub fn phi(&self) -> &AngleAxis {
        &self.phi
    }

    pub fn phi_wraps(&self) -> bool {
        self.phi_wraps
    }

    pub fn node_count(&self) -> usize {
        self.theta.count() * self.phi.count()
    }

    pub(crate) fn node_index(&self, it: usize, ip: usize) -> usize {
        it * self.phi.count() + ip
    }
}

/// One element's complex far field, θ̂ and φ̂ components on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPattern {
    pub e_theta: Vec<Complex64>,
    pub e_phi: Vec<Complex64>,
}

/// Per-element tabulated patterns of the whole array.
///
/// Finite arrays have element-dependent embedded patterns; this container
/// keeps one table per element on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPatternSet {
    grid: AngleGrid,
    elements: Vec<ElementPattern>,
}

impl ElementPatternSet {
    pub fn new(grid: AngleGrid, elements: Vec<ElementPattern>) -> Result<Self, ModelError> {
        if elements.is_empty() {
            return Err(ModelError::EmptyPatternSet);
        }
        let nodes = grid.node_count();
        for (n, e) in elements.iter().enumerate() {
            if e.e_theta.len() != nodes || e.e_phi.len() != nodes {
                return Err(ModelError::PatternSizeMismatch {
                    element: n,
                    expected: nodes,
                    actual_theta: e.e_theta.len(),
                    actual_phi: e.e_phi.len(),
                });
            }
            if e.e_theta.iter().chain(e.e_phi.iter()).any(|z| {
                !z.re.is_finite() || !z.im.is_finite()
            }) {
                return Err(ModelError::NonFinitePattern { element: n });
            }
        }
        Ok(Self { grid, elements })
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, n: usize) -> &ElementPattern {
        &self.elements[n]
    }

    /// Bilinear sample of element `n` at an arbitrary direction.
    ///
    /// The direction is canonicalized first; grid nodes reproduce exactly.
    pub fn sample(&self, n: usize, dir: Direction) -> Result<(Complex64, Complex64), ModelError> {
        let can = dir.canonical();
        let (it, ft) = self
            .grid
            .theta
            .locate(can.theta_deg)
            .ok_or(ModelError::OutsideCoverage {
                theta_deg: dir.theta_deg,
                phi_deg: dir.phi_deg,
            })?;
        let (ip, fp, ip1) = if self.grid.phi_wraps {
            let (ip, fp) = self.grid.phi.locate_wrapped(can.phi_deg);
            (ip, fp, (ip + 1) % self.grid.phi.count())
        } else {
            let (ip, fp) = self
                .grid
                .phi
                .locate(can.phi_deg)
                .ok_or(ModelError::OutsideCoverage {
                    theta_deg: dir.theta_deg,
                    phi_deg: dir.phi_deg,
                })?;
            (ip, fp, (ip + 1).min(self.grid.phi.count() - 1))
        };
        let it1 = (it + 1).min(self.grid.theta.count() - 1);
        let pat = &self.elements[n];
        let lerp2 = |v: &[Complex64]| {
            let v00 = v[self.grid.node_index(it, ip)];
            let v01 = v[self.grid.node_index(it, ip1)];
            let v10 = v[self.grid.node_index(it1, ip)];
            let v11 = v[self.grid.node_index(it1, ip1)];
            let top = v00 * (1.0 - fp) + v01 * fp;
            let bot = v10 * (1.0 - fp) + v11 * fp;
            top * (1.0 - ft) + bot * ft
        };
        Ok((lerp2(&pat.e_theta), lerp2(&pat.e_phi)))
    }
}
