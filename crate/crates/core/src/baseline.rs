//! Scan grids and the standard linear-phase excitation baseline.

use crate::array::{dot3, ArrayGeometry, Direction, ExcitationSet, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("scan grid needs at least one direction")]
    Empty,
    #[error("boresight index {index} out of range (Q = {len})")]
    BoresightOutOfRange { index: usize, len: usize },
    #[error("lattice of {rows} x {cols} does not hold {len} directions")]
    LatticeShape { rows: usize, cols: usize, len: usize },
}

/// Neighbor topology of the scan grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridTopology {
    /// 1-D chain: q and q+1 are adjacent.
    Cut,
    /// Row-major 2-D lattice with 4-neighbor adjacency.
    Lattice { rows: usize, cols: usize },
}

/// Ordered scan directions `Ω_TOT` with a boresight anchor and adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    directions: Vec<Direction>,
    boresight: usize,
    topology: GridTopology,
}

impl ScanGrid {
    pub fn cut(directions: Vec<Direction>, boresight: usize) -> Result<Self, GridError> {
        if directions.is_empty() {
            return Err(GridError::Empty);
        }
        if boresight >= directions.len() {
            return Err(GridError::BoresightOutOfRange {
                index: boresight,
                len: directions.len(),
            });
        }
        Ok(Self {
            directions,
            boresight,
            topology: GridTopology::Cut,
        })
    }

    /// Row-major lattice: `directions[r * cols + c]`.
    pub fn lattice(
        directions: Vec<Direction>,
        rows: usize,
        cols: usize,
        boresight: usize,
    ) -> Result<Self, GridError> {
        if directions.is_empty() {
            return Err(GridError::Empty);
        }
        if rows * cols != directions.len() {
            return Err(GridError::LatticeShape {
                rows,
                cols,
                len: directions.len(),
            });
        }
        if boresight >= directions.len() {
            return Err(GridError::BoresightOutOfRange {
                index: boresight,
                len: directions.len(),
            });
        }
        Ok(Self {
            directions,
            boresight,
            topology: GridTopology::Lattice { rows, cols },
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, q: usize) -> Direction {
        self.directions[q]
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn boresight(&self) -> usize {
        self.boresight
    }

    pub fn topology(&self) -> GridTopology {
        self.topology
    }

    /// Row/column coordinates of q (row 0 for cuts).
    pub fn coords(&self, q: usize) -> (usize, usize) {
        match self.topology {
            GridTopology::Cut => (0, q),
            GridTopology::Lattice { cols, .. } => (q / cols, q % cols),
        }
    }

    /// Grid-adjacent neighbors of q (symmetric relation).
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(4);
        match self.topology {
            GridTopology::Cut => {
                if q > 0 {
                    out.push(q - 1);
                }
                if q + 1 < self.directions.len() {
                    out.push(q + 1);
                }
            }
            GridTopology::Lattice { rows, cols } => {
                let (r, c) = (q / cols, q % cols);
                if r > 0 {
                    out.push(q - cols);
                }
                if r + 1 < rows {
                    out.push(q + cols);
                }
                if c > 0 {
                    out.push(q - 1);
                }
                if c + 1 < cols {
                    out.push(q + 1);
                }
            }
        }
        out
    }
}

/// Standard (STD) excitations: unit magnitudes with the analytic linear
/// phase progression `∠w⁺_n = +k0·(r_n·r̂_q)`.
///
/// The positive sign pairs with the `e^{-j·k0·(r_n·r̂)}` far-field kernel so
/// the per-element phase terms cancel exactly along the scan direction.
/// Independent of the scattering matrix by construction.
pub fn std_weights(geometry: &ArrayGeometry, scan: Direction) -> Result<ExcitationSet, ModelError> {
    let rhat = scan.unit_vector();
    let k0 = geometry.wavenumber();
    let phases: Vec<f64> = geometry
        .positions()
        .iter()
        .map(|r| wrap_phase(k0 * dot3(r, &rhat)))
        .collect();
    ExcitationSet::phase_only(&phases, scan)
}

/// Wraps a phase into [-π, π).
pub fn wrap_phase(p: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = p - two_pi * ((p + std::f64::consts::PI) / two_pi).floor();
    // guard against w == π from rounding at the boundary
    if w >= std::f64::consts::PI {
        w - two_pi
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::PhysicsConstants;
    use approx::assert_relative_eq;

    #[test]
    fn broadside_phases_are_zero() {
        let c = PhysicsConstants::default();
        let g = ArrayGeometry::linear(5, 0.07, 2.0e9, &c).unwrap();
        // broadside of the y-axis array: rhat of (90, 0) is +x, orthogonal
        let e = std_weights(&g, Direction::new(90.0, 0.0)).unwrap();
        for p in e.phases_rad() {
            assert_relative_eq!(p, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn half_wave_scan_30deg_step() {
        let c = PhysicsConstants::default();
        let lambda = c.speed_of_light_m_s / 2.0e9;
        let g = ArrayGeometry::linear(4, 0.5 * lambda, 2.0e9, &c).unwrap();
        let e = std_weights(&g, Direction::new(90.0, 30.0)).unwrap();
        let p = e.phases_rad();
        // k0 d sin(30 deg) = pi/2
        for w in p.windows(2) {
            assert_relative_eq!(
                wrap_phase(w[1] - w[0]),
                std::f64::consts::FRAC_PI_2,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn magnitudes_always_unit() {
        let c = PhysicsConstants::default();
        let g = ArrayGeometry::linear(6, 0.06, 2.4e9, &c).unwrap();
        for phi in [-80.0, -15.0, 0.0, 33.0, 77.0] {
            let e = std_weights(&g, Direction::new(90.0, phi)).unwrap();
            for m in e.magnitudes() {
                assert_relative_eq!(m, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn wrap_phase_range() {
        for p in [-10.0, -std::f64::consts::PI, 0.0, 3.5, 12.7, 100.0] {
            let w = wrap_phase(p);
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&w));
            // same point on the circle
            assert_relative_eq!((p - w).rem_euclid(2.0 * std::f64::consts::PI), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn lattice_neighbors() {
        let dirs: Vec<Direction> = (0..6).map(|i| Direction::new(i as f64, 0.0)).collect();
        let g = ScanGrid::lattice(dirs, 2, 3, 0).unwrap();
        let mut n = g.neighbors(4); // row 1, col 1
        n.sort_unstable();
        assert_eq!(n, vec![1, 3, 5]);
        assert_eq!(g.coords(4), (1, 1));
        // symmetry
        for q in 0..g.len() {
            for &m in &g.neighbors(q) {
                assert!(g.neighbors(m).contains(&q));
            }
        }
    }

    #[test]
    fn cut_neighbors_are_chain() {
        let dirs: Vec<Direction> = (0..4).map(|i| Direction::new(90.0, i as f64)).collect();
        let g = ScanGrid::cut(dirs, 2).unwrap();
        assert_eq!(g.neighbors(0), vec![1]);
        assert_eq!(g.neighbors(3), vec![2]);
        let mut n = g.neighbors(2);
        n.sort_unstable();
        assert_eq!(n, vec![1, 3]);
    }
}
