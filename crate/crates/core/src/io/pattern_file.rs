//! Line-oriented element-pattern file format.
//!
//! Header lines declare the element count and the inclusive angle ranges,
//! then CSV rows carry one grid node per line:
//!
//! ```text
//! # optional comment
//! N=2
//! THETA=0:5:180
//! PHI=0:5:355
//! elem,theta,phi,reEt,imEt,reEp,imEp
//! 0,0,0,1,0,0,0
//! ...
//! ```
//!
//! Angles are degrees. Rows may appear in any order but the grid must be
//! complete for every element with no duplicate nodes.

use num_complex::Complex64;

use super::IoError;
use crate::array::{AngleAxis, AngleGrid, ElementPattern, ElementPatternSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub start_deg: f64,
    pub step_deg: f64,
    pub stop_deg: f64,
}

impl AxisRange {
    fn count(&self) -> usize {
        ((self.stop_deg - self.start_deg) / self.step_deg).round() as usize + 1
    }

    fn node(&self, value: f64) -> Option<usize> {
        let t = (value - self.start_deg) / self.step_deg;
        let i = t.round();
        if (t - i).abs() > 1e-6 || i < 0.0 || i as usize >= self.count() {
            None
        } else {
            Some(i as usize)
        }
    }
}

/// Parsed pattern file; raw node values are kept exactly as read so a
/// parse→emit cycle is byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDocument {
    pub elements: usize,
    pub theta: AxisRange,
    pub phi: AxisRange,
    /// `[element][theta_index * n_phi + phi_index]` complex (E_theta, E_phi).
    pub values: Vec<Vec<(Complex64, Complex64)>>,
}

fn parse_axis(line: usize, text: &str) -> Result<AxisRange, IoError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(IoError::Syntax {
            line,
            message: format!("expected start:step:stop, got '{text}'"),
        });
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| IoError::Syntax {
                line,
                message: format!("bad number '{p}' in axis range"),
            })
        })
        .collect::<Result<_, _>>()?;
    let range = AxisRange {
        start_deg: nums[0],
        step_deg: nums[1],
        stop_deg: nums[2],
    };
    if !(range.step_deg > 0.0) || range.stop_deg < range.start_deg {
        return Err(IoError::Syntax {
            line,
            message: format!("invalid axis range '{text}'"),
        });
    }
    let span = range.stop_deg - range.start_deg;
    let n = (span / range.step_deg).round();
    if (n * range.step_deg - span).abs() > 1e-6 {
        return Err(IoError::Syntax {
            line,
            message: format!("step does not divide range in '{text}'"),
        });
    }
    Ok(range)
}

pub fn parse_pattern_file(text: &str) -> Result<PatternDocument, IoError> {
    let mut elements: Option<usize> = None;
    let mut theta: Option<AxisRange> = None;
    let mut phi: Option<AxisRange> = None;
    let mut filled: Vec<Vec<bool>> = Vec::new();
    let mut values: Vec<Vec<(Complex64, Complex64)>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("N=") {
            elements = Some(rest.trim().parse().map_err(|_| IoError::Syntax {
                line: line_no,
                message: format!("bad element count '{rest}'"),
            })?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("THETA=") {
            theta = Some(parse_axis(line_no, rest)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("PHI=") {
            phi = Some(parse_axis(line_no, rest)?);
            continue;
        }
        if line.starts_with("elem") {
            continue; // column header
        }

        let (n, t, p) = match (elements, theta, phi) {
            (Some(n), Some(t), Some(p)) => (n, t, p),
            _ => {
                return Err(IoError::Syntax {
                    line: line_no,
                    message: "data row before N=/THETA=/PHI= headers".into(),
                })
            }
        };
        if filled.is_empty() {
            let nodes = t.count() * p.count();
            filled = vec![vec![false; nodes]; n];
            values = vec![vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); nodes]; n];
        }

        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(IoError::Syntax {
                line: line_no,
                message: format!("expected 7 comma-separated fields, got {}", fields.len()),
            });
        }
        let elem: usize = fields[0].trim().parse().map_err(|_| IoError::Syntax {
            line: line_no,
            message: format!("bad element index '{}'", fields[0]),
        })?;
        if elem >= n {
            return Err(IoError::Syntax {
                line: line_no,
                message: format!("element index {elem} out of range (N = {n})"),
            });
        }
        let mut nums = [0.0f64; 6];
        for (k, f) in fields[1..].iter().enumerate() {
            nums[k] = f.trim().parse().map_err(|_| IoError::Syntax {
                line: line_no,
                message: format!("bad number '{f}'"),
            })?;
        }
        let it = t.node(nums[0]).ok_or(IoError::Syntax {
            line: line_no,
            message: format!("theta {} not on the declared grid", nums[0]),
        })?;
        let ip = p.node(nums[1]).ok_or(IoError::Syntax {
            line: line_no,
            message: format!("phi {} not on the declared grid", nums[1]),
        })?;
        let node = it * p.count() + ip;
        if filled[elem][node] {
            return Err(IoError::DuplicateNode {
                element: elem,
                theta_deg: nums[0],
                phi_deg: nums[1],
            });
        }
        filled[elem][node] = true;
        values[elem][node] = (
            Complex64::new(nums[2], nums[3]),
            Complex64::new(nums[4], nums[5]),
        );
    }

    let (elements, theta, phi) = match (elements, theta, phi) {
        (Some(n), Some(t), Some(p)) => (n, t, p),
        _ => {
            return Err(IoError::Syntax {
                line: 0,
                message: "missing N=/THETA=/PHI= headers".into(),
            })
        }
    };
    if filled.is_empty() {
        return Err(IoError::Syntax {
            line: 0,
            message: "no data rows".into(),
        });
    }
    // report the first hole in (element, theta, phi) order
    for (elem, marks) in filled.iter().enumerate() {
        for (node, seen) in marks.iter().enumerate() {
            if !seen {
                let it = node / phi.count();
                let ip = node % phi.count();
                return Err(IoError::GridHole {
                    element: elem,
                    theta_deg: theta.start_deg + theta.step_deg * it as f64,
                    phi_deg: phi.start_deg + phi.step_deg * ip as f64,
                });
            }
        }
    }

    Ok(PatternDocument {
        elements,
        theta,
        phi,
        values,
    })
}

/// Canonical text form with rows in element-major, theta-major order.
pub fn emit_pattern_file(doc: &PatternDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("N={}\n", doc.elements));
    out.push_str(&format!(
        "THETA={}:{}:{}\n",
        doc.theta.start_deg, doc.theta.step_deg, doc.theta.stop_deg
    ));
    out.push_str(&format!(
        "PHI={}:{}:{}\n",
        doc.phi.start_deg, doc.phi.step_deg, doc.phi.stop_deg
    ));
    out.push_str("elem,theta,phi,reEt,imEt,reEp,imEp\n");
    for elem in 0..doc.elements {
        for it in 0..doc.theta.count() {
            for ip in 0..doc.phi.count() {
                let (et, ep) = doc.values[elem][it * doc.phi.count() + ip];
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    elem,
                    doc.theta.start_deg + doc.theta.step_deg * it as f64,
                    doc.phi.start_deg + doc.phi.step_deg * ip as f64,
                    et.re,
                    et.im,
                    ep.re,
                    ep.im
                ));
            }
        }
    }
    out
}

impl PatternDocument {
    pub fn from_pattern_set(set: &ElementPatternSet) -> Self {
        let grid = set.grid();
        let theta = AxisRange {
            start_deg: grid.theta().start_deg(),
            step_deg: grid.theta().step_deg(),
            stop_deg: grid.theta().stop_deg(),
        };
        let phi = AxisRange {
            start_deg: grid.phi().start_deg(),
            step_deg: grid.phi().step_deg(),
            stop_deg: grid.phi().stop_deg(),
        };
        let values = (0..set.len())
            .map(|n| {
                let e = set.element(n);
                e.e_theta
                    .iter()
                    .zip(&e.e_phi)
                    .map(|(t, p)| (*t, *p))
                    .collect()
            })
            .collect();
        Self {
            elements: set.len(),
            theta,
            phi,
            values,
        }
    }

    pub fn to_pattern_set(&self) -> Result<ElementPatternSet, IoError> {
        let theta = AngleAxis::from_range(self.theta.start_deg, self.theta.step_deg, self.theta.stop_deg)?;
        let phi = AngleAxis::from_range(self.phi.start_deg, self.phi.step_deg, self.phi.stop_deg)?;
        let grid = AngleGrid::new(theta, phi)?;
        let elements = self
            .values
            .iter()
            .map(|nodes| ElementPattern {
                e_theta: nodes.iter().map(|(t, _)| *t).collect(),
                e_phi: nodes.iter().map(|(_, p)| *p).collect(),
            })
            .collect();
        Ok(ElementPatternSet::new(grid, elements)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::Direction;
    use approx::assert_relative_eq;

    fn isotropic_text(n: usize) -> String {
        let mut s = format!("# fixture\nN={n}\nTHETA=0:90:180\nPHI=0:90:270\n");
        s.push_str("elem,theta,phi,reEt,imEt,reEp,imEp\n");
        for e in 0..n {
            for it in 0..3 {
                for ip in 0..4 {
                    let scale = (e + 1) as f64;
                    s.push_str(&format!("{e},{},{},{scale},0,0,0\n", it * 90, ip * 90));
                }
            }
        }
        s
    }

    #[test]
    fn isotropic_roundtrip() {
        let text = isotropic_text(1);
        let doc = parse_pattern_file(&text).unwrap();
        let set = doc.to_pattern_set().unwrap();
        let (et, ep) = set.sample(0, Direction::new(45.0, 45.0)).unwrap();
        assert_relative_eq!(et.re, 1.0);
        assert_relative_eq!(ep.norm(), 0.0);
    }

    #[test]
    fn distinct_elements_stay_distinct() {
        let text = isotropic_text(2);
        let doc = parse_pattern_file(&text).unwrap();
        let set = doc.to_pattern_set().unwrap();
        let (e1, _) = set.sample(0, Direction::new(90.0, 0.0)).unwrap();
        let (e2, _) = set.sample(1, Direction::new(90.0, 0.0)).unwrap();
        assert_relative_eq!(e1.re, 1.0);
        assert_relative_eq!(e2.re, 2.0);
    }

    #[test]
    fn duplicate_node_rejected() {
        let mut text = isotropic_text(1);
        text.push_str("0,0,0,1,0,0,0\n");
        assert!(matches!(
            parse_pattern_file(&text),
            Err(IoError::DuplicateNode {
                element: 0,
                ..
            })
        ));
    }

    #[test]
    fn hole_reports_first_missing_node() {
        let text = isotropic_text(1);
        // drop the row for theta=90, phi=180
        let filtered: String = text
            .lines()
            .filter(|l| *l != "0,90,180,1,0,0,0")
            .map(|l| format!("{l}\n"))
            .collect();
        match parse_pattern_file(&filtered) {
            Err(IoError::GridHole {
                element,
                theta_deg,
                phi_deg,
            }) => {
                assert_eq!(element, 0);
                assert_relative_eq!(theta_deg, 90.0);
                assert_relative_eq!(phi_deg, 180.0);
            }
            other => panic!("expected grid hole, got {other:?}"),
        }
    }

    #[test]
    fn emit_parse_emit_is_byte_stable() {
        let text = isotropic_text(2);
        let doc = parse_pattern_file(&text).unwrap();
        let emitted = emit_pattern_file(&doc);
        let reparsed = parse_pattern_file(&emitted).unwrap();
        assert_eq!(reparsed, doc);
        assert_eq!(emit_pattern_file(&reparsed), emitted);
    }

    #[test]
    fn off_grid_angle_rejected() {
        let mut text = String::from("N=1\nTHETA=0:90:180\nPHI=0:90:270\n");
        text.push_str("0,45,0,1,0,0,0\n");
        assert!(matches!(
            parse_pattern_file(&text),
            Err(IoError::Syntax { .. })
        ));
    }
}
