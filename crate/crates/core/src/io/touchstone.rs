//! Version-1 Touchstone (.sNp) reader and writer, S-parameters only.
//!
//! Data lines carry the full N×N matrix row-major after the frequency
//! value; two-port files follow the same row-major layout. The document
//! stores the numeric pairs exactly as written so emit∘parse∘emit is
//! byte-stable for all three number formats.

use num_complex::Complex64;

use super::IoError;
use crate::array::ScatteringMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FrequencyUnit {
    pub fn multiplier(&self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::KHz => 1e3,
            FrequencyUnit::MHz => 1e6,
            FrequencyUnit::GHz => 1e9,
        }
    }

    fn token(&self) -> &'static str {
        match self {
            FrequencyUnit::Hz => "Hz",
            FrequencyUnit::KHz => "kHz",
            FrequencyUnit::MHz => "MHz",
            FrequencyUnit::GHz => "GHz",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "hz" => Some(FrequencyUnit::Hz),
            "khz" => Some(FrequencyUnit::KHz),
            "mhz" => Some(FrequencyUnit::MHz),
            "ghz" => Some(FrequencyUnit::GHz),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberFormat {
    RealImaginary,
    MagnitudeAngle,
    DbAngle,
}

impl NumberFormat {
    fn token(&self) -> &'static str {
        match self {
            NumberFormat::RealImaginary => "RI",
            NumberFormat::MagnitudeAngle => "MA",
            NumberFormat::DbAngle => "DB",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_uppercase().as_str() {
            "RI" => Some(NumberFormat::RealImaginary),
            "MA" => Some(NumberFormat::MagnitudeAngle),
            "DB" => Some(NumberFormat::DbAngle),
            _ => None,
        }
    }

    /// Pair as written in the file → complex value.
    pub fn to_complex(&self, a: f64, b: f64) -> Complex64 {
        match self {
            NumberFormat::RealImaginary => Complex64::new(a, b),
            NumberFormat::MagnitudeAngle => {
                let (sin, cos) = sin_cos_deg(b);
                Complex64::new(a * cos, a * sin)
            }
            NumberFormat::DbAngle => {
                let mag = 10f64.powf(a / 20.0);
                let (sin, cos) = sin_cos_deg(b);
                Complex64::new(mag * cos, mag * sin)
            }
        }
    }

    /// Complex value → pair as written in the file.
    pub fn from_complex(&self, z: Complex64) -> (f64, f64) {
        match self {
            NumberFormat::RealImaginary => (z.re, z.im),
            NumberFormat::MagnitudeAngle => (z.norm(), z.arg().to_degrees()),
            NumberFormat::DbAngle => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

/// Degree-exact sine/cosine: angles on the quadrant lattice (0, 90, 180,
/// 270, ...) map to exact 0/±1, which radian conversion cannot do. File
/// angles are conventionally quantized in degrees, so "0.5 90" must come
/// back as exactly 0.5j.
fn sin_cos_deg(angle_deg: f64) -> (f64, f64) {
    let a = angle_deg.rem_euclid(360.0);
    let quadrant = (a / 90.0).floor() as i32 % 4;
    let r = a - 90.0 * quadrant as f64;
    let (s, c) = if r == 0.0 {
        (0.0, 1.0)
    } else {
        r.to_radians().sin_cos()
    };
    match quadrant {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// One frequency point: the frequency in file units and the N² raw pairs
/// in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPoint {
    pub frequency: f64,
    pub pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneDocument {
    pub unit: FrequencyUnit,
    pub format: NumberFormat,
    pub reference_ohms: f64,
    pub ports: usize,
    pub points: Vec<FrequencyPoint>,
}

impl TouchstoneDocument {
    /// Parses version-1 content. The expected port count disambiguates
    /// wrapped data lines; `!` starts a comment, `#` the option line.
    pub fn parse(text: &str, ports: usize) -> Result<Self, IoError> {
        let mut unit = FrequencyUnit::GHz;
        let mut format = NumberFormat::MagnitudeAngle;
        let mut reference_ohms = 50.0;
        let mut option_seen = false;
        // numeric token stream with the line each token came from
        let mut tokens: Vec<(f64, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('!') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if option_seen {
                    return Err(IoError::Syntax {
                        line: line_no,
                        message: "second option line".into(),
                    });
                }
                option_seen = true;
                let mut it = rest.split_whitespace().peekable();
                while let Some(tok) = it.next() {
                    if let Some(u) = FrequencyUnit::parse(tok) {
                        unit = u;
                    } else if tok.eq_ignore_ascii_case("S") {
                        // parameter kind: only S supported
                    } else if let Some(f) = NumberFormat::parse(tok) {
                        format = f;
                    } else if tok.eq_ignore_ascii_case("R") {
                        let v = it.next().ok_or(IoError::Syntax {
                            line: line_no,
                            message: "R without impedance value".into(),
                        })?;
                        reference_ohms = v.parse().map_err(|_| IoError::Syntax {
                            line: line_no,
                            message: format!("bad impedance '{v}'"),
                        })?;
                    } else {
                        return Err(IoError::Syntax {
                            line: line_no,
                            message: format!("unsupported option token '{tok}'"),
                        });
                    }
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| IoError::Syntax {
                    line: line_no,
                    message: format!("bad number '{tok}'"),
                })?;
                tokens.push((v, line_no));
            }
        }

        if tokens.is_empty() {
            return Err(IoError::NoFrequencies);
        }
        let per_point = 1 + 2 * ports * ports;
        if tokens.len() % per_point != 0 {
            let (_, last_line) = tokens[tokens.len() - 1];
            return Err(IoError::Syntax {
                line: last_line,
                message: format!(
                    "{} numeric values do not form whole {}-port frequency points ({} per point)",
                    tokens.len(),
                    ports,
                    per_point
                ),
            });
        }

        let mut points = Vec::with_capacity(tokens.len() / per_point);
        for chunk in tokens.chunks(per_point) {
            let frequency = chunk[0].0;
            let pairs = chunk[1..]
                .chunks(2)
                .map(|p| (p[0].0, p[1].0))
                .collect::<Vec<_>>();
            points.push(FrequencyPoint { frequency, pairs });
        }
        // frequencies must be ascending for nearest-point selection to be
        // well defined; equal frequencies are rejected
        for w in points.windows(2) {
            if w[1].frequency <= w[0].frequency {
                return Err(IoError::Syntax {
                    line: 0,
                    message: format!(
                        "frequencies not strictly ascending: {} then {}",
                        w[0].frequency, w[1].frequency
                    ),
                });
            }
        }

        Ok(Self {
            unit,
            format,
            reference_ohms,
            ports,
            points,
        })
    }

    /// Builds a single-frequency document from a scattering matrix.
    pub fn from_matrix(
        s: &ScatteringMatrix,
        frequency_hz: f64,
        unit: FrequencyUnit,
        format: NumberFormat,
        reference_ohms: f64,
    ) -> Self {
        let pairs = s
            .entries()
            .iter()
            .map(|z| format.from_complex(*z))
            .collect();
        Self {
            unit,
            format,
            reference_ohms,
            ports: s.order(),
            points: vec![FrequencyPoint {
                frequency: frequency_hz / unit.multiplier(),
                pairs,
            }],
        }
    }

    /// Canonical text form: option line, then one matrix row per line with
    /// the frequency leading the first row of each point.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} S {} R {}\n",
            self.unit.token(),
            self.format.token(),
            self.reference_ohms
        ));
        for point in &self.points {
            for row in 0..self.ports {
                let mut line = String::new();
                if row == 0 {
                    line.push_str(&format!("{}", point.frequency));
                }
                for col in 0..self.ports {
                    let (a, b) = point.pairs[row * self.ports + col];
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&format!("{a} {b}"));
                }
                line.push('\n');
                out.push_str(&line);
            }
        }
        out
    }

    /// Scattering matrix nearest to `frequency_hz`; the second value is the
    /// relative deviation from the request (callers warn beyond 0.1%).
    pub fn matrix_at(&self, frequency_hz: f64) -> Result<(ScatteringMatrix, f64), IoError> {
        if self.points.is_empty() {
            return Err(IoError::NoFrequencies);
        }
        let mut best = 0;
        let mut best_err = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let err = (p.frequency * self.unit.multiplier() - frequency_hz).abs();
            if err < best_err {
                best_err = err;
                best = i;
            }
        }
        let point = &self.points[best];
        let entries = point
            .pairs
            .iter()
            .map(|(a, b)| self.format.to_complex(*a, *b))
            .collect();
        let matrix = ScatteringMatrix::new(self.ports, entries)?;
        let deviation = if frequency_hz > 0.0 {
            best_err / frequency_hz
        } else {
            0.0
        };
        Ok((matrix, deviation))
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.frequency * self.unit.multiplier())
            .collect()
    }
}
