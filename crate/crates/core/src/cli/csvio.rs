//! CSV emission and re-ingestion.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! re-reading a file reproduces the original f64 bit patterns and repeated
//! runs with the same seed produce byte-identical files.

use std::path::Path;

use num_complex::Complex64;

use super::CliError;
use crate::array::{Direction, ExcitationSet};
use crate::baseline::ScanGrid;
use crate::moea::ParetoArchive;
use crate::synthesis::ScanResult;

pub fn db10(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn write_records(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
    writer
        .write_record(header)
        .map_err(|e| CliError::Output(e.to_string()))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(())
}

fn excitation_columns(prefix_mag: &str, prefix_phase: &str, n: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * n);
    for i in 1..=n {
        cols.push(format!("{prefix_mag}{i}"));
    }
    for i in 1..=n {
        cols.push(format!("{prefix_phase}{i}"));
    }
    cols
}

fn excitation_values(weights: &[Complex64]) -> Vec<String> {
    let mut vals = Vec::with_capacity(2 * weights.len());
    for w in weights {
        vals.push(w.norm().to_string());
    }
    for w in weights {
        let mut deg = w.arg().to_degrees();
        if deg >= 180.0 {
            deg -= 360.0;
        }
        vals.push(deg.to_string());
    }
    vals
}

/// Per-direction rows of the baseline command.
pub struct BaselineRow {
    pub q: usize,
    pub scan: Direction,
    pub psi_w_sr: f64,
    pub zeta: f64,
    pub in_fov: bool,
    pub is_boresight: bool,
    pub grid_row: usize,
    pub grid_col: usize,
    pub excitation: ExcitationSet,
}

pub fn write_baseline_csv(path: &Path, n: usize, rows: &[BaselineRow]) -> Result<(), CliError> {
    let mut header = vec![
        "q".to_string(),
        "theta_q".to_string(),
        "phi_q".to_string(),
        "psi_scan_dbwsr".to_string(),
        "zeta".to_string(),
        "in_fov".to_string(),
        "psi_scan_w_sr".to_string(),
        "is_boresight".to_string(),
        "grid_row".to_string(),
        "grid_col".to_string(),
    ];
    header.extend((1..=n).map(|i| format!("phase_deg_{i}")));
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut rec = vec![
                r.q.to_string(),
                r.scan.theta_deg.to_string(),
                r.scan.phi_deg.to_string(),
                db10(r.psi_w_sr).to_string(),
                r.zeta.to_string(),
                (r.in_fov as u8).to_string(),
                r.psi_w_sr.to_string(),
                (r.is_boresight as u8).to_string(),
                r.grid_row.to_string(),
                r.grid_col.to_string(),
            ];
            rec.extend(excitation_values(r.excitation.weights())[n..].iter().cloned());
            rec
        })
        .collect();
    write_records(path, &header, &records)
}

pub fn summary_header(n: usize) -> Vec<String> {
    let mut header: Vec<String> = [
        "q",
        "theta_q",
        "phi_q",
        "is_boresight",
        "grid_row",
        "grid_col",
        "psi_std_w_sr",
        "psi_std_dbwsr",
        "zeta_std",
        "in_fov_std",
        "psi_po_w_sr",
        "psi_po_dbwsr",
        "zeta_po",
        "in_fov_po",
        "delta_zeta",
        "selected_fallback",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((1..=n).map(|i| format!("arl_std_db_{i}")));
    header.extend((1..=n).map(|i| format!("arl_po_db_{i}")));
    header
}

pub fn write_summary_csv(
    path: &Path,
    grid: &ScanGrid,
    results: &[ScanResult],
    std_fov: &[bool],
    po_fov: &[bool],
) -> Result<(), CliError> {
    let n = results
        .first()
        .map(|r| r.std_excitation.len())
        .unwrap_or(0);
    let records: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let (row, col) = grid.coords(r.q);
            let mut rec = vec![
                r.q.to_string(),
                r.scan.theta_deg.to_string(),
                r.scan.phi_deg.to_string(),
                ((r.q == grid.boresight()) as u8).to_string(),
                row.to_string(),
                col.to_string(),
                r.std.psi_w_sr.to_string(),
                db10(r.std.psi_w_sr).to_string(),
                r.std.zeta.to_string(),
                (std_fov[r.q] as u8).to_string(),
                r.selected.psi_w_sr.to_string(),
                db10(r.selected.psi_w_sr).to_string(),
                r.selected.zeta.to_string(),
                (po_fov[r.q] as u8).to_string(),
                (r.std.zeta - r.selected.zeta).to_string(),
                (r.selected_fallback as u8).to_string(),
            ];
            rec.extend(r.arl_std.iter().map(|a| db10(*a).to_string()));
            rec.extend(r.arl_selected.iter().map(|a| db10(*a).to_string()));
            rec
        })
        .collect();
    write_records(path, &summary_header(n), &records)
}

pub fn write_archive_csv(path: &Path, q: usize, archive: &ParetoArchive, weights_of: impl Fn(&[f64]) -> Vec<Complex64>) -> Result<(), CliError> {
    let first = archive.entries().first();
    let n = first.map(|e| weights_of(&e.decision).len()).unwrap_or(0);
    let mut header = vec![
        "q".to_string(),
        "phi_refl".to_string(),
        "phi_rad".to_string(),
    ];
    header.extend(excitation_columns("mag_", "phase_deg_", n));
    let records: Vec<Vec<String>> = archive
        .entries()
        .iter()
        .map(|e| {
            let mut rec = vec![
                q.to_string(),
                e.objectives[0].to_string(),
                e.objectives[1].to_string(),
            ];
            rec.extend(excitation_values(&weights_of(&e.decision)));
            rec
        })
        .collect();
    write_records(path, &header, &records)
}

pub fn write_selected_csv(path: &Path, results: &[ScanResult]) -> Result<(), CliError> {
    let n = results
        .first()
        .map(|r| r.selected_excitation.len())
        .unwrap_or(0);
    let mut header = vec![
        "q".to_string(),
        "phi_refl".to_string(),
        "phi_rad".to_string(),
    ];
    header.extend(excitation_columns("mag_", "phase_deg_", n));
    let records: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut rec = vec![
                r.q.to_string(),
                r.selected.objectives[0].to_string(),
                r.selected.objectives[1].to_string(),
            ];
            rec.extend(excitation_values(r.selected_excitation.weights()));
            rec
        })
        .collect();
    write_records(path, &header, &records)
}

/// A CSV parsed into headers plus string-preserving rows.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| CliError::Ingestion(format!("cannot read {}: {e}", path.display())))?;
        let header = reader
            .headers()
            .map_err(|e| CliError::Ingestion(e.to_string()))?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| CliError::Ingestion(e.to_string()))?;
            rows.push(record.iter().map(|s| s.to_string()).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Ingestion(format!("missing CSV column '{name}'")))
    }

    pub fn f64_at(&self, row: usize, col: usize) -> Result<f64, CliError> {
        self.rows[row][col]
            .parse()
            .map_err(|e| CliError::Ingestion(format!("row {row}: bad float: {e}")))
    }

    pub fn usize_at(&self, row: usize, col: usize) -> Result<usize, CliError> {
        self.rows[row][col]
            .parse()
            .map_err(|e| CliError::Ingestion(format!("row {row}: bad integer: {e}")))
    }

    pub fn bool_at(&self, row: usize, col: usize) -> Result<bool, CliError> {
        match self.rows[row][col].as_str() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(CliError::Ingestion(format!(
                "row {row}: bad boolean '{other}'"
            ))),
        }
    }

    /// Reconstructs weights from `mag_i`/`phase_deg_i` columns.
    pub fn weights_at(&self, row: usize, n: usize) -> Result<Vec<Complex64>, CliError> {
        let mut weights = Vec::with_capacity(n);
        for i in 1..=n {
            let mag = self.f64_at(row, self.column(&format!("mag_{i}"))?)?;
            let phase = self.f64_at(row, self.column(&format!("phase_deg_{i}"))?)?;
            weights.push(Complex64::from_polar(mag, phase.to_radians()));
        }
        Ok(weights)
    }
}
