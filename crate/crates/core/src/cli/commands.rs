//! The five subcommands: fixture generation, baseline evaluation, full
//! synthesis, field-of-view re-analysis and metric tables.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::RunConfig;
use super::csvio::{
    db10, write_archive_csv, write_baseline_csv, write_selected_csv, write_summary_csv,
    BaselineRow, CsvTable,
};
use super::CliError;
use crate::array::{ArrayModel, Direction, ExcitationSet};
use crate::baseline::{std_weights, ScanGrid};
use crate::io::{emit_pattern_file, FrequencyUnit, NumberFormat, PatternDocument, TouchstoneDocument};
use crate::synthesis::{
    beam_metrics, fov, fov_from_mask, sweep, FovReport, ScanProblem, SweepOutcome,
};

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::Output(format!("cannot create {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Emits the synthetic fixture as re-ingestible files: a version-1
/// Touchstone for the coupling and a pattern grid file.
pub fn cmd_gen_fixture(
    config: &RunConfig,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<(), CliError> {
    let spec = config.synthetic_coupling_spec().ok_or_else(|| {
        CliError::Config("gen-fixture needs scattering.source = \"synthetic\"".into())
    })?;
    let geometry = config.build_geometry()?;
    let matrix = crate::io::synthetic_coupling(&geometry, &spec)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let patterns = match &config.patterns {
        super::config::PatternConfig::Analytic { .. } => {
            config.build_patterns(&geometry, base_dir)?
        }
        super::config::PatternConfig::File { .. } => {
            return Err(CliError::Config(
                "gen-fixture needs patterns.source = \"analytic\"".into(),
            ))
        }
    };

    ensure_dir(out_dir)?;
    let touchstone = TouchstoneDocument::from_matrix(
        &matrix,
        config.frequency_hz,
        FrequencyUnit::Hz,
        NumberFormat::RealImaginary,
        50.0,
    );
    let ts_path = out_dir.join(format!("fixture.s{}p", geometry.len()));
    write_text(&ts_path, &touchstone.emit())?;

    let doc = PatternDocument::from_pattern_set(&patterns);
    let pattern_path = out_dir.join("patterns.csv");
    write_text(&pattern_path, &emit_pattern_file(&doc))?;

    println!("wrote {}", ts_path.display());
    println!("wrote {}", pattern_path.display());
    Ok(())
}

/// Evaluates the linear-phase baseline over the scan grid.
pub fn cmd_baseline(config: &RunConfig, base_dir: &Path, out_dir: &Path) -> Result<(), CliError> {
    let (model, warnings) = config.build_model(base_dir)?;
    print_warnings(&warnings);
    let grid = config.build_grid()?;
    let fov_spec = config.fov_spec()?;

    let mut series = Vec::with_capacity(grid.len());
    let mut excitations = Vec::with_capacity(grid.len());
    for q in 0..grid.len() {
        let scan = grid.direction(q);
        let excitation = std_weights(model.geometry(), scan)
            .map_err(|e| CliError::Synthesis(e.to_string()))?
            .with_scan_index(q);
        let psi = model
            .power_density(&excitation, scan)
            .map_err(|e| CliError::Synthesis(e.to_string()))?;
        let zeta = model
            .scattering()
            .reflected_power_fraction(&excitation)
            .map_err(|e| CliError::Synthesis(e.to_string()))?;
        series.push((psi, zeta));
        excitations.push(excitation);
    }
    let report =
        fov(&grid, &series, None, &fov_spec).map_err(|e| CliError::Synthesis(e.to_string()))?;
    let mut in_fov = vec![false; grid.len()];
    for &q in &report.std.fov_indices {
        in_fov[q] = true;
    }

    ensure_dir(out_dir)?;
    let rows: Vec<BaselineRow> = (0..grid.len())
        .map(|q| {
            let (grid_row, grid_col) = grid.coords(q);
            BaselineRow {
                q,
                scan: grid.direction(q),
                psi_w_sr: series[q].0,
                zeta: series[q].1,
                in_fov: in_fov[q],
                is_boresight: q == grid.boresight(),
                grid_row,
                grid_col,
                excitation: excitations[q].clone(),
            }
        })
        .collect();
    let path = out_dir.join("baseline.csv");
    write_baseline_csv(&path, model.len(), &rows)?;
    println!(
        "baseline: Q = {}, alpha_fov = {:.4}, psi_th = {} W/sr",
        grid.len(),
        report.std.alpha,
        report.psi_threshold_w_sr
    );
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct SynthesisReport<'c> {
    alpha_fov_std: f64,
    alpha_fov_po: f64,
    delta_alpha_fov: f64,
    delta_zeta_max: Option<f64>,
    psi_threshold_w_sr: f64,
    zeta_threshold: f64,
    q_total: usize,
    q_fov_std: usize,
    q_fov_po: usize,
    boresight_index: usize,
    boresight_feasible_std: bool,
    boresight_feasible_po: bool,
    fallback_count: usize,
    seed: u64,
    runtime_seconds: f64,
    config: &'c RunConfig,
}

/// Full per-angle synthesis plus all result files.
pub fn cmd_synthesize(
    config: &RunConfig,
    base_dir: &Path,
    out_dir: &Path,
    audit: bool,
) -> Result<(), CliError> {
    let started = Instant::now();
    let (model, warnings) = config.build_model(base_dir)?;
    print_warnings(&warnings);
    let grid = config.build_grid()?;
    let params = config.sweep_params()?;

    let outcome = run_sweep(config, &model, &grid, &params)?;
    let report = &outcome.fov;
    let po = report
        .optimized
        .as_ref()
        .expect("sweep always produces the optimized series");

    let mut std_fov = vec![false; grid.len()];
    for &q in &report.std.fov_indices {
        std_fov[q] = true;
    }
    let mut po_fov = vec![false; grid.len()];
    for &q in &po.fov_indices {
        po_fov[q] = true;
    }

    ensure_dir(out_dir)?;
    let archive_dir = out_dir.join("archives");
    ensure_dir(&archive_dir)?;
    for r in &outcome.per_scan {
        let path = archive_dir.join(format!("archive_q{:03}.csv", r.q));
        let feasibility = params.feasibility;
        let scan = r.scan;
        write_archive_csv(&path, r.q, &r.archive, |x| {
            feasibility
                .decode(x, scan)
                .map(|e| e.weights().to_vec())
                .unwrap_or_default()
        })?;
    }
    write_summary_csv(
        &out_dir.join("summary.csv"),
        &grid,
        &outcome.per_scan,
        &std_fov,
        &po_fov,
    )?;
    write_selected_csv(&out_dir.join("selected.csv"), &outcome.per_scan)?;

    let fallback_count = outcome.per_scan.iter().filter(|r| r.selected_fallback).count();
    let doc = SynthesisReport {
        alpha_fov_std: report.std.alpha,
        alpha_fov_po: po.alpha,
        delta_alpha_fov: po.alpha - report.std.alpha,
        delta_zeta_max: report.delta_zeta_max,
        psi_threshold_w_sr: report.psi_threshold_w_sr,
        zeta_threshold: params.fov.zeta_threshold,
        q_total: grid.len(),
        q_fov_std: report.std.q_fov,
        q_fov_po: po.q_fov,
        boresight_index: grid.boresight(),
        boresight_feasible_std: report.std.boresight_feasible,
        boresight_feasible_po: po.boresight_feasible,
        fallback_count,
        seed: params.moea.seed,
        runtime_seconds: started.elapsed().as_secs_f64(),
        config,
    };
    let json = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Output(e.to_string()))?;
    write_text(&out_dir.join("report.json"), &json)?;

    println!(
        "synthesize: alpha_std = {:.4}, alpha_po = {:.4}, delta_alpha = {:.4}, delta_zeta_max = {:?}, fallbacks = {}",
        doc.alpha_fov_std, doc.alpha_fov_po, doc.delta_alpha_fov, doc.delta_zeta_max, fallback_count
    );

    if audit {
        audit_run(config, base_dir, out_dir)?;
        println!("audit: all emitted objectives re-derived within 1e-9 relative");
    }
    Ok(())
}

fn run_sweep(
    config: &RunConfig,
    model: &ArrayModel,
    grid: &ScanGrid,
    params: &crate::synthesis::SweepParams,
) -> Result<SweepOutcome, CliError> {
    let work = || sweep(model, grid, params).map_err(|e| CliError::Synthesis(e.to_string()));
    if config.output.workers == 0 {
        work()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.output.workers)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?;
        pool.install(work)
    }
}

fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() <= tol * scale
}

/// Re-derives every emitted objective value from the emitted excitations
/// and the ingested model.
pub fn audit_run(config: &RunConfig, base_dir: &Path, out_dir: &Path) -> Result<(), CliError> {
    let (model, _) = config.build_model(base_dir)?;
    let grid = config.build_grid()?;
    let feasibility = config.feasibility_spec()?;

    let mut tables: Vec<(PathBuf, usize)> = Vec::new();
    for q in 0..grid.len() {
        tables.push((out_dir.join(format!("archives/archive_q{q:03}.csv")), q));
    }

    for (path, q) in tables {
        let table = CsvTable::read(&path)?;
        let scan = grid.direction(q);
        let problem = ScanProblem::new(&model, scan, feasibility)
            .map_err(|e| CliError::Synthesis(e.to_string()))?;
        let refl_col = table.column("phi_refl")?;
        let rad_col = table.column("phi_rad")?;
        for row in 0..table.rows.len() {
            let weights = table.weights_at(row, model.len())?;
            let recomputed = problem
                .evaluate_weights(&weights)
                .map_err(|e| CliError::Synthesis(e.to_string()))?;
            let stored = [table.f64_at(row, refl_col)?, table.f64_at(row, rad_col)?];
            for k in 0..2 {
                if !relative_close(recomputed[k], stored[k], 1e-9) {
                    return Err(CliError::Synthesis(format!(
                        "audit mismatch in {} row {row}: stored {} vs recomputed {}",
                        path.display(),
                        stored[k],
                        recomputed[k]
                    )));
                }
            }
        }
    }

    // selected.csv against the summary columns
    let selected = CsvTable::read(&out_dir.join("selected.csv"))?;
    let summary = CsvTable::read(&out_dir.join("summary.csv"))?;
    let psi_po = summary.column("psi_po_w_sr")?;
    let zeta_po = summary.column("zeta_po")?;
    for row in 0..selected.rows.len() {
        let q = selected.usize_at(row, selected.column("q")?)?;
        let scan = grid.direction(q);
        let problem = ScanProblem::new(&model, scan, feasibility)
            .map_err(|e| CliError::Synthesis(e.to_string()))?;
        let weights = selected.weights_at(row, model.len())?;
        let recomputed = problem
            .evaluate_weights(&weights)
            .map_err(|e| CliError::Synthesis(e.to_string()))?;
        let stored_zeta = summary.f64_at(row, zeta_po)?;
        let stored_psi = summary.f64_at(row, psi_po)?;
        if !relative_close(recomputed[0], stored_zeta, 1e-9)
            || !relative_close(1.0 / recomputed[1], stored_psi, 1e-9)
        {
            return Err(CliError::Synthesis(format!(
                "audit mismatch for selected q {q}: zeta {stored_zeta} psi {stored_psi}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct FovDocument {
    psi_threshold_w_sr: f64,
    zeta_threshold: f64,
    report: FovReport,
}

/// Recomputes the field of view from an emitted per-direction CSV.
pub fn cmd_fov(
    config: &RunConfig,
    summary_path: &Path,
    out_dir: &Path,
    audit: bool,
) -> Result<(), CliError> {
    let table = CsvTable::read(summary_path)?;
    let fov_spec = config.fov_spec()?;
    let grid = grid_from_table(&table)?;

    let two_method = table.header.iter().any(|h| h == "zeta_po");
    let (std_series, po_series) = if two_method {
        let psi_std = table.column("psi_std_w_sr")?;
        let zeta_std = table.column("zeta_std")?;
        let psi_po = table.column("psi_po_w_sr")?;
        let zeta_po = table.column("zeta_po")?;
        let mut std_s = Vec::with_capacity(table.rows.len());
        let mut po_s = Vec::with_capacity(table.rows.len());
        for row in 0..table.rows.len() {
            std_s.push((table.f64_at(row, psi_std)?, table.f64_at(row, zeta_std)?));
            po_s.push((table.f64_at(row, psi_po)?, table.f64_at(row, zeta_po)?));
        }
        (std_s, Some(po_s))
    } else {
        let psi = table.column("psi_scan_w_sr")?;
        let zeta = table.column("zeta")?;
        let mut std_s = Vec::with_capacity(table.rows.len());
        for row in 0..table.rows.len() {
            std_s.push((table.f64_at(row, psi)?, table.f64_at(row, zeta)?));
        }
        (std_s, None)
    };

    let report = fov(&grid, &std_series, po_series.as_deref(), &fov_spec)
        .map_err(|e| CliError::Synthesis(e.to_string()))?;

    if audit {
        audit_fov_columns(&table, &grid, &report, two_method)?;
        println!("audit: emitted in_fov columns match the recomputed report");
    }

    ensure_dir(out_dir)?;
    let doc = FovDocument {
        psi_threshold_w_sr: report.psi_threshold_w_sr,
        zeta_threshold: fov_spec.zeta_threshold,
        report,
    };
    let json =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
    let path = out_dir.join("fov_report.json");
    write_text(&path, &json)?;
    println!(
        "fov: alpha_std = {:.4}{}",
        doc.report.std.alpha,
        doc.report
            .optimized
            .as_ref()
            .map(|po| format!(", alpha_po = {:.4}", po.alpha))
            .unwrap_or_default()
    );
    if !doc.report.std.boresight_feasible {
        println!("fov: boresight infeasible, field of view is empty");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn grid_from_table(table: &CsvTable) -> Result<ScanGrid, CliError> {
    let theta = table.column("theta_q")?;
    let phi = table.column("phi_q")?;
    let row_col = table.column("grid_row")?;
    let col_col = table.column("grid_col")?;
    let boresight_col = table.column("is_boresight")?;

    let mut directions = Vec::with_capacity(table.rows.len());
    let mut max_row = 0usize;
    let mut max_col = 0usize;
    let mut boresight = None;
    for row in 0..table.rows.len() {
        directions.push(Direction::new(
            table.f64_at(row, theta)?,
            table.f64_at(row, phi)?,
        ));
        max_row = max_row.max(table.usize_at(row, row_col)?);
        max_col = max_col.max(table.usize_at(row, col_col)?);
        if table.bool_at(row, boresight_col)? {
            if boresight.is_some() {
                return Err(CliError::Ingestion("multiple boresight rows".into()));
            }
            boresight = Some(row);
        }
    }
    let boresight =
        boresight.ok_or_else(|| CliError::Ingestion("no boresight row flagged".into()))?;
    let grid = if max_row == 0 {
        ScanGrid::cut(directions, boresight)
    } else {
        ScanGrid::lattice(directions, max_row + 1, max_col + 1, boresight)
    };
    grid.map_err(|e| CliError::Ingestion(e.to_string()))
}

fn audit_fov_columns(
    table: &CsvTable,
    grid: &ScanGrid,
    report: &FovReport,
    two_method: bool,
) -> Result<(), CliError> {
    let compare = |col: usize, fov_indices: &[usize], label: &str| -> Result<(), CliError> {
        let mut expected = vec![false; grid.len()];
        for &q in fov_indices {
            expected[q] = true;
        }
        for row in 0..table.rows.len() {
            let stored = table.bool_at(row, col)?;
            if stored != expected[row] {
                return Err(CliError::Synthesis(format!(
                    "fov audit mismatch at q {row} ({label}): stored {stored}, recomputed {}",
                    expected[row]
                )));
            }
        }
        Ok(())
    };
    if two_method {
        compare(
            table.column("in_fov_std")?,
            &report.std.fov_indices,
            "std",
        )?;
        if let Some(po) = &report.optimized {
            compare(table.column("in_fov_po")?, &po.fov_indices, "po")?;
        }
    } else {
        compare(table.column("in_fov")?, &report.std.fov_indices, "std")?;
    }
    Ok(())
}

/// Tabulates ψ, ζ, SLL, gain and pointing error for the baseline and the
/// synthesized excitations at selected scan indices.
pub fn cmd_report(
    config: &RunConfig,
    base_dir: &Path,
    run_dir: &Path,
    q_values: &[usize],
    out_dir: &Path,
) -> Result<(), CliError> {
    let (model, warnings) = config.build_model(base_dir)?;
    print_warnings(&warnings);
    let grid = config.build_grid()?;

    let selected = CsvTable::read(&run_dir.join("selected.csv"))?;
    let q_col = selected.column("q")?;
    let find_row = |q: usize| -> Option<usize> {
        (0..selected.rows.len()).find(|row| {
            selected
                .usize_at(*row, q_col)
                .map(|v| v == q)
                .unwrap_or(false)
        })
    };

    let targets: Vec<usize> = if q_values.is_empty() {
        if config.report.q_values.is_empty() {
            (0..grid.len()).collect()
        } else {
            config.report.q_values.clone()
        }
    } else {
        q_values.to_vec()
    };
    for &q in &targets {
        if q >= grid.len() {
            return Err(CliError::Config(format!(
                "q {q} outside the scan grid; valid range is 0..={}",
                grid.len() - 1
            )));
        }
    }

    let header: Vec<String> = [
        "q",
        "theta_q",
        "phi_q",
        "psi_std_dbwsr",
        "psi_po_dbwsr",
        "zeta_std",
        "zeta_po",
        "sll_std_db",
        "sll_po_db",
        "g_std_dbi",
        "g_po_dbi",
        "dtheta_std_deg",
        "dtheta_po_deg",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut records = Vec::with_capacity(targets.len());
    for &q in &targets {
        let scan = grid.direction(q);
        let std_exc = std_weights(model.geometry(), scan)
            .map_err(|e| CliError::Synthesis(e.to_string()))?;
        let row = find_row(q).ok_or_else(|| {
            CliError::Ingestion(format!("selected.csv has no row for q {q}"))
        })?;
        let po_exc = ExcitationSet::magnitude_phase(selected.weights_at(row, model.len())?, scan)
            .map_err(|e| CliError::Ingestion(e.to_string()))?;

        let mut row_values = vec![q.to_string(), scan.theta_deg.to_string(), scan.phi_deg.to_string()];
        let mut psi_cols = Vec::new();
        let mut zeta_cols = Vec::new();
        let mut sll_cols = Vec::new();
        let mut gain_cols = Vec::new();
        let mut dtheta_cols = Vec::new();
        for exc in [&std_exc, &po_exc] {
            let psi = model
                .power_density(exc, scan)
                .map_err(|e| CliError::Synthesis(e.to_string()))?;
            let zeta = model
                .scattering()
                .reflected_power_fraction(exc)
                .map_err(|e| CliError::Synthesis(e.to_string()))?;
            let metrics = beam_metrics(&model, exc, scan, &config.metrics)
                .map_err(|e| CliError::Synthesis(e.to_string()))?;
            psi_cols.push(db10(psi).to_string());
            zeta_cols.push(zeta.to_string());
            sll_cols.push(metrics.sll_db.to_string());
            gain_cols.push(metrics.gain_dbi.to_string());
            dtheta_cols.push(metrics.scan_error_deg.to_string());
        }
        row_values.extend(psi_cols);
        row_values.extend(zeta_cols);
        row_values.extend(sll_cols);
        row_values.extend(gain_cols);
        row_values.extend(dtheta_cols);
        records.push(row_values);
    }

    ensure_dir(out_dir)?;
    let path = out_dir.join("report_table.csv");
    let mut writer = csv::Writer::from_path(&path)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
    writer
        .write_record(&header)
        .map_err(|e| CliError::Output(e.to_string()))?;
    for record in &records {
        writer
            .write_record(record)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Output(e.to_string()))?;

    // aligned console table
    println!("{}", header.join("\t"));
    for record in &records {
        let rounded: Vec<String> = record
            .iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) if v.contains('.') => format!("{x:.3}"),
                _ => v.clone(),
            })
            .collect();
        println!("{}", rounded.join("\t"));
    }
    println!("wrote {}", path.display());
    Ok(())
}

/// Repeats the connected-component analysis on the mask columns of an
/// emitted CSV without touching the thresholds; used by tests.
pub fn recompute_masks(table: &CsvTable, mask_column: &str) -> Result<Vec<bool>, CliError> {
    let grid = grid_from_table(table)?;
    let col = table.column(mask_column)?;
    let mut mask = Vec::with_capacity(table.rows.len());
    for row in 0..table.rows.len() {
        mask.push(table.bool_at(row, col)?);
    }
    Ok(fov_from_mask(&grid, &mask)
        .fov_indices
        .iter()
        .fold(vec![false; mask.len()], |mut acc, &q| {
            acc[q] = true;
            acc
        }))
}
