//! Acceptance suite: every release-gating check with its tolerance and
//! runtime budget pinned in code. Each test prints one PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use widescan::array::{Direction, ExcitationSet, ScatteringMatrix};
use widescan::baseline::{std_weights, ScanGrid};
use widescan::io::{
    emit_pattern_file, parse_pattern_file, synthetic_coupling, NumberFormat,
    SyntheticCouplingSpec, TouchstoneDocument,
};
use widescan::moea::{EpsilonSpec, MoeaConfig, MoeaRun, ParetoArchive};
use widescan::synthesis::{sweep, FeasibilitySpec, ScanProblem, SweepParams};

fn check(name: &str, budget: Duration, run: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    match run() {
        Ok(detail) => {
            let elapsed = started.elapsed();
            println!("[PASS] {name}: {detail} ({elapsed:.2?})");
            assert!(
                elapsed <= budget,
                "{name} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}"
            );
        }
        Err(message) => {
            println!("[FAIL] {name}: {message}");
            panic!("{name}: {message}");
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_1_zeta_identities() {
    check("zeta-identities", Duration::from_secs(1), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        let scan = Direction::new(90.0, 0.0);
        let mut worst: f64 = 0.0;
        for n in [2usize, 5, 16] {
            let unitary = dft_unitary(n);
            let diagonal = ScatteringMatrix::diagonal(&vec![Complex64::new(0.3, 0.0); n]);
            for _ in 0..100 {
                let e = random_excitation(n, &mut rng, scan);
                let zu = unitary.reflected_power_fraction(&e).unwrap();
                let zd = diagonal.reflected_power_fraction(&e).unwrap();
                worst = worst.max((zu - 1.0).abs()).max((zd - 0.09).abs());
            }
        }
        if worst <= 1e-12 {
            Ok(format!("unitary zeta = 1 and diagonal zeta = 0.09, worst |err| = {worst:.2e} <= 1e-12"))
        } else {
            Err(format!("worst deviation {worst:.2e} exceeds 1e-12"))
        }
    });
}

#[test]
fn criterion_2_consistency_suite() {
    check("consistency-suite", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0215);
        let scan = Direction::new(90.0, 0.0);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let n = rng.gen_range(2..=8);
            let entries: Vec<Complex64> = (0..n * n)
                .map(|_| Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)))
                .collect();
            let s = ScatteringMatrix::new(n, entries).unwrap();
            let e = random_excitation(n, &mut rng, scan);

            // reflected excitations agree with the active-reflection route
            let reflected = s.reflected_excitations(&e).unwrap();
            for k in 0..n {
                let gamma = s.active_reflection(&e, k).unwrap();
                let via_gamma = gamma * e.weights()[k];
                let err = (reflected[k] - via_gamma).norm()
                    / reflected[k].norm().max(via_gamma.norm()).max(f64::MIN_POSITIVE);
                worst = worst.max(err);
            }

            // P_REFL equals the ARL-weighted input power
            let p_refl: f64 = reflected.iter().map(|w| w.norm_sqr()).sum();
            let arl = s.arl(&e).unwrap();
            let p_via_arl: f64 = arl
                .iter()
                .zip(e.weights())
                .map(|(a, w)| a * w.norm_sqr())
                .sum();
            worst = worst.max(rel_err(p_refl, p_via_arl));

            // zeta is invariant under global complex scaling
            let zeta = s.reflected_power_fraction(&e).unwrap();
            let c = Complex64::from_polar(rng.gen_range(0.2..4.0), rng.gen_range(-3.0..3.0));
            let scaled = ExcitationSet::magnitude_phase(
                e.weights().iter().map(|w| w * c).collect(),
                scan,
            )
            .unwrap();
            let zeta_scaled = s.reflected_power_fraction(&scaled).unwrap();
            worst = worst.max(rel_err(zeta, zeta_scaled));
        }
        if worst <= 1e-10 {
            Ok(format!("1000 random cases, worst relative error {worst:.2e} <= 1e-10"))
        } else {
            Err(format!("worst relative error {worst:.2e} exceeds 1e-10"))
        }
    });
}

#[test]
fn criterion_3_quadrature() {
    check("quadrature", Duration::from_secs(1), || {
        let model = linear_fixture(1, None);
        let e = ExcitationSet::phase_only(&[0.0], Direction::new(90.0, 0.0)).unwrap();
        let k0 = model.geometry().wavenumber();
        let expected = k0 * k0 / (2.0 * std::f64::consts::PI * model.constants().impedance_ohms);
        let got = model.total_radiated_power(&e, 1.0).unwrap();
        let err = rel_err(got, expected);
        if err < 1e-3 {
            Ok(format!(
                "isotropic total power {got:.6e} vs closed form {expected:.6e}, rel err {err:.2e} < 0.1%"
            ))
        } else {
            Err(format!("relative error {err:.2e} >= 0.1%"))
        }
    });
}

#[test]
fn criterion_4_steering() {
    check("steering", Duration::from_secs(10), || {
        let model = linear_fixture(5, None);
        let directions: Vec<Direction> = (0..91)
            .map(|i| Direction::new(90.0, -90.0 + 2.0 * i as f64))
            .collect();
        let grid = ScanGrid::cut(directions.clone(), 45).unwrap();
        for q in 0..grid.len() {
            let scan = grid.direction(q);
            if scan.phi_deg.abs() > 60.0 {
                continue;
            }
            let e = std_weights(model.geometry(), scan).unwrap();
            let mut best = (0usize, f64::NEG_INFINITY);
            for (j, dir) in directions.iter().enumerate() {
                let psi = model.power_density(&e, *dir).unwrap();
                if psi > best.1 {
                    best = (j, psi);
                }
            }
            let offset = best.0.abs_diff(q);
            if offset > 1 {
                return Err(format!(
                    "beam peak for q {q} (phi {}) landed {offset} cells away",
                    scan.phi_deg
                ));
            }
        }
        Ok("beam-peak argmax within one grid cell for every |scan| <= 60 deg".to_string())
    });
}

#[test]
fn criterion_5_brute_force_pareto_oracle() {
    check("brute-force-pareto-oracle", Duration::from_secs(30), || {
        let spacing = 0.47 * wavelength();
        let model = linear_fixture(
            3,
            Some(SyntheticCouplingSpec {
                self_reflection: (0.1, 0.0),
                coupling_amplitude: 0.4,
                decay_length_m: spacing,
            }),
        );
        let scan = Direction::new(90.0, 50.0);
        let feasibility = FeasibilitySpec::phase_only().with_phase_quantization(45.0);
        let problem = ScanProblem::new(&model, scan, feasibility).unwrap();

        // exhaustive oracle over the 8^3 quantized phase lattice; plain
        // O(n^2) dominance filter, independent of the archive code
        let step = 45f64.to_radians();
        let mut points = Vec::with_capacity(512);
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let phases = [
                        -std::f64::consts::PI + step * a as f64,
                        -std::f64::consts::PI + step * b as f64,
                        -std::f64::consts::PI + step * c as f64,
                    ];
                    let e = ExcitationSet::phase_only(&phases, scan).unwrap();
                    points.push(problem.evaluate_weights(e.weights()).unwrap());
                }
            }
        }
        let mut true_front: Vec<[f64; 2]> = Vec::new();
        'outer: for f in &points {
            for g in &points {
                if g[0] <= f[0] && g[1] <= f[1] && (g[0] < f[0] || g[1] < f[1]) {
                    continue 'outer;
                }
            }
            if !true_front.contains(f) {
                true_front.push(*f);
            }
        }

        let std_exc = std_weights(model.geometry(), scan).unwrap();
        let std_obj = problem.evaluate_weights(std_exc.weights()).unwrap();
        let eps = EpsilonSpec::new([5e-3, 2.5e-2], [1.0, std_obj[1]]).unwrap();
        let front_boxes: Vec<[i64; 2]> = true_front.iter().map(|f| eps.box_index(*f)).collect();

        let mut covered_runs = 0;
        for seed in 0..20u64 {
            let config = MoeaConfig {
                population_size: 20,
                iterations: 2000,
                seed,
                ..MoeaConfig::default()
            };
            let archive = widescan::moea::run(
                &problem,
                &config,
                eps,
                &[problem.encode(&std_exc)],
            )
            .unwrap();
            if front_boxes.iter().all(|b| archive.covers_box(*b)) {
                covered_runs += 1;
            }
        }
        if covered_runs >= 19 {
            Ok(format!(
                "true front has {} points; every epsilon-box covered in {covered_runs}/20 seeded runs (>= 19 required)",
                true_front.len()
            ))
        } else {
            Err(format!("only {covered_runs}/20 runs covered the true front"))
        }
    });
}

fn acceptance_grid() -> ScanGrid {
    let directions: Vec<Direction> = (0..91)
        .map(|i| Direction::new(90.0, -90.0 + 2.0 * i as f64))
        .collect();
    ScanGrid::cut(directions, 45).unwrap()
}

#[test]
fn criterion_6_non_regression_vs_std() {
    check("non-regression-vs-std", Duration::from_secs(300), || {
        let spacing = 0.47 * wavelength();
        let model = linear_fixture(5, Some(localized_coupling(spacing)));
        let grid = acceptance_grid();
        let params = SweepParams {
            moea: MoeaConfig {
                population_size: 50,
                iterations: 1000,
                seed: 1,
                ..MoeaConfig::default()
            },
            epsilon: [5e-3, 2.5e-2],
            ..SweepParams::default()
        };
        let out = sweep(&model, &grid, &params).map_err(|e| e.to_string())?;
        let tol = 1e-3;
        let box_slack = 1.0 + params.epsilon[1];
        for r in &out.per_scan {
            if r.selected.zeta > r.std.zeta * (1.0 + tol) {
                return Err(format!(
                    "q {}: selected zeta {} above std {}",
                    r.q, r.selected.zeta, r.std.zeta
                ));
            }
            if r.selected.psi_w_sr < r.std.psi_w_sr * (1.0 - tol) / box_slack {
                return Err(format!(
                    "q {}: selected psi {} below std {} minus one epsilon box",
                    r.q, r.selected.psi_w_sr, r.std.psi_w_sr
                ));
            }
        }
        let std_alpha = out.fov.std.alpha;
        let po_alpha = out.fov.optimized.as_ref().unwrap().alpha;
        if po_alpha < std_alpha {
            return Err(format!("alpha regressed: po {po_alpha} < std {std_alpha}"));
        }
        Ok(format!(
            "every q within tolerance; alpha_std = {:.4}, alpha_po = {:.4}, delta_alpha = {:+.4}, delta_zeta_max = {:.4}",
            std_alpha,
            po_alpha,
            po_alpha - std_alpha,
            out.fov.delta_zeta_max.unwrap_or(0.0)
        ))
    });
}

#[test]
fn criterion_7_diminishing_returns() {
    check("diminishing-returns", Duration::from_secs(900), || {
        let spacing = 0.47 * wavelength();
        let params = SweepParams {
            moea: MoeaConfig {
                population_size: 50,
                iterations: 1000,
                seed: 1,
                ..MoeaConfig::default()
            },
            ..SweepParams::default()
        };
        let grid = acceptance_grid();

        // localized coupling on the small array
        let model_small = linear_fixture(5, Some(localized_coupling(spacing)));
        let out_small = sweep(&model_small, &grid, &params).map_err(|e| e.to_string())?;
        let dz_small = out_small.fov.delta_zeta_max.unwrap_or(0.0);

        // near-uniform coupling (decay length far beyond the aperture) on
        // the large array; amplitude reduced to keep the matrix passive
        let model_large = linear_fixture(
            16,
            Some(SyntheticCouplingSpec {
                self_reflection: (0.1, 0.1),
                coupling_amplitude: 0.05,
                decay_length_m: 100.0,
            }),
        );
        let out_large = sweep(&model_large, &grid, &params).map_err(|e| e.to_string())?;
        let dz_large = out_large.fov.delta_zeta_max.unwrap_or(0.0);

        if dz_large <= dz_small + 0.02 {
            Ok(format!(
                "delta_zeta_max: N=16 near-uniform {dz_large:.4} <= N=5 localized {dz_small:.4} + 2pp"
            ))
        } else {
            Err(format!(
                "N=16 near-uniform {dz_large:.4} exceeds N=5 localized {dz_small:.4} by more than 2pp"
            ))
        }
    });
}

#[test]
fn criterion_8_moea_invariants_instrumented() {
    check("moea-invariants", Duration::from_secs(30), || {
        let spacing = 0.47 * wavelength();
        let model = linear_fixture(
            3,
            Some(SyntheticCouplingSpec {
                self_reflection: (0.1, 0.0),
                coupling_amplitude: 0.4,
                decay_length_m: spacing,
            }),
        );
        let scan = Direction::new(90.0, 45.0);
        let problem = ScanProblem::new(&model, scan, FeasibilitySpec::phase_only()).unwrap();
        let std_exc = std_weights(model.geometry(), scan).unwrap();
        let std_obj = problem.evaluate_weights(std_exc.weights()).unwrap();
        let eps = EpsilonSpec::new([5e-3, 2.5e-2], [1.0, std_obj[1]]).unwrap();
        let seed_box = eps.box_index(std_obj);
        let seed_x = problem.encode(&std_exc);
        let config = MoeaConfig {
            population_size: 20,
            iterations: 10_000,
            seed: 11,
            ..MoeaConfig::default()
        };

        // twin runs in lockstep: bitwise agreement after every step
        let mut run_a = MoeaRun::initialize(
            &problem,
            config,
            eps,
            ChaCha8Rng::seed_from_u64(config.seed),
            std::slice::from_ref(&seed_x),
        )
        .unwrap();
        let mut run_b = MoeaRun::initialize(
            &problem,
            config,
            eps,
            ChaCha8Rng::seed_from_u64(config.seed),
            std::slice::from_ref(&seed_x),
        )
        .unwrap();

        let bitwise_equal = |a: &ParetoArchive, b: &ParetoArchive| -> bool {
            a.len() == b.len()
                && a.entries().iter().zip(b.entries()).all(|(x, y)| {
                    x.box_index == y.box_index
                        && x.objectives[0].to_bits() == y.objectives[0].to_bits()
                        && x.objectives[1].to_bits() == y.objectives[1].to_bits()
                        && x.decision.len() == y.decision.len()
                        && x.decision
                            .iter()
                            .zip(&y.decision)
                            .all(|(p, q)| p.to_bits() == q.to_bits())
                })
        };

        for step in 0..10_000u32 {
            run_a.step().map_err(|e| e.to_string())?;
            run_b.step().map_err(|e| e.to_string())?;
            run_a
                .archive()
                .check_invariants()
                .map_err(|m| format!("step {step}: {m}"))?;
            if run_a.population().len() != config.population_size {
                return Err(format!("step {step}: population size changed"));
            }
            if !run_a.archive().covers_box(seed_box) {
                return Err(format!("step {step}: seed box lost"));
            }
            if !bitwise_equal(run_a.archive(), run_b.archive()) {
                return Err(format!("step {step}: twin archives diverged"));
            }
        }
        Ok(format!(
            "10^4 instrumented steps: box invariants, one-per-box, seed coverage and bitwise \
             twin-run agreement held throughout (final archive {} members)",
            run_a.archive().len()
        ))
    });
}

#[test]
fn criterion_9_ingestion() {
    check("ingestion", Duration::from_secs(1), || {
        // byte-stable round trips for all three Touchstone formats
        let spacing = 0.47 * wavelength();
        let geometry = widescan::array::ArrayGeometry::linear(
            2,
            spacing,
            CARRIER_HZ,
            &widescan::array::PhysicsConstants::default(),
        )
        .unwrap();
        let s = synthetic_coupling(
            &geometry,
            &SyntheticCouplingSpec {
                self_reflection: (0.1, 0.0),
                coupling_amplitude: 0.4,
                decay_length_m: spacing,
            },
        )
        .unwrap();
        for format in [
            NumberFormat::RealImaginary,
            NumberFormat::MagnitudeAngle,
            NumberFormat::DbAngle,
        ] {
            let doc = TouchstoneDocument::from_matrix(
                &s,
                CARRIER_HZ,
                widescan::io::FrequencyUnit::Hz,
                format,
                50.0,
            );
            let emitted = doc.emit();
            let reparsed = TouchstoneDocument::parse(&emitted, 2)
                .map_err(|e| format!("round trip parse: {e}"))?;
            if reparsed.emit() != emitted {
                return Err(format!("{format:?} round trip not byte-stable"));
            }
        }

        // pattern file byte stability
        let patterns = widescan::io::analytic_patterns(
            widescan::io::AnalyticPatternKind::Cosine { exponent: 1.0 },
            &geometry,
            30.0,
            30.0,
            [1.0, 0.0, 0.0],
        )
        .unwrap();
        let doc = widescan::io::PatternDocument::from_pattern_set(&patterns);
        let emitted = emit_pattern_file(&doc);
        let reparsed = parse_pattern_file(&emitted).map_err(|e| e.to_string())?;
        if emit_pattern_file(&reparsed) != emitted {
            return Err("pattern file round trip not byte-stable".into());
        }

        // hand-built MA file: S12 must be exactly 0.5j
        let text = "# Hz S MA R 50\n2e9 0.1 0 0.5 90\n0.5 90 0.1 0\n";
        let doc = TouchstoneDocument::parse(text, 2).map_err(|e| e.to_string())?;
        let (matrix, _) = doc.matrix_at(2e9).map_err(|e| e.to_string())?;
        if matrix.get(0, 1) != Complex64::new(0.0, 0.5) {
            return Err(format!("S12 = {} is not exactly 0.5j", matrix.get(0, 1)));
        }

        // the full metric pipeline runs on ingested files
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let config_text = format!(
            r#"
frequency_hz = 2.0e9

[geometry]
kind = "linear"
count = 2
spacing_wavelengths = 0.47

[scattering]
source = "file"
path = "fixture.s2p"

[patterns]
source = "file"
path = "patterns.csv"

[scan]
kind = "cut"
vary = "phi"
fixed_deg = 90.0
start_deg = -30.0
step_deg = 15.0
stop_deg = 30.0

[moea]
population = 10
iterations = 40
seed = 7

[metrics]
theta_start_deg = 90.0
theta_step_deg = 1.0
theta_stop_deg = 90.0
phi_start_deg = -90.0
phi_step_deg = 1.0
phi_stop_deg = 90.0

[output]
directory = "{}"
"#,
            dir.path().join("run").display()
        );
        let ts = TouchstoneDocument::from_matrix(
            &s,
            CARRIER_HZ,
            widescan::io::FrequencyUnit::Hz,
            NumberFormat::RealImaginary,
            50.0,
        );
        std::fs::write(dir.path().join("fixture.s2p"), ts.emit()).map_err(|e| e.to_string())?;
        std::fs::write(dir.path().join("patterns.csv"), &emitted).map_err(|e| e.to_string())?;
        let config_path = dir.path().join("run.toml");
        std::fs::write(&config_path, config_text).map_err(|e| e.to_string())?;

        let config = widescan::cli::RunConfig::from_path(&config_path)
            .map_err(|e| e.to_string())?;
        let out_dir = dir.path().join("run");
        widescan::cli::cmd_synthesize(&config, dir.path(), &out_dir, false)
            .map_err(|e| e.to_string())?;
        widescan::cli::cmd_report(&config, dir.path(), &out_dir, &[0, 2, 4], &out_dir)
            .map_err(|e| e.to_string())?;
        let table = widescan::cli::CsvTable::read(&out_dir.join("report_table.csv"))
            .map_err(|e| e.to_string())?;
        for column in [
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
        ] {
            table.column(column).map_err(|e| e.to_string())?;
        }
        Ok("round trips byte-stable, MA entry exact, metric pipeline ran on ingested files"
            .to_string())
    });
}
