use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use widescan::array::*;
use widescan::baseline::std_weights;
use widescan::io::*;
use widescan::moea::{EpsilonSpec, MoeaConfig};
use widescan::synthesis::*;

fn main() {
    let constants = PhysicsConstants::default();
    let lambda = constants.speed_of_light_m_s / 2.0e9;
    let spacing = 0.47 * lambda;
    let geometry = ArrayGeometry::linear(3, spacing, 2.0e9, &constants).unwrap();
    let s = synthetic_coupling(&geometry, &SyntheticCouplingSpec {
        self_reflection: (0.1, 0.0),
        coupling_amplitude: 0.4,
        decay_length_m: spacing,
    }).unwrap();
    let patterns = analytic_patterns(AnalyticPatternKind::Isotropic, &geometry, 1.0, 1.0, [1.0,0.0,0.0]).unwrap();
    let model = ArrayModel::new(geometry, s, patterns, constants).unwrap();
    let scan = Direction::new(90.0, 50.0);
    let feas = FeasibilitySpec::phase_only().with_phase_quantization(45.0);
    let problem = ScanProblem::new(&model, scan, feas).unwrap();

    // exhaustive enumeration of the 512-point quantized space
    let step = 45f64.to_radians();
    let mut all: Vec<([f64; 2], [usize; 3])> = Vec::new();
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                let phases = [
                    -std::f64::consts::PI + step * a as f64,
                    -std::f64::consts::PI + step * b as f64,
                    -std::f64::consts::PI + step * c as f64,
                ];
                let e = ExcitationSet::phase_only(&phases, scan).unwrap();
                let f = problem.evaluate_weights(e.weights()).unwrap();
                all.push((f, [a, b, c]));
            }
        }
    }
    // brute-force dominance filter
    let mut front: Vec<[f64; 2]> = Vec::new();
    'outer: for (f, _) in &all {
        for (g, _) in &all {
            if g[0] <= f[0] && g[1] <= f[1] && (g[0] < f[0] || g[1] < f[1]) {
                continue 'outer;
            }
        }
        if !front.iter().any(|h| h == f) {
            front.push(*f);
        }
    }
    println!("front size (distinct objective pairs): {}", front.len());

    let std_exc = std_weights(model.geometry(), scan).unwrap();
    let std_obj = problem.evaluate_weights(std_exc.weights()).unwrap();
    let eps = EpsilonSpec::new([5e-3, 2.5e-2], [1.0, std_obj[1]]).unwrap();
    let front_boxes: Vec<[i64; 2]> = front.iter().map(|f| eps.box_index(*f)).collect();
    println!("std = {std_obj:?}");

    let mut pass = 0;
    for seed in 0..20u64 {
        let config = MoeaConfig { population_size: 20, iterations: 2000, seed, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        let seed_x = problem.encode(&std_exc);
        let archive = widescan::moea::run_with_rng(&problem, &config, eps, rng, &[seed_x]).unwrap();
        let covered = front_boxes.iter().all(|b| archive.covers_box(*b));
        if covered { pass += 1; } else {
            let missing: Vec<_> = front_boxes.iter().filter(|b| !archive.covers_box(**b)).collect();
            println!("  seed {seed}: archive {} misses {:?}", archive.len(), missing);
        }
    }
    println!("covered in {pass}/20 runs");
}
