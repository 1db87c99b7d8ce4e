//! Property-level invariants from across the laboratory, exercised on
//! randomized and structured inputs.

use symplectic_lab::cocycle::{random_symplectic_word, Word};
use symplectic_lab::dynamics::Dynamics;
use symplectic_lab::entropy::{
    entropy_from_counts, separated_count, separated_table, shift_entropy, torus_grid_seeds,
    TransitionMatrixModel,
};
use symplectic_lab::models::{cat_matrix, find_periodic_orbits, MapModel};
use symplectic_lab::rng::SplitMix64;
use symplectic_lab::snake::{build_horseshoe, build_tangency_model, SnakeShear};
use symplectic_lab::sympl::{is_symplectic, op_norm, Classification};

#[test]
fn random_word_products_pair_and_stay_symplectic() {
    for seed in 0..20u64 {
        let len = 3 + (seed as usize % 48);
        let word = random_symplectic_word(2, len, 0.18, seed);
        let product = word.product().unwrap();

        // Documented symplecticity bound: len × 1e-12 × max ‖letter‖².
        let max_norm = word
            .letters()
            .iter()
            .map(|l| l.op_norm())
            .fold(0.0f64, f64::max);
        let bound = (len as f64 * 1e-12 * max_norm * max_norm).max(1e-12);
        assert!(
            product.residual() <= bound,
            "seed {seed}: residual {} above bound {bound}",
            product.residual()
        );

        // Condition cap from the invariant statement; skip badly scaled draws.
        let svd = product.matrix().clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smax / smin > 1e6 {
            continue;
        }
        let lyap = word.lyapunov_vector().unwrap();
        assert!(
            lyap.pairing_residual() < 1e-7,
            "seed {seed}: pairing {}",
            lyap.pairing_residual()
        );

        // Spectrum closed under λ -> 1/λ for accepted symplectic products.
        let spec = product.spectrum().unwrap();
        assert!(spec.pairing_residual() < 1e-7, "seed {seed}");
    }
}

#[test]
fn transpositions_up_to_dimension_eight() {
    use symplectic_lab::cocycle::{transposition_transition, EigenFrame};
    for n in 2..=4usize {
        let mut found = 0;
        for seed in 0..40u64 {
            let word = random_symplectic_word(n, 2, 0.2, 1000 * n as u64 + seed);
            let Ok(Some(frame)) = EigenFrame::from_word(&word, 1e-6) else {
                continue;
            };
            found += 1;
            for i in 1..2 * n {
                if i == n {
                    continue; // conjugate pair, undefined for n > 1
                }
                let t = transposition_transition(&frame, i).unwrap();
                assert!(t.residual() < 1e-10, "n={n} seed={seed} rank={i}");
                let from = frame.direction(i);
                let to = frame.direction(i + 1);
                let img = t.matrix() * &from;
                let line = {
                    let a = &img / img.amax();
                    let b = &to / to.amax();
                    (&a - &b).amax().min((&a + &b).amax())
                };
                assert!(line < 1e-8, "n={n} seed={seed} rank={i}: line {line}");
            }
            if found >= 3 {
                break;
            }
        }
        assert!(found >= 1, "no diagonalizable random frame found for n={n}");
    }
}

#[test]
fn zero_sum_property_of_exponents() {
    for seed in 40..52u64 {
        let word = random_symplectic_word(3, 7, 0.15, seed);
        let lyap = word.lyapunov_vector().unwrap();
        // S(p) equals minus the sum of negative exponents.
        let pos = lyap.sum_positive(1e-8);
        let neg: f64 = lyap.chis().iter().filter(|c| **c < -1e-8).sum();
        assert!((pos + neg).abs() < 1e-7, "seed {seed}: {pos} vs {neg}");
    }
}

#[test]
fn snake_shear_symplectic_at_random_points() {
    let mut rng = SplitMix64::new(2024);
    for _ in 0..20 {
        let a = rng.range(0.05, 0.5);
        let freq = 2 * rng.next_usize(50) + 1;
        let amplitude = rng.range(1e-5, 1e-2);
        let shear = SnakeShear::new(amplitude, freq, a, 2).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let p: Vec<f64> = (0..4).map(|_| rng.range(-a, a)).collect();
            worst = worst.max(shear.jacobian_psi(&p).residual());
        }
        assert!(worst < 1e-12, "A={amplitude}, N={freq}, a={a}: {worst}");
    }
}

#[test]
fn trace_criterion_matches_classification_on_standard_map() {
    for k in [0.8f64, 1.2, 2.5, 4.0] {
        let model = MapModel::standard_map(k);
        let scan = find_periodic_orbits(&model, 1, 24, 1e-10, 50).unwrap();
        assert!(!scan.orbits.is_empty());
        for orbit in &scan.orbits {
            let trace = orbit.cocycle.product().unwrap().matrix().trace();
            let hyperbolic = orbit.classification == Classification::Hyperbolic;
            assert_eq!(
                hyperbolic,
                trace.abs() > 2.0 + 1e-9,
                "k={k}, point {:?}, trace {trace}",
                orbit.points[0]
            );
        }
    }
}

#[test]
fn entropy_estimate_improves_under_grid_refinement() {
    let cat = MapModel::torus_automorphism(cat_matrix()).unwrap();
    let truth = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
    let mut errors = Vec::new();
    for grid in [100usize, 200, 400] {
        let seeds = torus_grid_seeds(&cat, grid, Some(11)).unwrap();
        let n_values: Vec<usize> = (0..=12).collect();
        let table = separated_table(&cat, &seeds, &n_values, &[0.04, 0.02]).unwrap();
        assert!(table.is_monotone());
        let est = entropy_from_counts(&table).unwrap();
        errors.push((est.value - truth).abs());
    }
    assert!(
        errors[0] >= errors[1] && errors[1] >= errors[2],
        "errors must improve under refinement: {errors:?}"
    );
}

#[test]
fn greedy_reorder_stays_within_factor_two() {
    let cat = MapModel::torus_automorphism(cat_matrix()).unwrap();
    let baseline = {
        let seeds = torus_grid_seeds(&cat, 120, None).unwrap();
        separated_count(&cat, &seeds, 7, 0.04).unwrap()
    };
    for order in 1..=4u64 {
        let seeds = torus_grid_seeds(&cat, 120, Some(order)).unwrap();
        let count = separated_count(&cat, &seeds, 7, 0.04).unwrap();
        let ratio = count as f64 / baseline as f64;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "order {order}: ratio {ratio} outside the greedy factor-2 band"
        );
    }
}

#[test]
fn certificate_formula_identities() {
    let model = build_tangency_model(1, &[2.0], 1, 0.1).unwrap();
    for freq in [3usize, 9, 27] {
        let (cert, _snake) = build_horseshoe(&model, freq, 0.05).unwrap();
        // Bit-level identity with the defining formula.
        let recomputed = cert.dim_half as f64 * (freq as f64).ln() / cert.return_time() as f64;
        assert!(cert.certified_entropy.to_bits() == recomputed.to_bits());
        // Full-shift consistency within power-iteration tolerance.
        let shift = shift_entropy(&TransitionMatrixModel::full_shift(
            freq.pow(cert.dim_half as u32),
        ))
        .unwrap();
        assert!((shift / cert.return_time() as f64 - cert.certified_entropy).abs() < 1e-9);
        // Component evidence accompanies every symbol.
        assert_eq!(cert.components.len(), freq.pow(cert.dim_half as u32));
        for c in &cert.components {
            assert!(c.overshoot_ratio > 0.0 && c.stable_margin > 0.0);
        }
    }
}

#[test]
fn certified_entropy_trends_toward_exponent_target() {
    // Growing N drives the certified entropy toward n log σ from below.
    let model = build_tangency_model(1, &[2.0], 1, 0.1).unwrap();
    let target = 2.0f64.ln();
    let mut previous = 0.0;
    for freq in [3usize, 9, 27] {
        let (cert, _snake) = build_horseshoe(&model, freq, 0.05).unwrap();
        assert!(cert.certified_entropy > previous);
        assert!(cert.certified_entropy < target);
        previous = cert.certified_entropy;
    }
}

#[test]
fn choose_t_budget_error_for_tiny_amplitudes() {
    use symplectic_lab::snake::choose_t_with_budget;
    let model = build_tangency_model(1, &[2.0], 1, 0.1).unwrap();
    match choose_t_with_budget(&model, 1e-9, 5) {
        Err(symplectic_lab::Error::Budget { tried, .. }) => assert_eq!(tried, 5),
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn single_frequency_certificate_is_trivially_consistent() {
    use symplectic_lab::snake::certify_against_estimator;
    let model = build_tangency_model(1, &[2.0], 1, 0.1).unwrap();
    let (cert, snake) = build_horseshoe(&model, 1, 0.05).unwrap();
    assert_eq!(cert.certified_entropy, 0.0);
    let report = certify_against_estimator(&cert, &snake, 60, 0.1).unwrap();
    assert!(report.entropy_bound_ok);
    assert!(!report.undercount_flagged);
    assert!(report.estimator.value.abs() < 0.05);
}

#[test]
fn identity_automorphism_reports_no_hyperbolic_orbit() {
    use symplectic_lab::harness::{run, ExperimentConfig};
    let dir = std::env::temp_dir().join(format!("symplab-identity-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let config = ExperimentConfig::parse(
        "model.family = torus_automorphism\nmodel.matrix = 1 0; 0 1\n\
         scan.grid = 6\nentropy.grid = 40\nentropy.n_max = 6\nentropy.eps_list = 0.1\n",
    )
    .unwrap();
    let outcome = run(&config, &dir).unwrap();
    assert!(outcome.failed_stage.is_none());
    let report = outcome.report;
    assert_eq!(report.h_est, Some(0.0));
    assert!(report.s_lower.is_none());
    assert!(report
        .flags
        .iter()
        .any(|f| f.code == "NO_HYPERBOLIC_ORBIT"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn mixing_search_baseline_is_stable() {
    // Frozen regression: with the default ladder and ε = 0.01, the diagonal
    // base diag(3, 2, 1/3, 1/2) first meets the target at m = 422, where the
    // gap is 4 log 6 / (2m + 4).
    use symplectic_lab::cocycle::{verify_mixing, EigenFrame, Word};
    use symplectic_lab::sympl::{direct_sum_2x2, SymplecticMatrix};
    let base = Word::singleton(
        SymplecticMatrix::new(
            direct_sum_2x2(&[[3.0, 0.0, 0.0, 1.0 / 3.0], [2.0, 0.0, 0.0, 0.5]]),
            1e-12,
        )
        .unwrap(),
    );
    let frame = EigenFrame::from_word(&base, 1e-8).unwrap().unwrap();
    let v = verify_mixing(&frame, 0.01, 10_000).unwrap();
    assert_eq!(v.m0, 422);
    let expected = 4.0 * 6.0f64.ln() / (2.0 * 422.0 + 4.0);
    assert!((v.achieved_gap - expected).abs() < 1e-9);
}

#[test]
fn harness_snake_stage_sweeps_monotonically() {
    use symplectic_lab::harness::{run, ExperimentConfig};
    let dir = std::env::temp_dir().join(format!("symplab-snake-stage-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let config = ExperimentConfig::parse(
        "model.family = cat\nscan.enabled = false\nentropy.enabled = false\n\
         snake.enabled = true\nsnake.n = 1\nsnake.multipliers = 2.0\n\
         snake.connector_time = 1\nsnake.disc_radius = 0.1\nsnake.delta = 0.05\n\
         snake.frequencies = 3 9 27\nsnake.estimator_grid = 100\n",
    )
    .unwrap();
    let outcome = run(&config, &dir).unwrap();
    assert!(outcome.failed_stage.is_none());
    let certs = &outcome.report.certificates;
    assert_eq!(certs.len(), 3);
    for pair in certs.windows(2) {
        assert!(pair[1].certified_entropy > pair[0].certified_entropy);
    }
    for c in certs {
        assert!(c.entropy_bound_ok);
        assert!(!c.undercount_flagged, "N = {}", c.frequency);
    }
    let hash = config.hash_hex();
    let csv = std::fs::read_to_string(dir.join(format!("{hash}-snake.csv"))).unwrap();
    assert!(csv.starts_with("frequency,amplitude,t,"));
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.join(format!("{hash}-certificate-N3.json")).exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn orbit_cocycles_have_zero_exponent_sum() {
    use symplectic_lab::models::orbit_cocycle;
    use symplectic_lab::sympl::finite_time_exponents;
    let families = [
        MapModel::standard_map(1.9),
        MapModel::coupled_standard_maps(1.4, 0.9, 0.25),
        MapModel::torus_automorphism(cat_matrix()).unwrap(),
    ];
    for model in &families {
        let start: Vec<f64> = (0..model.dim()).map(|i| 0.17 + 0.083 * i as f64).collect();
        let (_, word) = orbit_cocycle(model, &start, 10_000).unwrap();
        let exps = finite_time_exponents(word.letters()).unwrap();
        assert!(
            exps.iter().sum::<f64>().abs() < 1e-6,
            "nonzero exponent sum along a symplectic orbit"
        );
    }
}

#[test]
fn snake_composed_model_conserves_symplecticity() {
    let tangency = build_tangency_model(1, &[2.0], 1, 0.1).unwrap();
    let (_cert, snake) = build_horseshoe(&tangency, 3, 0.05).unwrap();
    let model = MapModel::snake_composed(snake);
    let mut z = vec![1.9e-4, 0.33];
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let jac = model.jacobian(&z).unwrap();
        worst = worst.max(jac.residual());
        z = model.evaluate(&z).unwrap();
    }
    assert!(worst < 1e-12);
}

#[test]
fn word_closeness_is_an_operator_norm_gate() {
    let word = random_symplectic_word(1, 4, 0.2, 9);
    let mut perturbed_letters = word.letters().to_vec();
    let mut m = perturbed_letters[2].matrix().clone();
    m[(0, 0)] += 0.5;
    perturbed_letters[2] = symplectic_lab::sympl::SymplecticMatrix::new_unchecked(m);
    let perturbed = Word::new(perturbed_letters).unwrap();
    let dist = op_norm(&(word.letters()[2].matrix() - perturbed.letters()[2].matrix()));
    assert!(symplectic_lab::cocycle::words_close(&word, &perturbed, dist + 1e-12));
    assert!(!symplectic_lab::cocycle::words_close(&word, &perturbed, dist - 1e-3));
    assert!(is_symplectic(word.product().unwrap().matrix(), 1e-9).unwrap());
}
