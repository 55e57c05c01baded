//! Longer end-to-end harness runs: stability traces and estimator statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use utbe::compiler::hadamard4_recipe;
use utbe::elements::{compose_network, FRAC_PI_2};
use utbe::harness::{
    simulate_circuit, stability_run, switch_circuit, walk_experiment, GATE_SYSTEM_LOSS_DB,
    WALK_SYSTEM_LOSS_DB,
};
use utbe::photonics::{HardwareConfig, NoiseModel};
use utbe::simulator::{detection_matrix, estimate_detection_matrix, fidelity, sample_counts};

#[test]
fn stability_under_declared_jitter_stays_high_with_no_trend() {
    // the long-run analogue: 108 hours of 1% coupling jitter, analytic readout
    let spec = switch_circuit(FRAC_PI_2);
    let noise = NoiseModel {
        theta_rel_jitter: 0.01,
        ..NoiseModel::noiseless()
    };
    let report = stability_run(
        &spec,
        &noise,
        108.0,
        1.0,
        None,
        2024,
        &HardwareConfig::default(),
    )
    .unwrap();
    assert_eq!(report.series.len(), 109);
    assert!(report.mean >= 0.97, "mean fidelity {}", report.mean);
    assert!(report.min >= 0.97, "min fidelity {}", report.min);
    let (lo, hi) = report.slope_ci95;
    assert!(
        lo <= 0.0 && 0.0 <= hi,
        "drift-free run shows a trend: slope {} in [{lo}, {hi}]",
        report.slope_per_hour
    );
}

#[test]
fn stability_with_drift_shows_the_drift() {
    // crystal-phase drift detunes the interference of a compiled mesh
    // (a single-coupler circuit would hide it: detection there is
    // phase-insensitive)
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let target = utbe::matrix::ComplexMatrix::haar_random(4, &mut rng);
    let spec = utbe::compiler::mesh_decompose(&target).unwrap();
    let noise = NoiseModel {
        phase_drift_rad_per_hour: 0.02,
        ..NoiseModel::noiseless()
    };
    let report = stability_run(
        &spec,
        &noise,
        40.0,
        1.0,
        None,
        11,
        &HardwareConfig::default().with_system_loss_db(GATE_SYSTEM_LOSS_DB),
    )
    .unwrap();
    let first = report.series.first().unwrap().fidelity;
    let last = report.series.last().unwrap().fidelity;
    assert!((first - 1.0).abs() < 1e-12);
    assert!(
        last < first - 1e-3,
        "drift had no effect: {first} -> {last}"
    );
}

#[test]
fn estimator_fidelity_improves_monotonically_with_shots() {
    let spec = hadamard4_recipe();
    let net = compose_network(&spec, &spec.space().unwrap()).unwrap();
    let truth = detection_matrix(&net.logical, 1.0).unwrap();
    let mut means = Vec::new();
    for shots in [1_000u64, 10_000, 100_000] {
        let mut acc = 0.0;
        for seed in 0..100u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(31_000 + seed);
            let records: Vec<_> = (0..4)
                .map(|j| sample_counts(&truth, j, shots, &mut rng).unwrap())
                .collect();
            let est = estimate_detection_matrix(&records).unwrap();
            acc += fidelity(&truth, &est).unwrap();
        }
        means.push(acc / 100.0);
    }
    assert!(
        means[0] < means[1] && means[1] < means[2],
        "no monotone convergence: {means:?}"
    );
    assert!(means[2] > 0.999);
    // few shots leave visible sampling spread
    let mut sq = 0.0;
    let mut acc = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(77_000 + seed);
        let records: Vec<_> = (0..4)
            .map(|j| sample_counts(&truth, j, 100, &mut rng).unwrap())
            .collect();
        let est = estimate_detection_matrix(&records).unwrap();
        let f = fidelity(&truth, &est).unwrap();
        acc += f;
        sq += f * f;
    }
    let mean = acc / 100.0;
    let std = (sq / 100.0 - mean * mean).sqrt();
    assert!(std > 0.001, "hundred-shot estimates too tight: std {std}");
}

#[test]
fn sampled_walk_under_full_loss_still_scores_high() {
    let report = walk_experiment(
        10,
        std::f64::consts::FRAC_PI_4,
        Some(200_000),
        WALK_SYSTEM_LOSS_DB,
        99,
    )
    .unwrap();
    for d in &report.per_depth {
        assert!(
            d.fidelity_h > 0.99 && d.fidelity_v > 0.99,
            "depth {}: sampled fidelities {} / {}",
            d.depth,
            d.fidelity_h,
            d.fidelity_v
        );
    }
}

#[test]
fn simulate_report_is_reproducible_and_self_consistent() {
    let spec = switch_circuit(1.0);
    let hw = HardwareConfig::default();
    let noise = NoiseModel::default();
    let a = simulate_circuit(&spec, &hw, &noise, Some(20_000)).unwrap();
    let b = simulate_circuit(&spec, &hw, &noise, Some(20_000)).unwrap();
    assert_eq!(a.fidelity, b.fidelity);
    assert_eq!(a.spec_hash, b.spec_hash);
    assert!(a.fidelity > 0.99);
    // noiseless, analytic: exact unity
    let c = simulate_circuit(&spec, &hw, &NoiseModel::noiseless(), None).unwrap();
    assert!((c.fidelity - 1.0).abs() < 1e-12);
}
