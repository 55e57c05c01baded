//! End-to-end experiment harness.
//!
//! Each operation compiles a circuit, runs it through the physical network
//! composition, optionally perturbs and samples it, and returns a serializable
//! report carrying every input needed to reproduce the run bit-for-bit:
//! the circuit hash, the noise settings and the master seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile_permutation, galton_board, hadamard4_recipe, reconstruct};
use crate::dsl::spec_hash;
use crate::elements::{compose_network, CircuitSpec, CouplerParams, Topology, FRAC_PI_2};
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::modes::BasisFamily;
use crate::photonics::{db_to_transmittance, perturb_circuit, HardwareConfig, NoiseModel};
use crate::simulator::{
    detection_in_basis, detection_matrix, estimate_detection_matrix, fidelity,
    sample_counts_with_background, DetectionMatrix,
};

/// Measured overall system loss presets, one per experiment class.
pub const SWITCH_SYSTEM_LOSS_DB: f64 = -5.2;
pub const GATE_SYSTEM_LOSS_DB: f64 = -7.2;
pub const WALK_SYSTEM_LOSS_DB: f64 = -13.0;

/// Derives an independent rng stream for subtask `index` of a master seed.
fn derive_rng(master_seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// The N=4 single-coupler switching circuit: one programmable coupler in the
/// middle layer, continuously tunable from the identity to the gate that
/// exchanges the two middle modes.
pub fn switch_circuit(theta: f64) -> CircuitSpec {
    let mut spec = CircuitSpec::new(4, Topology::RectangularMesh);
    spec.couplers.push(CouplerParams::new(1, 0, theta, 0.0));
    spec
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub fidelity_identity: f64,
    pub fidelity_swap: f64,
    pub detection: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub n_points: usize,
    pub points: Vec<SweepPoint>,
}

/// Sweeps the switching circuit's coupling angle over `[0, pi/2]` and scores
/// each setting against the identity and the mode-exchange targets.
pub fn theta_sweep(n_points: usize) -> Result<SweepReport> {
    assert!(n_points >= 2, "a sweep needs at least two points");
    let identity = DetectionMatrix::identity(4);
    let swap = detection_matrix(&ComplexMatrix::permutation(&[0, 2, 1, 3]), 1.0)?;
    let mut points = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let theta = FRAC_PI_2 * i as f64 / (n_points - 1) as f64;
        let spec = switch_circuit(theta);
        let net = compose_network(&spec, &spec.space()?)?;
        let det = detection_matrix(&net.logical, 1.0)?;
        points.push(SweepPoint {
            theta,
            fidelity_identity: fidelity(&identity, &det)?,
            fidelity_swap: fidelity(&swap, &det)?,
            detection: det.rows_vec(),
        });
    }
    Ok(SweepReport { n_points, points })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationResult {
    pub n: usize,
    pub mesh_n: usize,
    pub sigma: Vec<usize>,
    pub fidelity_noiseless: f64,
    pub fidelity_noisy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub noise: NoiseModel,
    pub seed: u64,
    pub total: usize,
    pub mean_fidelity_noiseless: f64,
    pub mean_fidelity_noisy: f64,
    pub min_fidelity_noisy: f64,
    pub per_n_counts: Vec<(usize, usize)>,
    pub per_n_mean_noisy: Vec<(usize, f64)>,
    pub histogram: Vec<(f64, usize)>,
    pub results: Vec<PermutationResult>,
}

/// Enumerates all permutations of `0..n` in lexicographic generation order.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        sigma.swap(i, j);
    }
    sigma
}

/// The default suite: exhaustive for dimensions 2..4 (32 transformations)
/// plus seed-fixed samples at 5..8, 362 transformations in total.
pub fn default_suite_sizes() -> Vec<(usize, Option<usize>)> {
    vec![
        (2, None),
        (3, None),
        (4, None),
        (5, Some(80)),
        (6, Some(80)),
        (7, Some(80)),
        (8, Some(90)),
    ]
}

fn run_suite_item(
    sigma: &[usize],
    noise: &NoiseModel,
    seed: u64,
    task: u64,
) -> Result<PermutationResult> {
    let spec = compile_permutation(sigma)?;
    let mesh_n = spec.n_logical;
    // embed the target into the mesh dimension
    let mut embedded: Vec<usize> = sigma.to_vec();
    embedded.extend(sigma.len()..mesh_n);
    let target = detection_matrix(&ComplexMatrix::permutation(&embedded), 1.0)?;

    let net = compose_network(&spec, &spec.space()?)?;
    let det = detection_matrix(&net.logical, 1.0)?;
    let f_noiseless = fidelity(&target, &det)?;

    let mut rng = derive_rng(seed, task);
    let noisy_spec = perturb_circuit(&spec, noise, 0.0, &mut rng)?;
    let noisy_net = compose_network(&noisy_spec, &noisy_spec.space()?)?;
    let noisy_det = detection_matrix(&noisy_net.logical, 1.0)?;
    let f_noisy = fidelity(&target, &noisy_det)?;

    Ok(PermutationResult {
        n: sigma.len(),
        mesh_n,
        sigma: sigma.to_vec(),
        fidelity_noiseless: f_noiseless,
        fidelity_noisy: f_noisy,
    })
}

/// Compiles, perturbs, simulates and scores one batch of permutations.
///
/// `sample_size = None` enumerates all `n!` permutations. Odd `n` embeds in
/// the next even mesh. Items run concurrently; every item draws its own rng
/// stream from `(seed, suite index)` and results merge in suite order, so the
/// report is bit-stable regardless of thread scheduling.
pub fn permutation_suite(
    sizes: &[(usize, Option<usize>)],
    noise: &NoiseModel,
    seed: u64,
) -> Result<SuiteReport> {
    noise.validate()?;
    let mut tasks: Vec<Vec<usize>> = Vec::new();
    for &(n, sample_size) in sizes {
        match sample_size {
            None => tasks.extend(all_permutations(n)),
            Some(k) => {
                let mut rng = derive_rng(seed, 1_000_000 + n as u64);
                let mut seen = std::collections::HashSet::new();
                while seen.len() < k {
                    let sigma = random_permutation(n, &mut rng);
                    if seen.insert(sigma.clone()) {
                        tasks.push(sigma);
                    }
                }
            }
        }
    }

    if tasks.is_empty() {
        return Err(crate::Error::InvalidPermutation {
            reason: "suite has no items".into(),
        });
    }
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(tasks.len());
    let mut slots: Vec<Option<Result<PermutationResult>>> = Vec::new();
    slots.resize_with(tasks.len(), || None);
    std::thread::scope(|scope| {
        for (worker, chunk) in slots.chunks_mut(tasks.len().div_ceil(workers)).enumerate() {
            let base = worker * tasks.len().div_ceil(workers);
            let tasks = &tasks;
            scope.spawn(move || {
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    let idx = base + offset;
                    *slot = Some(run_suite_item(&tasks[idx], noise, seed, idx as u64));
                }
            });
        }
    });
    let results: Result<Vec<PermutationResult>> = slots
        .into_iter()
        .map(|slot| slot.expect("all suite slots filled"))
        .collect();
    let results = results?;

    let total = results.len();
    let mean =
        |f: &dyn Fn(&PermutationResult) -> f64| results.iter().map(f).sum::<f64>() / total as f64;
    let mean_noiseless = mean(&|r| r.fidelity_noiseless);
    let mean_noisy = mean(&|r| r.fidelity_noisy);
    let min_noisy = results
        .iter()
        .map(|r| r.fidelity_noisy)
        .fold(f64::INFINITY, f64::min);

    let mut per_n_counts = Vec::new();
    let mut per_n_mean = Vec::new();
    for &(n, _) in sizes {
        let batch: Vec<&PermutationResult> = results.iter().filter(|r| r.n == n).collect();
        if batch.is_empty() {
            continue;
        }
        per_n_counts.push((n, batch.len()));
        per_n_mean.push((
            n,
            batch.iter().map(|r| r.fidelity_noisy).sum::<f64>() / batch.len() as f64,
        ));
    }

    // 20 fidelity buckets over [0.9, 1.0]
    let mut histogram = vec![0usize; 20];
    for r in &results {
        let idx = (((r.fidelity_noisy - 0.9) / 0.005).floor() as isize).clamp(0, 19) as usize;
        histogram[idx] += 1;
    }
    let histogram = histogram
        .into_iter()
        .enumerate()
        .map(|(i, c)| (0.9 + 0.005 * i as f64, c))
        .collect();

    Ok(SuiteReport {
        noise: *noise,
        seed,
        total,
        mean_fidelity_noiseless: mean_noiseless,
        mean_fidelity_noisy: mean_noisy,
        min_fidelity_noisy: min_noisy,
        per_n_counts,
        per_n_mean_noisy: per_n_mean,
        histogram,
        results,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub t_hours: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub spec_hash: String,
    pub noise: NoiseModel,
    pub seed: u64,
    pub shots: Option<u64>,
    pub duration_hours: f64,
    pub step_hours: f64,
    pub series: Vec<StabilityPoint>,
    pub mean: f64,
    pub min: f64,
    pub std: f64,
    pub slope_per_hour: f64,
    pub slope_ci95: (f64, f64),
}

/// Long-run fidelity trace: at each time step the circuit is re-perturbed,
/// simulated, optionally sampled, estimated and scored against the unperturbed
/// target. `shots = None` uses exact probabilities.
pub fn stability_run(
    spec: &CircuitSpec,
    noise: &NoiseModel,
    duration_hours: f64,
    step_hours: f64,
    shots: Option<u64>,
    seed: u64,
    hw: &HardwareConfig,
) -> Result<StabilityReport> {
    assert!(duration_hours > 0.0 && step_hours > 0.0);
    noise.validate()?;
    let target_net = compose_network(spec, &spec.space()?)?;
    let eta = hw.system_transmittance()?;
    let target = detection_matrix(&target_net.logical, 1.0)?;

    let steps = (duration_hours / step_hours).floor() as usize + 1;
    let mut series = Vec::with_capacity(steps);
    for step in 0..steps {
        let t = step as f64 * step_hours;
        let mut rng = derive_rng(seed, step as u64);
        let noisy = perturb_circuit(spec, noise, t, &mut rng)?;
        let net = compose_network(&noisy, &noisy.space()?)?;
        let det = detection_matrix(&net.logical, eta)?;
        let measured = match shots {
            None => det.renormalized()?,
            Some(shots) => {
                let duration_s = shots as f64 / hw.rep_rate_hz;
                let records: Result<Vec<_>> = (0..det.n_inputs())
                    .map(|j| {
                        sample_counts_with_background(
                            &det,
                            j,
                            shots,
                            noise.dark_rate_hz,
                            duration_s,
                            &mut rng,
                        )
                    })
                    .collect();
                estimate_detection_matrix(&records?)?
            }
        };
        series.push(StabilityPoint {
            t_hours: t,
            fidelity: fidelity(&target, &measured)?,
        });
    }

    let n = series.len() as f64;
    let mean = series.iter().map(|p| p.fidelity).sum::<f64>() / n;
    let min = series
        .iter()
        .map(|p| p.fidelity)
        .fold(f64::INFINITY, f64::min);
    let var = series
        .iter()
        .map(|p| (p.fidelity - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let (slope, ci) = ols_slope_ci(&series);

    Ok(StabilityReport {
        spec_hash: spec_hash(spec),
        noise: *noise,
        seed,
        shots,
        duration_hours,
        step_hours,
        series,
        mean,
        min,
        std: var.sqrt(),
        slope_per_hour: slope,
        slope_ci95: ci,
    })
}

/// Ordinary least-squares slope with a 95% normal-approximation interval.
fn ols_slope_ci(series: &[StabilityPoint]) -> (f64, (f64, f64)) {
    let n = series.len() as f64;
    if series.len() < 3 {
        return (0.0, (0.0, 0.0));
    }
    let tbar = series.iter().map(|p| p.t_hours).sum::<f64>() / n;
    let fbar = series.iter().map(|p| p.fidelity).sum::<f64>() / n;
    let sxx: f64 = series.iter().map(|p| (p.t_hours - tbar).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, (0.0, 0.0));
    }
    let sxy: f64 = series
        .iter()
        .map(|p| (p.t_hours - tbar) * (p.fidelity - fbar))
        .sum();
    let slope = sxy / sxx;
    let intercept = fbar - slope * tbar;
    let sse: f64 = series
        .iter()
        .map(|p| (p.fidelity - intercept - slope * p.t_hours).powi(2))
        .sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    (slope, (slope - 1.96 * se, slope + 1.96 * se))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkDepthResult {
    pub depth: usize,
    pub n_couplers: usize,
    pub n_outputs: usize,
    pub distribution_h: Vec<f64>,
    pub distribution_v: Vec<f64>,
    pub tvd_h_vs_v: f64,
    pub fidelity_h: f64,
    pub fidelity_v: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkReport {
    pub theta: f64,
    pub loss_db: f64,
    pub shots: Option<u64>,
    pub seed: u64,
    pub per_depth: Vec<WalkDepthResult>,
}

/// Runs the triangular walk circuit at every depth up to `max_depth`:
/// exact lossless output distributions for both bin-0 inputs, optionally
/// re-estimated from lossy photon counting, and scored against the exact
/// distribution.
pub fn walk_experiment(
    max_depth: usize,
    theta: f64,
    shots: Option<u64>,
    loss_db: f64,
    seed: u64,
) -> Result<WalkReport> {
    let eta = db_to_transmittance(loss_db)?;
    let mut per_depth = Vec::with_capacity(max_depth);
    for depth in 1..=max_depth {
        let spec = galton_board(depth, theta)?;
        let net = compose_network(&spec, &spec.space()?)?;
        let exact = detection_matrix(&net.logical, 1.0)?;
        let dist_h = exact.column(0);
        let dist_v = exact.column(1);
        let tvd = 0.5
            * dist_h
                .iter()
                .zip(&dist_v)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>();
        let (f_h, f_v) = match shots {
            None => (1.0, 1.0),
            Some(shots) => {
                let lossy = detection_matrix(&net.logical, eta)?;
                let mut rng = derive_rng(seed, depth as u64);
                let rec_h = sample_counts_with_background(&lossy, 0, shots, 0.0, 0.0, &mut rng)?;
                let rec_v = sample_counts_with_background(&lossy, 1, shots, 0.0, 0.0, &mut rng)?;
                let est = estimate_detection_matrix(&[rec_h, rec_v])?;
                let f = |col: usize| -> Result<f64> {
                    let t = DetectionMatrix::from_probs(exact.n_outputs(), 1, exact.column(col));
                    let e = DetectionMatrix::from_probs(est.n_outputs(), 1, est.column(col));
                    fidelity(&t, &e)
                };
                (f(0)?, f(1)?)
            }
        };
        per_depth.push(WalkDepthResult {
            depth,
            n_couplers: spec.couplers.len(),
            n_outputs: net.logical.rows(),
            distribution_h: dist_h,
            distribution_v: dist_v,
            tvd_h_vs_v: tvd,
            fidelity_h: f_h,
            fidelity_v: f_v,
        });
    }
    Ok(WalkReport {
        theta,
        loss_db,
        shots,
        seed,
        per_depth,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateReport {
    pub spec_hash: String,
    pub n_logical: usize,
    pub topology: String,
    pub noise: NoiseModel,
    pub shots: Option<u64>,
    pub seed: u64,
    pub system_loss_db: f64,
    pub fidelity: f64,
    pub matrix: Vec<Vec<f64>>,
    pub target: Vec<Vec<f64>>,
}

/// One-shot simulation of a circuit: perturb, compose, apply loss, optionally
/// sample and estimate, then score against the circuit's own noiseless
/// detection matrix.
pub fn simulate_circuit(
    spec: &CircuitSpec,
    hw: &HardwareConfig,
    noise: &NoiseModel,
    shots: Option<u64>,
) -> Result<SimulateReport> {
    noise.validate()?;
    let target_net = compose_network(spec, &spec.space()?)?;
    let target = detection_matrix(&target_net.logical, 1.0)?;

    let mut rng = ChaCha12Rng::seed_from_u64(noise.seed);
    let noisy_spec = perturb_circuit(spec, noise, 0.0, &mut rng)?;
    let noisy_net = compose_network(&noisy_spec, &noisy_spec.space()?)?;
    let eta = hw.system_transmittance()?;
    let lossy = detection_matrix(&noisy_net.logical, eta)?;

    let measured = match shots {
        None => lossy.renormalized()?,
        Some(shots) => {
            let duration_s = shots as f64 / hw.rep_rate_hz;
            let records: Result<Vec<_>> = (0..lossy.n_inputs())
                .map(|j| {
                    sample_counts_with_background(
                        &lossy,
                        j,
                        shots,
                        noise.dark_rate_hz,
                        duration_s,
                        &mut rng,
                    )
                })
                .collect();
            estimate_detection_matrix(&records?)?
        }
    };
    let f = fidelity(&target, &measured)?;
    Ok(SimulateReport {
        spec_hash: spec_hash(spec),
        n_logical: spec.n_logical,
        topology: spec.topology.name().to_string(),
        noise: *noise,
        shots,
        seed: noise.seed,
        system_loss_db: hw.system_loss_db,
        fidelity: f,
        matrix: measured.rows_vec(),
        target: target.rows_vec(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HadamardBasisResult {
    pub family: String,
    pub detection: Vec<Vec<f64>>,
    pub max_deviation_from_quarter: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HadamardReport {
    pub spec_hash: String,
    pub pulses: usize,
    pub per_basis: Vec<HadamardBasisResult>,
}

/// Characterizes the two-pulse uniform gate in all four input families.
pub fn hadamard_characterization() -> Result<HadamardReport> {
    let spec = hadamard4_recipe();
    let u = reconstruct(&spec)?;
    let space = crate::modes::ModeSpace::new(4, 2)?;
    let mut per_basis = Vec::new();
    for family in BasisFamily::ALL {
        let det = detection_in_basis(&u, family, &space, 1.0)?;
        let max_dev = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (det.prob(i, j) - 0.25).abs())
            .fold(0.0, f64::max);
        per_basis.push(HadamardBasisResult {
            family: family.name().to_string(),
            detection: det.rows_vec(),
            max_deviation_from_quarter: max_dev,
        });
    }
    Ok(HadamardReport {
        spec_hash: spec_hash(&spec),
        pulses: spec.couplers.iter().filter(|c| c.theta != 0.0).count(),
        per_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_endpoints_hit_identity_and_swap() {
        let report = theta_sweep(9).unwrap();
        let first = &report.points[0];
        let last = &report.points[8];
        assert!((first.fidelity_identity - 1.0).abs() < 1e-12);
        assert!((last.fidelity_swap - 1.0).abs() < 1e-12);
        assert!(first.fidelity_swap < 0.9);
    }

    #[test]
    fn sweep_midpoint_splits_the_coupled_pair() {
        let report = theta_sweep(9).unwrap();
        let mid = &report.points[4]; // theta = pi/4
        assert!((mid.theta - FRAC_PI_2 / 2.0).abs() < 1e-12);
        assert!((mid.detection[1][1] - 0.5).abs() < 1e-12);
        assert!((mid.detection[2][1] - 0.5).abs() < 1e-12);
        assert!((mid.detection[1][2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_fidelities_are_monotone() {
        let report = theta_sweep(33).unwrap();
        for w in report.points.windows(2) {
            assert!(w[1].fidelity_identity <= w[0].fidelity_identity + 1e-12);
            assert!(w[1].fidelity_swap >= w[0].fidelity_swap - 1e-12);
        }
    }

    #[test]
    fn noiseless_suite_is_exact() {
        let sizes = [(2, None), (3, None), (4, None)];
        let report = permutation_suite(&sizes, &NoiseModel::noiseless(), 1).unwrap();
        assert_eq!(report.total, 32);
        for r in &report.results {
            assert!((r.fidelity_noiseless - 1.0).abs() < 1e-12);
            assert!((r.fidelity_noisy - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_suite_has_362_items() {
        let total: usize = default_suite_sizes()
            .iter()
            .map(|&(n, k)| k.unwrap_or_else(|| (1..=n).product()))
            .sum();
        assert_eq!(total, 362);
    }

    #[test]
    fn suite_is_seed_deterministic() {
        let sizes = [(5, Some(4)), (6, Some(4))];
        let noise = NoiseModel::default();
        let a = permutation_suite(&sizes, &noise, 99).unwrap();
        let b = permutation_suite(&sizes, &noise, 99).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn stability_flat_at_one_without_noise() {
        let spec = switch_circuit(FRAC_PI_2);
        let report = stability_run(
            &spec,
            &NoiseModel::noiseless(),
            5.0,
            1.0,
            None,
            3,
            &HardwareConfig::default(),
        )
        .unwrap();
        assert_eq!(report.series.len(), 6);
        for p in &report.series {
            assert!((p.fidelity - 1.0).abs() < 1e-12);
        }
        assert!((report.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stability_same_seed_same_series() {
        let spec = switch_circuit(FRAC_PI_2);
        let noise = NoiseModel::default();
        let hw = HardwareConfig::default();
        let a = stability_run(&spec, &noise, 4.0, 1.0, Some(2000), 5, &hw).unwrap();
        let b = stability_run(&spec, &noise, 4.0, 1.0, Some(2000), 5, &hw).unwrap();
        for (x, y) in a.series.iter().zip(&b.series) {
            assert_eq!(x.fidelity, y.fidelity);
        }
    }

    #[test]
    fn walk_depths_have_unit_mass_and_growing_cone() {
        let report = walk_experiment(6, FRAC_PI_2 / 2.0, None, WALK_SYSTEM_LOSS_DB, 1).unwrap();
        for d in &report.per_depth {
            assert_eq!(d.n_outputs, 2 * d.depth);
            assert_eq!(d.n_couplers, d.depth * (d.depth + 1) / 2);
            let sum_h: f64 = d.distribution_h.iter().sum();
            let sum_v: f64 = d.distribution_v.iter().sum();
            assert!((sum_h - 1.0).abs() < 1e-12);
            assert!((sum_v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hadamard_characterization_is_uniform() {
        let report = hadamard_characterization().unwrap();
        assert_eq!(report.pulses, 2);
        for basis in &report.per_basis {
            assert!(
                basis.max_deviation_from_quarter < 1e-12,
                "{}: {}",
                basis.family,
                basis.max_deviation_from_quarter
            );
        }
    }
}
