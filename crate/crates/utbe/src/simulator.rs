//! Detection statistics: probability matrices, photon counting, fidelity,
//! and few-photon transition amplitudes.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::modes::{basis_matrix, BasisFamily, ModeSpace};

/// Column-wise detection probability matrix.
///
/// Entry `(i, j)` is the probability of a click in output mode `i` given a
/// photon in input mode `j`. Columns sum to the transmittance (1 when
/// lossless); the no-detection outcome carries the remainder.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectionMatrix {
    n_outputs: usize,
    n_inputs: usize,
    probs: Vec<f64>,
}

impl DetectionMatrix {
    pub fn from_probs(n_outputs: usize, n_inputs: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), n_outputs * n_inputs);
        Self {
            n_outputs,
            n_inputs,
            probs,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut probs = vec![0.0; n * n];
        for i in 0..n {
            probs[i * n + i] = 1.0;
        }
        Self::from_probs(n, n, probs)
    }

    /// Uniform matrix with all entries `eta / n_outputs`.
    pub fn uniform(n_outputs: usize, n_inputs: usize, eta: f64) -> Self {
        Self::from_probs(
            n_outputs,
            n_inputs,
            vec![eta / n_outputs as f64; n_outputs * n_inputs],
        )
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn prob(&self, output: usize, input: usize) -> f64 {
        self.probs[output * self.n_inputs + input]
    }

    pub fn column(&self, input: usize) -> Vec<f64> {
        (0..self.n_outputs).map(|i| self.prob(i, input)).collect()
    }

    pub fn column_sum(&self, input: usize) -> f64 {
        self.column(input).iter().sum()
    }

    /// Columns rescaled to unit sum, removing loss before comparison.
    pub fn renormalized(&self) -> Result<DetectionMatrix> {
        let mut probs = self.probs.clone();
        for j in 0..self.n_inputs {
            let s = self.column_sum(j);
            if s <= 0.0 {
                return Err(Error::ZeroColumn { column: j });
            }
            for i in 0..self.n_outputs {
                probs[i * self.n_inputs + j] /= s;
            }
        }
        Ok(DetectionMatrix::from_probs(
            self.n_outputs,
            self.n_inputs,
            probs,
        ))
    }

    pub fn max_abs_diff(&self, other: &DetectionMatrix) -> f64 {
        assert_eq!(
            (self.n_outputs, self.n_inputs),
            (other.n_outputs, other.n_inputs)
        );
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV lines `i,j,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,value\n");
        for i in 0..self.n_outputs {
            for j in 0..self.n_inputs {
                s.push_str(&format!("{},{},{:e}\n", i, j, self.prob(i, j)));
            }
        }
        s
    }

    pub fn rows_vec(&self) -> Vec<Vec<f64>> {
        (0..self.n_outputs)
            .map(|i| (0..self.n_inputs).map(|j| self.prob(i, j)).collect())
            .collect()
    }
}

/// Detection probabilities of a transformation under uniform loss:
/// `p_ij = eta * |U_ij|^2`.
///
/// `U` must satisfy `U†U = I` within 1e-10 (square unitaries and tall
/// isometries both qualify).
pub fn detection_matrix(u: &ComplexMatrix, eta: f64) -> Result<DetectionMatrix> {
    if !(0.0 < eta && eta <= 1.0) {
        return Err(Error::NegativeQuantity {
            quantity: "transmittance",
            value: eta,
        });
    }
    u.require_isometry(1e-10)?;
    let (rows, cols) = (u.rows(), u.cols());
    let mut probs = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            probs[i * cols + j] = eta * u[(i, j)].norm_sqr();
        }
    }
    Ok(DetectionMatrix::from_probs(rows, cols, probs))
}

/// Detection probabilities with the inputs prepared in a basis family:
/// column `j` holds `|U b_j|^2` (detectors stay in the computational basis).
pub fn detection_in_basis(
    u: &ComplexMatrix,
    family: BasisFamily,
    space: &ModeSpace,
    eta: f64,
) -> Result<DetectionMatrix> {
    let b = basis_matrix(family, space)?;
    detection_matrix(&u.mul(&b), eta)
}

/// Overlap score between two detection probability matrices:
/// the normalized trace of `|A†|·|B|` with elementwise magnitudes, evaluated
/// on column-renormalized probabilities as
/// `F = (1/N) Σ_ij sqrt(P_t[i,j] · P_e[i,j])`.
///
/// Columns are renormalized first so loss is not scored as infidelity.
/// `F = 1` exactly when the renormalized matrices coincide.
pub fn fidelity(target: &DetectionMatrix, measured: &DetectionMatrix) -> Result<f64> {
    if target.n_outputs != measured.n_outputs || target.n_inputs != measured.n_inputs {
        return Err(Error::DimensionMismatch {
            context: "detection matrix shapes",
            left: target.n_outputs * target.n_inputs,
            right: measured.n_outputs * measured.n_inputs,
        });
    }
    let t = target.renormalized()?;
    let m = measured.renormalized()?;
    let mut f = 0.0;
    for i in 0..t.n_outputs {
        for j in 0..t.n_inputs {
            f += (t.prob(i, j) * m.prob(i, j)).sqrt();
        }
    }
    Ok(f / t.n_inputs as f64)
}

/// Photon counts accumulated for one input setting.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CountsRecord {
    pub counts: Vec<u64>,
    pub missed: u64,
    pub shots: u64,
    pub duration_s: f64,
}

impl CountsRecord {
    pub fn detected(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Samples `shots` photons through column `input` of a detection matrix:
/// a multinomial draw over the output modes plus a no-detection outcome with
/// the residual probability. Reproducible given the rng state.
pub fn sample_counts<R: Rng + ?Sized>(
    p: &DetectionMatrix,
    input: usize,
    shots: u64,
    rng: &mut R,
) -> Result<CountsRecord> {
    sample_counts_with_background(p, input, shots, 0.0, 0.0, rng)
}

/// [`sample_counts`] plus uniform dark counts: each output mode accrues
/// Poisson background with mean `dark_rate_hz * duration_s / n_outputs`.
pub fn sample_counts_with_background<R: Rng + ?Sized>(
    p: &DetectionMatrix,
    input: usize,
    shots: u64,
    dark_rate_hz: f64,
    duration_s: f64,
    rng: &mut R,
) -> Result<CountsRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if input >= p.n_inputs() {
        return Err(Error::IndexOutOfRange {
            index: input,
            dim: p.n_inputs(),
        });
    }
    let column = p.column(input);
    // chained binomial draws give an exact multinomial sample
    let mut counts = vec![0u64; p.n_outputs()];
    let mut remaining_shots = shots;
    let mut remaining_prob = 1.0f64;
    for (i, &pi) in column.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        let q = (pi / remaining_prob).clamp(0.0, 1.0);
        let draw = if q >= 1.0 {
            remaining_shots
        } else {
            Binomial::new(remaining_shots, q)
                .expect("probability clamped to [0,1]")
                .sample(rng)
        };
        counts[i] = draw;
        remaining_shots -= draw;
        remaining_prob -= pi;
        if remaining_prob <= 0.0 {
            break;
        }
    }
    let missed = remaining_shots;
    if dark_rate_hz > 0.0 && duration_s > 0.0 {
        let mean = dark_rate_hz * duration_s / p.n_outputs() as f64;
        let poisson = Poisson::new(mean).expect("positive mean");
        for c in counts.iter_mut() {
            *c += poisson.sample(rng) as u64;
        }
    }
    Ok(CountsRecord {
        counts,
        missed,
        shots,
        duration_s,
    })
}

/// Counts as CSV lines `i,j,value`: output mode `i`, input setting `j`.
pub fn counts_to_csv(records: &[CountsRecord]) -> String {
    let mut s = String::from("i,j,value\n");
    for (j, rec) in records.iter().enumerate() {
        for (i, c) in rec.counts.iter().enumerate() {
            s.push_str(&format!("{i},{j},{c}\n"));
        }
    }
    s
}

/// Column-normalized empirical frequencies from one counts record per input.
pub fn estimate_detection_matrix(records: &[CountsRecord]) -> Result<DetectionMatrix> {
    let n_inputs = records.len();
    let n_outputs = records.first().map_or(0, |r| r.counts.len());
    let mut probs = vec![0.0; n_outputs * n_inputs];
    for (j, rec) in records.iter().enumerate() {
        assert_eq!(rec.counts.len(), n_outputs, "ragged count records");
        let total = rec.detected();
        if total == 0 {
            return Err(Error::ZeroColumn { column: j });
        }
        for i in 0..n_outputs {
            probs[i * n_inputs + j] = rec.counts[i] as f64 / total as f64;
        }
    }
    Ok(DetectionMatrix::from_probs(n_outputs, n_inputs, probs))
}

const MAX_PHOTONS: usize = 4;

/// Permanent by Ryser's inclusion-exclusion formula. Exponential cost; fine
/// for the n <= 4 sizes this crate supports.
fn permanent(a: &ComplexMatrix) -> C64 {
    let n = a.rows();
    debug_assert!(a.is_square());
    if n == 0 {
        return C64::ONE;
    }
    let mut total = C64::ZERO;
    for subset in 1u32..(1 << n) {
        let mut prod = C64::ONE;
        for i in 0..n {
            let mut row_sum = C64::ZERO;
            for j in 0..n {
                if subset & (1 << j) != 0 {
                    row_sum += a[(i, j)];
                }
            }
            prod *= row_sum;
        }
        let sign = if (subset.count_ones() as usize + n).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += prod * sign;
    }
    total
}

/// Transition amplitude for `n` indistinguishable photons through `u`:
/// the permanent of the submatrix `u[outputs, inputs]` divided by the square
/// roots of the mode-occupation factorials of both patterns.
///
/// Patterns are multisets of mode indices; `n <= 4`.
pub fn multi_photon_amplitude(
    u: &ComplexMatrix,
    inputs: &[usize],
    outputs: &[usize],
) -> Result<C64> {
    if inputs.len() != outputs.len() {
        return Err(Error::DimensionMismatch {
            context: "photon numbers in vs out",
            left: inputs.len(),
            right: outputs.len(),
        });
    }
    let n = inputs.len();
    if n > MAX_PHOTONS {
        return Err(Error::TooManyPhotons {
            n,
            max: MAX_PHOTONS,
        });
    }
    for &m in inputs {
        if m >= u.cols() {
            return Err(Error::IndexOutOfRange {
                index: m,
                dim: u.cols(),
            });
        }
    }
    for &m in outputs {
        if m >= u.rows() {
            return Err(Error::IndexOutOfRange {
                index: m,
                dim: u.rows(),
            });
        }
    }
    let sub = ComplexMatrix::from_fn(n, n, |i, j| u[(outputs[i], inputs[j])]);
    let norm = (multiplicity_factorial(inputs) * multiplicity_factorial(outputs)).sqrt();
    Ok(permanent(&sub) / norm)
}

fn multiplicity_factorial(pattern: &[usize]) -> f64 {
    let mut sorted = pattern.to_vec();
    sorted.sort_unstable();
    let mut acc = 1.0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
            acc *= run as f64;
        } else {
            run = 1;
        }
    }
    acc
}

/// Joint output distribution of `n` photons entering `u` in `inputs`,
/// enumerated over all output multisets. Used for two-photon checks.
pub fn multi_photon_distribution(
    u: &ComplexMatrix,
    inputs: &[usize],
) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = inputs.len();
    if n > MAX_PHOTONS {
        return Err(Error::TooManyPhotons {
            n,
            max: MAX_PHOTONS,
        });
    }
    let modes = u.rows();
    let mut out = Vec::new();
    let mut pattern = vec![0usize; n];
    enumerate_multisets(modes, n, 0, 0, &mut pattern, &mut |pat| {
        out.push((pat.to_vec(), 0.0));
    });
    for entry in out.iter_mut() {
        let amp = multi_photon_amplitude(u, inputs, &entry.0)?;
        entry.1 = amp.norm_sqr();
    }
    Ok(out)
}

fn enumerate_multisets(
    modes: usize,
    n: usize,
    depth: usize,
    start: usize,
    pattern: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if depth == n {
        emit(pattern);
        return;
    }
    for m in start..modes {
        pattern[depth] = m;
        enumerate_multisets(modes, n, depth + 1, m, pattern, emit);
    }
}
