//! Physical calibration: pulse energies, loss budgets, noise and scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::elements::{CircuitSpec, FRAC_PI_2};
use crate::error::{Error, Result};

// round-off allowance at the calibration boundary, so a coupling angle that
// went through 9-digit serialization still schedules
const THETA_BOUNDARY_TOL: f64 = 1e-8;

/// Physical constants of the experimental platform.
///
/// The defaults are the measured hardware figures: an 80 MHz pulse train,
/// 715 nm signal and 790 nm control wavelengths, 10 mm birefringent crystals
/// giving 4.3 ps bin separation, and -1 dB of loss per programmable layer.
/// `system_loss_db` is the overall end-to-end budget including detector
/// efficiency and varies per experiment (-5.2 dB for the small switching
/// circuit, -7.2 dB for the gate circuits, -13 dB for the deep walk).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HardwareConfig {
    pub rep_rate_hz: f64,
    pub signal_wavelength_nm: f64,
    pub control_wavelength_nm: f64,
    pub bin_separation_ps: f64,
    pub crystal_length_mm: f64,
    pub poutine_loss_db: f64,
    pub system_loss_db: f64,
}

impl Default for HardwareConfig {
    fn default() -> Self {
        Self {
            rep_rate_hz: 80e6,
            signal_wavelength_nm: 715.0,
            control_wavelength_nm: 790.0,
            bin_separation_ps: 4.3,
            crystal_length_mm: 10.0,
            poutine_loss_db: -1.0,
            system_loss_db: -5.2,
        }
    }
}

impl HardwareConfig {
    pub fn with_system_loss_db(mut self, db: f64) -> Self {
        self.system_loss_db = db;
        self
    }

    /// Repetition frame length in picoseconds (12.5 ns at 80 MHz).
    pub fn frame_ps(&self) -> f64 {
        1e12 / self.rep_rate_hz
    }

    /// End-to-end transmittance of the configured system loss.
    pub fn system_transmittance(&self) -> Result<f64> {
        db_to_transmittance(self.system_loss_db)
    }
}

/// Stochastic imperfection model. All magnitudes are artifact knobs, not
/// measured figures; reports must echo the settings used.
///
/// `theta_rel_jitter` is the per-shot relative spread of the coupling angle
/// (control-pulse energy fluctuations). `phase_drift_rad_per_hour` drifts
/// every crystal phase linearly in time, and `phase_static_sigma` draws one
/// static phase offset per crystal from the model seed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    pub theta_rel_jitter: f64,
    pub phase_drift_rad_per_hour: f64,
    pub phase_static_sigma: f64,
    pub dark_rate_hz: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            theta_rel_jitter: 0.01,
            phase_drift_rad_per_hour: 0.0,
            phase_static_sigma: 0.0,
            dark_rate_hz: 0.0,
            seed: 7,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            theta_rel_jitter: 0.0,
            phase_drift_rad_per_hour: 0.0,
            phase_static_sigma: 0.0,
            dark_rate_hz: 0.0,
            seed: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (q, v) in [
            ("theta_rel_jitter", self.theta_rel_jitter),
            ("phase_drift_rad_per_hour", self.phase_drift_rad_per_hour),
            ("phase_static_sigma", self.phase_static_sigma),
            ("dark_rate_hz", self.dark_rate_hz),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::NegativeQuantity {
                    quantity: q,
                    value: v,
                });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.theta_rel_jitter == 0.0
            && self.phase_drift_rad_per_hour == 0.0
            && self.phase_static_sigma == 0.0
            && self.dark_rate_hz == 0.0
    }
}

/// Coupling angle from control pulse energy: `theta = kappa * E`, clamped to
/// the physical range `[0, pi/2]`.
pub fn theta_from_energy(energy: f64, kappa: f64) -> Result<f64> {
    if energy < 0.0 {
        return Err(Error::NegativeQuantity {
            quantity: "pulse energy",
            value: energy,
        });
    }
    if kappa <= 0.0 {
        return Err(Error::NegativeQuantity {
            quantity: "calibration kappa",
            value: kappa,
        });
    }
    Ok((kappa * energy).min(FRAC_PI_2))
}

/// Inverse of [`theta_from_energy`] on `[0, pi/2]`.
pub fn energy_from_theta(theta: f64, kappa: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2 + THETA_BOUNDARY_TOL).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    let theta = theta.min(FRAC_PI_2);
    if kappa <= 0.0 {
        return Err(Error::NegativeQuantity {
            quantity: "calibration kappa",
            value: kappa,
        });
    }
    Ok(theta / kappa)
}

/// Power transmittance of a loss figure in dB: `eta = 10^(db/10)`.
pub fn db_to_transmittance(db: f64) -> Result<f64> {
    if db > 0.0 {
        return Err(Error::PositiveLoss { db });
    }
    Ok(10f64.powf(db / 10.0))
}

/// Applies the noise model to a compiled circuit at elapsed time `t_hours`.
///
/// Every coupling angle is scaled by `1 + eps` with `eps ~ N(0, sigma)`
/// (a silent coupler stays silent: `0 * (1+eps) = 0`), and every coupler
/// phase is offset by the drift accumulated over `t_hours` plus its crystal's
/// static offset. Waveplates and output phases are left untouched. The result
/// is a deterministic function of `(spec, noise, t_hours, rng state)`.
pub fn perturb_circuit<R: Rng + ?Sized>(
    spec: &CircuitSpec,
    noise: &NoiseModel,
    t_hours: f64,
    rng: &mut R,
) -> Result<CircuitSpec> {
    spec.validate()?;
    noise.validate()?;
    let layers = spec.layers();
    // static per-crystal offsets come from the model seed, not the run rng
    let static_offsets: Vec<f64> = if noise.phase_static_sigma > 0.0 {
        let mut srng = ChaCha12Rng::seed_from_u64(noise.seed);
        let dist = Normal::new(0.0, noise.phase_static_sigma).expect("sigma validated");
        (0..layers).map(|_| dist.sample(&mut srng)).collect()
    } else {
        vec![0.0; layers]
    };
    let drift = noise.phase_drift_rad_per_hour * t_hours;

    let mut out = spec.clone();
    if noise.theta_rel_jitter > 0.0 {
        let dist = Normal::new(0.0, noise.theta_rel_jitter).expect("sigma validated");
        for c in out.couplers.iter_mut() {
            let eps: f64 = dist.sample(rng);
            c.theta *= 1.0 + eps;
        }
    }
    if drift != 0.0 || noise.phase_static_sigma > 0.0 {
        for c in out.couplers.iter_mut() {
            c.phi += drift + static_offsets[c.layer];
        }
    }
    Ok(out)
}

/// One control pulse of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Pulse {
    pub layer: usize,
    pub slot: usize,
    pub time_ps: f64,
    pub energy_au: f64,
    pub phase_rad: f64,
}

/// Control pulses for a compiled circuit, one per coupler with nonzero
/// coupling. Phase-only couplers need no pulse energy (their phases are set
/// passively) and do not appear.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PulseSchedule {
    pub pulses: Vec<Pulse>,
}

impl PulseSchedule {
    /// CSV with header `layer,slot,time_ps,energy_au,phase_rad`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("layer,slot,time_ps,energy_au,phase_rad\n");
        for p in &self.pulses {
            s.push_str(&format!(
                "{},{},{:e},{:e},{:e}\n",
                p.layer, p.slot, p.time_ps, p.energy_au, p.phase_rad
            ));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }
}

/// Derives the pulse schedule of a circuit: arrival time `slot * bin
/// separation` within the frame, energy from the inverse calibration map.
///
/// Errors if any coupling angle left the physical range `[0, pi/2]` or if the
/// occupied bins do not fit in one repetition frame.
pub fn control_schedule(
    spec: &CircuitSpec,
    hw: &HardwareConfig,
    kappa: f64,
) -> Result<PulseSchedule> {
    spec.validate()?;
    let mut pulses = Vec::new();
    for c in spec.sorted_couplers() {
        if !(0.0..=FRAC_PI_2 + THETA_BOUNDARY_TOL).contains(&c.theta) {
            return Err(Error::ThetaOutOfRange { theta: c.theta });
        }
        if c.theta == 0.0 {
            continue;
        }
        let time_ps = c.slot as f64 * hw.bin_separation_ps;
        pulses.push(Pulse {
            layer: c.layer,
            slot: c.slot,
            time_ps,
            energy_au: energy_from_theta(c.theta, kappa)?,
            phase_rad: c.phi,
        });
    }
    let needed = pulses.iter().map(|p| p.time_ps).fold(0.0, f64::max) + hw.bin_separation_ps;
    if needed > hw.frame_ps() {
        return Err(Error::FrameOverflow {
            needed_ps: needed,
            frame_ps: hw.frame_ps(),
        });
    }
    Ok(PulseSchedule { pulses })
}
