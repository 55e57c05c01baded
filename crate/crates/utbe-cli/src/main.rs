//! `utbe` — compile, simulate and characterize ultrafast time-bin circuits.
//!
//! Reports go to stdout as JSON (or to `--out`); `--csv` switches the
//! principal table of a report to plot-ready CSV. Exit codes: 0 success,
//! 2 input error, 3 numerical-validation failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use utbe::compiler::mesh_decompose;
use utbe::dsl::{
    parse_document, parse_unitary, serialize_circuit, CircuitDocument, ParseError, ParseErrorKind,
};
use utbe::harness::{
    default_suite_sizes, permutation_suite, simulate_circuit, stability_run, switch_circuit,
    theta_sweep, walk_experiment, WALK_SYSTEM_LOSS_DB,
};
use utbe::photonics::{control_schedule, HardwareConfig, NoiseModel};
use utbe::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "utbe", version, about = "Ultrafast time-bin circuit toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit the report's principal table as CSV instead of JSON
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Args)]
struct NoiseArgs {
    /// Relative per-shot jitter on every coupling angle
    #[arg(long)]
    noise: Option<f64>,
    /// Crystal phase drift in rad/hour
    #[arg(long)]
    drift: Option<f64>,
    /// Master seed for all stochastic stages
    #[arg(long)]
    seed: Option<u64>,
}

impl NoiseArgs {
    fn apply(&self, base: NoiseModel) -> NoiseModel {
        let mut noise = base;
        if let Some(sigma) = self.noise {
            noise.theta_rel_jitter = sigma;
        }
        if let Some(drift) = self.drift {
            noise.phase_drift_rad_per_hour = drift;
        }
        if let Some(seed) = self.seed {
            noise.seed = seed;
        }
        noise
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a unitary (matrix CSV) into a circuit file
    Compile {
        /// Input matrix in `rows,cols` / `i,j,re,im` CSV form
        unitary: PathBuf,
        /// Output circuit path (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate a circuit file: detection matrix, optional sampling, fidelity
    Simulate {
        circuit: PathBuf,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Photon-counting shots per input mode (exact probabilities if absent)
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Sweep the single-coupler switching circuit over theta in [0, pi/2]
    Sweep {
        /// Number of sweep points
        #[arg(long, default_value_t = 33)]
        points: usize,
    },
    /// Run permutation transformations and score their fidelities
    Perms {
        /// Dimension (2..=8); the full 362-item default suite when omitted
        #[arg(long)]
        n: Option<usize>,
        /// Sample size (exhaustive when omitted and n! is small)
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Fidelity time series of a perturbed circuit
    Stability {
        /// Total run length in hours
        #[arg(long)]
        hours: f64,
        /// Step between evaluations in hours
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Photon-counting shots per step (exact probabilities if absent)
        #[arg(long)]
        shots: Option<u64>,
        /// Circuit file (defaults to the N=4 mode-exchange gate)
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Triangular walk circuit output distributions by depth
    Walk {
        /// Maximum circuit depth
        #[arg(long)]
        depth: usize,
        /// Coupling angle shared by all couplers
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        theta: f64,
        /// Photon-counting shots per input (exact probabilities if absent)
        #[arg(long)]
        shots: Option<u64>,
        /// End-to-end loss applied when sampling, in dB
        #[arg(long, default_value_t = WALK_SYSTEM_LOSS_DB)]
        loss_db: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Control-pulse schedule of a circuit file
    Schedule {
        circuit: PathBuf,
        /// Calibration constant, radians of coupling per unit pulse energy
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        match e.kind {
            ParseErrorKind::MatrixGrosslyNonUnitary { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonUnitary { .. } => CliError::Numerical(e.to_string()),
            Error::Parse(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn emit(cli: &Cli, text: String) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_document(path: &Path) -> Result<CircuitDocument, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_document(&text)?)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Compile { unitary, output } => {
            let text = std::fs::read_to_string(unitary)?;
            let (matrix, warning) = parse_unitary(&text)?;
            if let Some(w) = warning {
                eprintln!("warning: {w}");
            }
            let spec = mesh_decompose(&matrix)?;
            let doc = serialize_circuit(&spec);
            match output {
                Some(path) => std::fs::write(path, doc)?,
                None => emit(cli, doc)?,
            }
            Ok(())
        }
        Command::Simulate {
            circuit,
            noise,
            shots,
        } => {
            let doc = load_document(circuit)?;
            let hw = doc.hardware.unwrap_or_default();
            let model = noise.apply(doc.noise.unwrap_or_else(NoiseModel::noiseless));
            let report = simulate_circuit(&doc.spec, &hw, &model, *shots)?;
            if cli.csv {
                let det = &report.matrix;
                let mut s = String::from("i,j,value\n");
                for (i, row) in det.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        s.push_str(&format!("{i},{j},{v:e}\n"));
                    }
                }
                emit(cli, s)
            } else {
                emit(cli, format!("{}\n", serde_json::to_string_pretty(&report)?))
            }
        }
        Command::Sweep { points } => {
            let report = theta_sweep(*points)?;
            if cli.csv {
                let mut s = String::from("theta,fidelity_identity,fidelity_swap\n");
                for p in &report.points {
                    s.push_str(&format!(
                        "{:e},{:e},{:e}\n",
                        p.theta, p.fidelity_identity, p.fidelity_swap
                    ));
                }
                emit(cli, s)
            } else {
                emit(cli, format!("{}\n", serde_json::to_string_pretty(&report)?))
            }
        }
        Command::Perms { n, samples, noise } => {
            let model = noise.apply(NoiseModel::default());
            let seed = model.seed;
            let sizes: Vec<(usize, Option<usize>)> = match n {
                Some(n) => {
                    if !(2..=8).contains(n) {
                        return Err(CliError::Input(format!(
                            "dimension {n} outside the supported range 2..=8"
                        )));
                    }
                    vec![(*n, *samples)]
                }
                None => default_suite_sizes(),
            };
            let report = permutation_suite(&sizes, &model, seed)?;
            if cli.csv {
                let mut s = String::from("n,fidelity_noiseless,fidelity_noisy\n");
                for r in &report.results {
                    s.push_str(&format!(
                        "{},{:e},{:e}\n",
                        r.n, r.fidelity_noiseless, r.fidelity_noisy
                    ));
                }
                emit(cli, s)
            } else {
                emit(cli, format!("{}\n", serde_json::to_string_pretty(&report)?))
            }
        }
        Command::Stability {
            hours,
            step,
            shots,
            circuit,
            noise,
        } => {
            let (spec, hw, base_noise) = match circuit {
                Some(path) => {
                    let doc = load_document(path)?;
                    (
                        doc.spec,
                        doc.hardware.unwrap_or_default(),
                        doc.noise.unwrap_or_default(),
                    )
                }
                None => (
                    switch_circuit(utbe::elements::FRAC_PI_2),
                    HardwareConfig::default(),
                    NoiseModel::default(),
                ),
            };
            let model = noise.apply(base_noise);
            let report = stability_run(&spec, &model, *hours, *step, *shots, model.seed, &hw)?;
            if cli.csv {
                let mut s = String::from("t_hours,fidelity\n");
                for p in &report.series {
                    s.push_str(&format!("{:e},{:e}\n", p.t_hours, p.fidelity));
                }
                emit(cli, s)
            } else {
                emit(cli, format!("{}\n", serde_json::to_string_pretty(&report)?))
            }
        }
        Command::Walk {
            depth,
            theta,
            shots,
            loss_db,
            seed,
        } => {
            if *depth < 1 {
                return Err(CliError::Input("depth must be >= 1".into()));
            }
            let report = walk_experiment(*depth, *theta, *shots, *loss_db, *seed)?;
            if cli.csv {
                let mut s = String::from("depth,output_mode,prob_h_input,prob_v_input\n");
                for d in &report.per_depth {
                    for (m, (ph, pv)) in d.distribution_h.iter().zip(&d.distribution_v).enumerate()
                    {
                        s.push_str(&format!("{},{},{:e},{:e}\n", d.depth, m, ph, pv));
                    }
                }
                emit(cli, s)
            } else {
                emit(cli, format!("{}\n", serde_json::to_string_pretty(&report)?))
            }
        }
        Command::Schedule { circuit, kappa } => {
            let doc = load_document(circuit)?;
            let hw = doc.hardware.unwrap_or_default();
            let schedule = control_schedule(&doc.spec, &hw, *kappa)?;
            emit(cli, schedule.to_csv())
        }
    }
}
