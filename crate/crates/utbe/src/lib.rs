//! Simulator and compiler for ultrafast time-bin photonic quantum circuits.
//!
//! Photons are encoded in two polarizations over a train of picosecond time
//! bins travelling in a single spatial mode. Programmable layers built from
//! optically induced Kerr couplers, birefringent crystals and waveplates
//! cascade into a rectangular mesh that realizes any unitary on the encoding
//! space. This crate models that platform end to end:
//!
//! - [`modes`]: the polarization ⊗ time-bin space, flat mode ordering and the
//!   N=4 characterization bases.
//! - [`elements`]: exact padded-register matrices for each physical element
//!   and full network composition ([`elements::compose_network`]).
//! - [`compiler`]: unitary-to-mesh decomposition ([`compiler::mesh_decompose`]),
//!   switched-coupler permutation routing, the two-pulse uniform gate and the
//!   triangular walk circuit.
//! - [`photonics`]: pulse-energy calibration, loss budgets, noise models and
//!   control-pulse schedules.
//! - [`simulator`]: detection probability matrices, photon-count sampling,
//!   fidelity scoring and few-photon permanents.
//! - [`dsl`]: the `.tbc` circuit file format and the matrix CSV format.
//! - [`harness`]: end-to-end experiment reproductions with JSON reports.
//!
//! # Quick start
//!
//! Compile a target unitary to coupler settings, rebuild it from the physical
//! element matrices, and check the detection statistics:
//!
//! ```
//! use utbe::compiler::{mesh_decompose, reconstruct};
//! use utbe::elements::compose_network;
//! use utbe::matrix::ComplexMatrix;
//! use utbe::simulator::{detection_matrix, fidelity};
//!
//! let target = ComplexMatrix::permutation(&[1, 0, 3, 2]);
//! let spec = mesh_decompose(&target).unwrap();
//! assert_eq!(spec.couplers.len(), 6); // N(N-1)/2 programmable couplers
//!
//! // abstract route
//! let rebuilt = reconstruct(&spec).unwrap();
//! assert!(rebuilt.max_abs_diff_up_to_phase(&target) < 1e-9);
//!
//! // physical route: padded register, crystals and all
//! let net = compose_network(&spec, &spec.space().unwrap()).unwrap();
//! let p_target = detection_matrix(&target, 1.0).unwrap();
//! let p_physical = detection_matrix(&net.logical, 1.0).unwrap();
//! assert!((fidelity(&p_target, &p_physical).unwrap() - 1.0).abs() < 1e-12);
//! ```

pub mod compiler;
pub mod dsl;
pub mod elements;
mod error;
pub mod harness;
pub mod matrix;
pub mod modes;
pub mod photonics;
pub mod simulator;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;
