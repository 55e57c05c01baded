//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by circuit construction, compilation and simulation.
///
/// Parser diagnostics carry their own positional type, [`crate::dsl::ParseError`],
/// and are wrapped in [`Error::Parse`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("mode index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("basis family {family} is only defined for N=4 (got N={n})")]
    UnsupportedBasis { family: &'static str, n: usize },

    #[error("logical dimension must be even and >= 2 (got {n})")]
    OddDimension { n: usize },

    #[error("matrix deviates from unitarity by {deviation:.3e} (tolerance {tol:.3e})")]
    NonUnitary { deviation: f64, tol: f64 },

    #[error("duplicate coupler at layer {layer}, slot {slot}")]
    DuplicateCoupler { layer: usize, slot: usize },

    #[error("coupler slot {slot} out of range for layer {layer} (max {max})")]
    SlotOutOfRange {
        layer: usize,
        slot: usize,
        max: usize,
    },

    #[error("coupler layer {layer} out of range (network has {layers} layers)")]
    LayerOutOfRange { layer: usize, layers: usize },

    #[error("rotation position {position} out of range (valid 0..={max})")]
    RotationOutOfRange { position: usize, max: usize },

    #[error("rotations are not supported on the {topology} topology")]
    RotationUnsupported { topology: &'static str },

    #[error("output phase layer has {got} entries, expected {expected}")]
    PhaseLayerLength { got: usize, expected: usize },

    #[error("insufficient padding: {needed} bins needed, space has {available}")]
    InsufficientPadding { needed: usize, available: usize },

    #[error("coupler parameter not finite at layer {layer}, slot {slot}")]
    NonFiniteParameter { layer: usize, slot: usize },

    #[error("{quantity} must be non-negative (got {value})")]
    NegativeQuantity { quantity: &'static str, value: f64 },

    #[error("loss must be expressed in dB <= 0 (got {db})")]
    PositiveLoss { db: f64 },

    #[error("coupling angle {theta} outside [0, pi/2]")]
    ThetaOutOfRange { theta: f64 },

    #[error("invalid permutation: {reason}")]
    InvalidPermutation { reason: String },

    #[error("galton board depth must be >= 1")]
    ZeroDepth,

    #[error("detection column {column} has no probability mass")]
    ZeroColumn { column: usize },

    #[error("counts record has zero shots")]
    ZeroShots,

    #[error("photon number {n} exceeds the supported maximum of {max}")]
    TooManyPhotons { n: usize, max: usize },

    #[error("pulse schedule does not fit in one repetition frame ({needed_ps:.1} ps > {frame_ps:.1} ps)")]
    FrameOverflow { needed_ps: f64, frame_ps: f64 },

    #[error(transparent)]
    Parse(#[from] crate::dsl::ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
