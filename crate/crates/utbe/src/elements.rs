//! Physical circuit elements and full network composition.
//!
//! A programmable layer of the temporal circuit consists of three elements in
//! fixed order: Kerr mode couplers acting inside individual time bins, a
//! birefringent crystal delaying the `V` component by exactly one bin, and a
//! fixed `R(pi/2)` polarization rotation that re-pairs neighbouring modes:
//!
//! ```text
//! layer k   =   R(pi/2) · U_bir · U_kerr(k)
//! network   =   layer (N-1) · ... · layer 1 · layer 0
//! ```
//!
//! Even layers couple modes within a time bin, odd layers effectively couple
//! the `V` component of one bin to the `H` component of the next. On the
//! padded register the logical modes drift one bin per two layers; the
//! canonical relabeling recorded by [`compose_network`] undoes that drift so
//! that the all-theta-zero network reads back as the identity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::modes::ModeSpace;

pub const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// One programmable mode coupler: coupling angle `theta`, phase `phi`,
/// positioned by `(layer, slot)` in the network grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CouplerParams {
    pub layer: usize,
    pub slot: usize,
    pub theta: f64,
    pub phi: f64,
}

impl CouplerParams {
    pub fn new(layer: usize, slot: usize, theta: f64, phi: f64) -> Self {
        Self {
            layer,
            slot,
            theta,
            phi,
        }
    }

    /// The 2x2 coupler block. Columns are orthonormal for any parameters.
    pub fn block(theta: f64, phi: f64) -> [[C64; 2]; 2] {
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        [[e * c, C64::new(-s, 0.0)], [e * s, C64::new(c, 0.0)]]
    }
}

/// Network connectivity pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Topology {
    /// N layers alternating N/2 and N/2-1 couplers; programs any N x N unitary.
    RectangularMesh,
    /// Triangular walk circuit: layer k carries k+1 couplers, all fed from bin 0.
    GaltonBoard,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::RectangularMesh => "rect",
            Topology::GaltonBoard => "galton",
        }
    }
}

/// A uniform waveplate rotation inserted into the network.
///
/// `position p` means "between layer p-1 and layer p" (0 = before the first
/// layer, N = after the last). Even positions sit at layer boundaries; odd
/// positions sit inside a layer, between its couplers and its crystal. Both
/// placements act on fully paired bins, so any angle keeps the logical block
/// unitary.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GlobalRotation {
    pub position: usize,
    pub angle: f64,
}

/// A compiled circuit: topology, coupler parameters, waveplate rotations and
/// an optional virtual output phase layer (diagonal phases that no detector
/// can observe, kept for exact matrix bookkeeping).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CircuitSpec {
    pub n_logical: usize,
    pub topology: Topology,
    pub couplers: Vec<CouplerParams>,
    pub global_rotations: Vec<GlobalRotation>,
    pub output_phases: Option<Vec<f64>>,
}

impl CircuitSpec {
    pub fn new(n_logical: usize, topology: Topology) -> Self {
        Self {
            n_logical,
            topology,
            couplers: Vec::new(),
            global_rotations: Vec::new(),
            output_phases: None,
        }
    }

    /// Number of network layers (equals N for the mesh, depth for the board).
    pub fn layers(&self) -> usize {
        match self.topology {
            Topology::RectangularMesh => self.n_logical,
            Topology::GaltonBoard => self.n_logical / 2,
        }
    }

    /// Galton-board depth; callers must only use this on that topology.
    pub fn depth(&self) -> usize {
        debug_assert_eq!(self.topology, Topology::GaltonBoard);
        self.n_logical / 2
    }

    /// Slots available in `layer` under this topology.
    pub fn slots_in_layer(&self, layer: usize) -> usize {
        match self.topology {
            Topology::RectangularMesh => {
                if layer.is_multiple_of(2) {
                    self.n_logical / 2
                } else {
                    self.n_logical / 2 - 1
                }
            }
            Topology::GaltonBoard => layer + 1,
        }
    }

    /// Checks structural invariants: even N, slot/layer ranges, no duplicate
    /// (layer, slot), finite parameters, rotation positions, phase layer length.
    pub fn validate(&self) -> Result<()> {
        if self.n_logical < 2 || !self.n_logical.is_multiple_of(2) {
            return Err(Error::OddDimension { n: self.n_logical });
        }
        let layers = self.layers();
        let mut seen = std::collections::HashSet::new();
        for c in &self.couplers {
            if c.layer >= layers {
                return Err(Error::LayerOutOfRange {
                    layer: c.layer,
                    layers,
                });
            }
            let max = self.slots_in_layer(c.layer);
            if c.slot >= max {
                return Err(Error::SlotOutOfRange {
                    layer: c.layer,
                    slot: c.slot,
                    max: max - 1,
                });
            }
            if !c.theta.is_finite() || !c.phi.is_finite() {
                return Err(Error::NonFiniteParameter {
                    layer: c.layer,
                    slot: c.slot,
                });
            }
            if !seen.insert((c.layer, c.slot)) {
                return Err(Error::DuplicateCoupler {
                    layer: c.layer,
                    slot: c.slot,
                });
            }
        }
        if !self.global_rotations.is_empty() && self.topology == Topology::GaltonBoard {
            return Err(Error::RotationUnsupported {
                topology: self.topology.name(),
            });
        }
        for r in &self.global_rotations {
            if r.position > layers {
                return Err(Error::RotationOutOfRange {
                    position: r.position,
                    max: layers,
                });
            }
        }
        if let Some(ph) = &self.output_phases {
            if ph.len() != self.n_logical {
                return Err(Error::PhaseLayerLength {
                    got: ph.len(),
                    expected: self.n_logical,
                });
            }
        }
        Ok(())
    }

    /// Couplers in canonical order (layer-major, slot-minor).
    pub fn sorted_couplers(&self) -> Vec<CouplerParams> {
        let mut cs = self.couplers.clone();
        cs.sort_by_key(|c| (c.layer, c.slot));
        cs
    }

    pub fn coupler_at(&self, layer: usize, slot: usize) -> Option<&CouplerParams> {
        self.couplers
            .iter()
            .find(|c| c.layer == layer && c.slot == slot)
    }

    /// A mode space padded for this circuit's layer count.
    pub fn space(&self) -> Result<ModeSpace> {
        ModeSpace::for_network(self.n_logical, self.layers())
    }

    fn rotation_at(&self, position: usize) -> Option<f64> {
        self.global_rotations
            .iter()
            .find(|r| r.position == position)
            .map(|r| r.angle)
    }
}

/// Time bin addressed by `(layer, slot)` on the padded register. The logical
/// pairs drift upward one bin per two layers, which this accounts for.
pub fn physical_bin(topology: Topology, layer: usize, slot: usize) -> usize {
    match topology {
        Topology::RectangularMesh => {
            if layer.is_multiple_of(2) {
                slot + layer / 2
            } else {
                slot + layer.div_ceil(2)
            }
        }
        Topology::GaltonBoard => slot,
    }
}

fn embed_block(m: &mut ComplexMatrix, first: usize, block: [[C64; 2]; 2]) {
    m[(first, first)] = block[0][0];
    m[(first, first + 1)] = block[0][1];
    m[(first + 1, first)] = block[1][0];
    m[(first + 1, first + 1)] = block[1][1];
}

/// Kerr coupler layer `k` on the padded register: each pulsed bin carries the
/// coupler block, all other bins carry the identity.
pub fn kerr_layer(k: usize, params: &[CouplerParams], space: &ModeSpace) -> Result<ComplexMatrix> {
    let n = space.n_logical();
    let even_slots = n / 2;
    let odd_slots = n / 2 - 1;
    let mut seen = std::collections::HashSet::new();
    let mut m = ComplexMatrix::identity(space.padded_dim());
    for p in params {
        debug_assert_eq!(p.layer, k, "coupler belongs to another layer");
        let max = if k.is_multiple_of(2) {
            even_slots
        } else {
            odd_slots
        };
        if p.slot >= max {
            return Err(Error::SlotOutOfRange {
                layer: k,
                slot: p.slot,
                max: max.saturating_sub(1),
            });
        }
        if !seen.insert(p.slot) {
            return Err(Error::DuplicateCoupler {
                layer: k,
                slot: p.slot,
            });
        }
        let bin = physical_bin(Topology::RectangularMesh, k, p.slot);
        if bin >= space.n_bins_padded() {
            return Err(Error::InsufficientPadding {
                needed: bin + 1,
                available: space.n_bins_padded(),
            });
        }
        embed_block(&mut m, 2 * bin, CouplerParams::block(p.theta, p.phi));
    }
    Ok(m)
}

/// Kerr pulses at explicit bins; used by walk-topology composition.
fn kerr_at_bins(pulses: &[(usize, f64, f64)], space: &ModeSpace) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::identity(space.padded_dim());
    for &(bin, theta, phi) in pulses {
        if bin >= space.n_bins_padded() {
            return Err(Error::InsufficientPadding {
                needed: bin + 1,
                available: space.n_bins_padded(),
            });
        }
        embed_block(&mut m, 2 * bin, CouplerParams::block(theta, phi));
    }
    Ok(m)
}

/// Birefringent shift: `(H, t_j) -> (H, t_j)`, `(V, t_j) -> (V, t_{j+1})`.
///
/// The padded register is treated as a ring so the matrix is exactly unitary;
/// network composition guarantees no populated amplitude ever wraps. Requires
/// at least one spare bin beyond the logical ones.
pub fn birefringent_shift(space: &ModeSpace) -> Result<ComplexMatrix> {
    let bins = space.n_bins_padded();
    if bins < space.n_logical() / 2 + 1 {
        return Err(Error::InsufficientPadding {
            needed: space.n_logical() / 2 + 1,
            available: bins,
        });
    }
    let mut m = ComplexMatrix::zeros(2 * bins, 2 * bins);
    for b in 0..bins {
        m[(2 * b, 2 * b)] = C64::ONE;
        m[(2 * ((b + 1) % bins) + 1, 2 * b + 1)] = C64::ONE;
    }
    Ok(m)
}

/// Uniform polarization rotation: the same real rotation block on every bin.
pub fn polarization_rotation(angle: f64, space: &ModeSpace) -> ComplexMatrix {
    let bins = space.n_bins_padded();
    let (s, c) = angle.sin_cos();
    let block = [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ];
    let mut m = ComplexMatrix::zeros(2 * bins, 2 * bins);
    for b in 0..bins {
        embed_block(&mut m, 2 * b, block);
    }
    m
}

/// The structural `R(pi/2)` every layer ends with, with the quarter-turn
/// entries snapped exact so a silent network is bitwise a signed permutation.
fn half_turn(space: &ModeSpace) -> ComplexMatrix {
    let bins = space.n_bins_padded();
    let block = [[C64::ZERO, C64::new(-1.0, 0.0)], [C64::ONE, C64::ZERO]];
    let mut m = ComplexMatrix::zeros(2 * bins, 2 * bins);
    for b in 0..bins {
        embed_block(&mut m, 2 * b, block);
    }
    m
}

/// One full programmable layer: `R(pi/2) · U_bir · U_kerr(k)`.
pub fn poutine(k: usize, params: &[CouplerParams], space: &ModeSpace) -> Result<ComplexMatrix> {
    let kerr = kerr_layer(k, params, space)?;
    let bir = birefringent_shift(space)?;
    Ok(half_turn(space).mul(&bir.mul(&kerr)))
}

/// Where a logical mode sits on the padded register after the network, and
/// with which sign, when every coupler is off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelabeledMode {
    pub padded_index: usize,
    pub sign: f64,
}

/// Canonical relabeling between logical modes and padded register modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Relabeling {
    /// Padded flat index of each logical input mode.
    pub inputs: Vec<usize>,
    /// Signed padded landing site of each logical output mode.
    pub outputs: Vec<RelabeledMode>,
}

/// A composed network: the exact padded-register product, the canonical
/// relabeling, and the relabeled logical matrix.
///
/// For the rectangular mesh `logical` is N x N and unitary; for the Galton
/// board it is the (2·depth) x 2 isometry taking the two bin-0 inputs to the
/// reachable output cone.
#[derive(Debug, Clone)]
pub struct ComposedNetwork {
    pub padded: ComplexMatrix,
    pub relabeling: Relabeling,
    pub logical: ComplexMatrix,
}

/// Traces one mode through `layers` passes of the theta-zero network
/// (`R(pi/2) · U_bir`): H stays and flips to V; V shifts one bin, flips to H
/// and picks up a minus sign.
fn trace_zero_network(flat: usize, layers: usize) -> RelabeledMode {
    let mut bin = flat / 2;
    let mut is_v = flat % 2 == 1;
    let mut sign = 1.0;
    for _ in 0..layers {
        if is_v {
            bin += 1;
            sign = -sign;
        }
        is_v = !is_v;
    }
    RelabeledMode {
        padded_index: 2 * bin + usize::from(is_v),
        sign,
    }
}

/// Builds the full padded-register product for `spec` and reads out the
/// relabeled logical matrix.
///
/// Odd-layer couplers are embedded with the coupling angle negated: after an
/// odd number of `R(pi/2)` flips the logical pair straddling a bin carries
/// opposite frame signs, and the negation cancels them. With this convention
/// the relabeled logical matrix reproduces the programmed coupler blocks
/// exactly, not merely up to signs.
pub fn compose_network(spec: &CircuitSpec, space: &ModeSpace) -> Result<ComposedNetwork> {
    spec.validate()?;
    let layers = spec.layers();
    if space.n_logical() != spec.n_logical {
        return Err(Error::DimensionMismatch {
            context: "spec vs space logical dimension",
            left: spec.n_logical,
            right: space.n_logical(),
        });
    }
    if 2 * space.n_bins_padded() < spec.n_logical + 2 * layers {
        return Err(Error::InsufficientPadding {
            needed: spec.n_logical / 2 + layers,
            available: space.n_bins_padded(),
        });
    }

    let bir = birefringent_shift(space)?;
    let half_turn = half_turn(space);
    let mut u = ComplexMatrix::identity(space.padded_dim());
    for k in 0..layers {
        if k % 2 == 0 {
            if let Some(angle) = spec.rotation_at(k) {
                u = polarization_rotation(angle, space).mul(&u);
            }
        }
        let pulses: Vec<(usize, f64, f64)> = spec
            .couplers
            .iter()
            .filter(|c| c.layer == k)
            .map(|c| {
                let theta = if spec.topology == Topology::RectangularMesh && k % 2 == 1 {
                    -c.theta
                } else {
                    c.theta
                };
                (physical_bin(spec.topology, k, c.slot), theta, c.phi)
            })
            .collect();
        u = kerr_at_bins(&pulses, space)?.mul(&u);
        if let Some(angle) = spec.rotation_at(k + 1) {
            if (k + 1) % 2 == 1 {
                u = polarization_rotation(angle, space).mul(&u);
            }
        }
        u = half_turn.mul(&bir.mul(&u));
    }
    if layers.is_multiple_of(2) {
        if let Some(angle) = spec.rotation_at(layers) {
            u = polarization_rotation(angle, space).mul(&u);
        }
    }

    let (relabeling, logical) = match spec.topology {
        Topology::RectangularMesh => {
            let n = spec.n_logical;
            let outputs: Vec<RelabeledMode> =
                (0..n).map(|i| trace_zero_network(i, layers)).collect();
            let mut logical = ComplexMatrix::from_fn(n, n, |i, j| {
                outputs[i].sign * u[(outputs[i].padded_index, j)]
            });
            if let Some(phases) = &spec.output_phases {
                for i in 0..n {
                    let ph = Complex64::from_polar(1.0, phases[i]);
                    for j in 0..n {
                        logical[(i, j)] *= ph;
                    }
                }
            }
            (
                Relabeling {
                    inputs: (0..n).collect(),
                    outputs,
                },
                logical,
            )
        }
        Topology::GaltonBoard => {
            // Reachable cone of the two bin-0 inputs: padded flats 1..=2*depth,
            // i.e. (V,t0), (H,t1), (V,t1), ..., (H,t_depth).
            let d = spec.depth();
            let outputs: Vec<RelabeledMode> = (1..=2 * d)
                .map(|padded_index| RelabeledMode {
                    padded_index,
                    sign: 1.0,
                })
                .collect();
            let mut logical =
                ComplexMatrix::from_fn(2 * d, 2, |i, j| u[(outputs[i].padded_index, j)]);
            if let Some(phases) = &spec.output_phases {
                for i in 0..2 * d {
                    let ph = Complex64::from_polar(1.0, phases[i]);
                    for j in 0..2 {
                        logical[(i, j)] *= ph;
                    }
                }
            }
            (
                Relabeling {
                    inputs: vec![0, 1],
                    outputs,
                },
                logical,
            )
        }
    };

    logical.require_isometry(1e-10)?;
    Ok(ComposedNetwork {
        padded: u,
        relabeling,
        logical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{ModeIndex, Polarization};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn space4() -> ModeSpace {
        ModeSpace::for_network(4, 4).unwrap()
    }

    #[test]
    fn coupler_block_is_unitary_for_any_parameters() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let theta = rng.random_range(-10.0..10.0);
            let phi = rng.random_range(-10.0..10.0);
            let b = CouplerParams::block(theta, phi);
            let m = ComplexMatrix::from_fn(2, 2, |i, j| b[i][j]);
            assert!(m.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn kerr_identity_at_zero_theta() {
        let space = space4();
        let m = kerr_layer(0, &[CouplerParams::new(0, 0, 0.0, 0.0)], &space).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::identity(space.padded_dim())) < 1e-15);
    }

    #[test]
    fn kerr_half_turn_swaps_polarizations_with_sign() {
        let space = space4();
        let m = kerr_layer(0, &[CouplerParams::new(0, 0, FRAC_PI_2, 0.0)], &space).unwrap();
        // block [[0, -1], [1, 0]] on bin 0
        assert!((m[(1, 0)] - C64::ONE).norm() < 1e-15);
        assert!((m[(0, 1)] + C64::ONE).norm() < 1e-15);
        assert!(m[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn kerr_rejects_duplicate_and_out_of_range_slots() {
        let space = space4();
        let dup = [
            CouplerParams::new(0, 0, 0.1, 0.0),
            CouplerParams::new(0, 0, 0.2, 0.0),
        ];
        assert!(matches!(
            kerr_layer(0, &dup, &space),
            Err(Error::DuplicateCoupler { .. })
        ));
        // odd layer of N=4 has a single slot
        let oor = [CouplerParams::new(1, 1, 0.1, 0.0)];
        assert!(matches!(
            kerr_layer(1, &oor, &space),
            Err(Error::SlotOutOfRange { .. })
        ));
    }

    #[test]
    fn birefringent_shift_delays_v_only() {
        let space = space4();
        let m = birefringent_shift(&space).unwrap();
        let h0 = ModeIndex::new(Polarization::H, 0).flat_index();
        let v0 = ModeIndex::new(Polarization::V, 0).flat_index();
        let v1 = ModeIndex::new(Polarization::V, 1).flat_index();
        assert_eq!(m[(h0, h0)], C64::ONE);
        assert_eq!(m[(v1, v0)], C64::ONE);
        assert_eq!(m[(v0, v0)], C64::ZERO);
        assert!(m.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn rotation_group_property() {
        let space = space4();
        let a = polarization_rotation(0.31, &space);
        let b = polarization_rotation(0.55, &space);
        let ab = polarization_rotation(0.86, &space);
        assert!(a.mul(&b).max_abs_diff(&ab) < 1e-12);
        assert!(
            polarization_rotation(0.0, &space)
                .max_abs_diff(&ComplexMatrix::identity(space.padded_dim()))
                < 1e-15
        );
    }

    #[test]
    fn quarter_rotation_maps_h_to_v_with_sign_convention() {
        let space = space4();
        let m = polarization_rotation(FRAC_PI_2, &space);
        for b in 0..space.n_bins_padded() {
            assert!((m[(2 * b + 1, 2 * b)] - C64::ONE).norm() < 1e-15); // H -> V
            assert!((m[(2 * b, 2 * b + 1)] + C64::ONE).norm() < 1e-15); // V -> -H
        }
    }

    #[test]
    fn poutine_with_zero_theta_is_rotation_times_shift() {
        let space = space4();
        let p = poutine(0, &[], &space).unwrap();
        let expect =
            polarization_rotation(FRAC_PI_2, &space).mul(&birefringent_shift(&space).unwrap());
        assert!(p.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn poutine_routes_half_turn_input_to_single_mode() {
        let space = space4();
        let p = poutine(0, &[CouplerParams::new(0, 0, FRAC_PI_2, 0.0)], &space).unwrap();
        let input = crate::matrix::StateVector::basis(space.padded_dim(), 0).unwrap();
        let out = p.mul_vec(&input);
        let probs = out.probabilities();
        let (argmax, max) =
            probs.iter().enumerate().fold(
                (0, 0.0),
                |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc },
            );
        assert!((max - 1.0).abs() < 1e-12);
        // (H,t0) -> V -> delayed -> -(H,t1)
        assert_eq!(argmax, ModeIndex::new(Polarization::H, 1).flat_index());
    }

    #[test]
    fn elements_are_unitary_for_random_parameters() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let space = space4();
        for _ in 0..1000 {
            let k = rng.random_range(0..4usize);
            let slots = if k % 2 == 0 { 2 } else { 1 };
            let params: Vec<CouplerParams> = (0..slots)
                .map(|j| {
                    CouplerParams::new(
                        k,
                        j,
                        rng.random_range(-6.0..6.0),
                        rng.random_range(-6.0..6.0),
                    )
                })
                .collect();
            let m = poutine(k, &params, &space).unwrap();
            assert!(m.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn zero_network_relabels_to_identity() {
        for n in [2usize, 4, 6, 8] {
            let spec = CircuitSpec::new(n, Topology::RectangularMesh);
            let space = spec.space().unwrap();
            let net = compose_network(&spec, &space).unwrap();
            assert!(
                net.logical.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-14,
                "n={n}"
            );
        }
    }

    #[test]
    fn middle_half_turn_coupler_is_a_transposition() {
        let mut spec = CircuitSpec::new(4, Topology::RectangularMesh);
        spec.couplers.push(CouplerParams::new(1, 0, FRAC_PI_2, 0.0));
        let net = compose_network(&spec, &spec.space().unwrap()).unwrap();
        let probs = crate::simulator::detection_matrix(&net.logical, 1.0).unwrap();
        // modes 1 and 2 swap, 0 and 3 pass through
        let expect = ComplexMatrix::permutation(&[0, 2, 1, 3]);
        for i in 0..4 {
            for j in 0..4 {
                assert!((probs.prob(i, j) - expect[(i, j)].re).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_networks_have_unitary_logical_blocks() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = 2 * rng.random_range(1..5usize);
            let mut spec = CircuitSpec::new(n, Topology::RectangularMesh);
            for k in 0..n {
                for j in 0..spec.slots_in_layer(k) {
                    spec.couplers.push(CouplerParams::new(
                        k,
                        j,
                        rng.random_range(0.0..FRAC_PI_2),
                        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                    ));
                }
            }
            let net = compose_network(&spec, &spec.space().unwrap()).unwrap();
            assert!(net.logical.unitarity_deviation() < 1e-10);
            assert!(net.padded.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn insufficient_padding_is_reported() {
        let spec = CircuitSpec::new(4, Topology::RectangularMesh);
        let space = ModeSpace::new(4, 3).unwrap();
        assert!(matches!(
            compose_network(&spec, &space),
            Err(Error::InsufficientPadding { .. })
        ));
    }
}
