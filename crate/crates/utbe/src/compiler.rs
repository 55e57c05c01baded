//! Compiling target transformations into coupler parameters.
//!
//! [`mesh_decompose`] factors an arbitrary N x N unitary into the rectangular
//! nearest-neighbour mesh by Givens-style nulling: sweeping anti-diagonals,
//! alternately cancelling matrix elements with couplers multiplied from the
//! input side and from the output side, then commuting the residual diagonal
//! phases out through the output-side couplers. [`reconstruct`] is the exact
//! inverse route and doubles as the reference the simulator scores against.
//!
//! [`compile_permutation`] avoids general decomposition entirely: an odd-even
//! transposition sort yields switched couplers (`theta` either 0 or pi/2)
//! only, and [`galton_board`] builds the fixed triangular walk circuit.

use num_complex::Complex64;

use crate::elements::{CircuitSpec, CouplerParams, GlobalRotation, Topology, FRAC_PI_2};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

const PI: f64 = std::f64::consts::PI;

/// Wraps an angle into `(-pi, pi]`.
fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// A coupler factor at adjacent flat modes `(pair, pair+1)`.
#[derive(Debug, Clone, Copy)]
struct Factor {
    pair: usize,
    theta: f64,
    phi: f64,
}

fn apply_from_right_inverse(v: &mut ComplexMatrix, f: &Factor) {
    // V <- V · T†(pair): mixes columns (pair, pair+1)
    let (s, c) = f.theta.sin_cos();
    let e = Complex64::from_polar(1.0, -f.phi);
    let n = v.rows();
    for i in 0..n {
        let a = v[(i, f.pair)];
        let b = v[(i, f.pair + 1)];
        v[(i, f.pair)] = e * c * a - s * b;
        v[(i, f.pair + 1)] = e * s * a + c * b;
    }
}

fn apply_from_left(v: &mut ComplexMatrix, f: &Factor) {
    // V <- T(pair) · V: mixes rows (pair, pair+1)
    let (s, c) = f.theta.sin_cos();
    let e = Complex64::from_polar(1.0, f.phi);
    let n = v.cols();
    for j in 0..n {
        let a = v[(f.pair, j)];
        let b = v[(f.pair + 1, j)];
        v[(f.pair, j)] = e * c * a - s * b;
        v[(f.pair + 1, j)] = e * s * a + c * b;
    }
}

const NULL_EPS: f64 = 1e-14;

/// Decomposes a unitary into the rectangular mesh.
///
/// Returns a spec with exactly `N(N-1)/2` couplers (angles in `[0, pi/2]`,
/// phases in `(-pi, pi]`) plus an output phase layer, such that
/// [`reconstruct`] reproduces the input up to global phase within 1e-9.
pub fn mesh_decompose(u: &ComplexMatrix) -> Result<CircuitSpec> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let n = u.rows();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddDimension { n });
    }
    let dev = u.unitarity_deviation();
    if dev > 1e-10 {
        return Err(Error::NonUnitary {
            deviation: dev,
            tol: 1e-10,
        });
    }

    let mut v = u.clone();
    let mut left: Vec<Factor> = Vec::new();
    let mut right: Vec<Factor> = Vec::new();

    for diag in 1..n {
        if diag % 2 == 1 {
            // null V[n-1-k, diag-1-k] from the input side, using column pair+1
            for k in 0..diag {
                let (r, c) = (n - 1 - k, diag - 1 - k);
                let pair = c;
                let lo = v[(r, c)];
                let hi = v[(r, c + 1)];
                let f = if lo.norm() < NULL_EPS {
                    Factor {
                        pair,
                        theta: 0.0,
                        phi: 0.0,
                    }
                } else if hi.norm() < NULL_EPS {
                    Factor {
                        pair,
                        theta: FRAC_PI_2,
                        phi: 0.0,
                    }
                } else {
                    Factor {
                        pair,
                        theta: lo.norm().atan2(hi.norm()),
                        phi: wrap_phase((lo / hi).arg()),
                    }
                };
                apply_from_right_inverse(&mut v, &f);
                right.push(f);
            }
        } else {
            // null V[n-diag-1+k, k-1] from the output side, using row pair-1
            for k in 1..=diag {
                let (r, c) = (n - 1 - diag + k, k - 1);
                let pair = r - 1;
                let lo = v[(r, c)];
                let hi = v[(r - 1, c)];
                let f = if lo.norm() < NULL_EPS {
                    Factor {
                        pair,
                        theta: 0.0,
                        phi: 0.0,
                    }
                } else if hi.norm() < NULL_EPS {
                    Factor {
                        pair,
                        theta: FRAC_PI_2,
                        phi: 0.0,
                    }
                } else {
                    Factor {
                        pair,
                        theta: lo.norm().atan2(hi.norm()),
                        phi: wrap_phase((-lo / hi).arg()),
                    }
                };
                apply_from_left(&mut v, &f);
                left.push(f);
            }
        }
    }

    // Now: left_q ... left_1 · U · right_1† ... right_r† = D, so
    // U = left_1† ... left_q† · D · right_r ... right_1.
    // Push each left† through D: T†(theta, phi) · D = D' · T(theta, phi').
    let mut diag: Vec<C64> = (0..n).map(|i| v[(i, i)]).collect();
    let mut mid_rev: Vec<Factor> = Vec::new();
    for f in left.iter().rev() {
        let dp = diag[f.pair];
        let dq = diag[f.pair + 1];
        let (s, c) = f.theta.sin_cos();
        let e_neg = Complex64::from_polar(1.0, -f.phi);
        if s.abs() < NULL_EPS {
            diag[f.pair] = dp * e_neg;
            mid_rev.push(Factor {
                pair: f.pair,
                theta: 0.0,
                phi: 0.0,
            });
        } else if c.abs() < NULL_EPS {
            diag[f.pair] = -e_neg * dq;
            diag[f.pair + 1] = -dp;
            mid_rev.push(Factor {
                pair: f.pair,
                theta: f.theta,
                phi: 0.0,
            });
        } else {
            let phi_new = wrap_phase((-dp / dq).arg());
            diag[f.pair] = -e_neg * dq;
            mid_rev.push(Factor {
                pair: f.pair,
                theta: f.theta,
                phi: phi_new,
            });
        }
    }

    // Full factor sequence, leftmost (output side) first.
    let mut seq: Vec<Factor> = mid_rev.into_iter().rev().collect();
    seq.extend(right.into_iter().rev());

    // Greedy layer packing from the input side; pair parity fixes layer parity.
    let mut next_free = vec![0usize; n];
    let mut couplers: Vec<CouplerParams> = Vec::new();
    for f in seq.iter().rev() {
        let mut layer = next_free[f.pair].max(next_free[f.pair + 1]);
        if layer % 2 != f.pair % 2 {
            layer += 1;
        }
        debug_assert!(layer < n, "factor does not fit the rectangular grid");
        let slot = if layer.is_multiple_of(2) {
            f.pair / 2
        } else {
            (f.pair - 1) / 2
        };
        couplers.push(CouplerParams::new(layer, slot, f.theta, wrap_phase(f.phi)));
        next_free[f.pair] = layer + 1;
        next_free[f.pair + 1] = layer + 1;
    }
    couplers.sort_by_key(|c| (c.layer, c.slot));

    let spec = CircuitSpec {
        n_logical: n,
        topology: Topology::RectangularMesh,
        couplers,
        global_rotations: Vec::new(),
        output_phases: Some(diag.iter().map(|d| d.arg()).collect()),
    };
    spec.validate()?;
    Ok(spec)
}

fn rotation_layer(n: usize, angle: f64) -> ComplexMatrix {
    let (s, c) = angle.sin_cos();
    let mut m = ComplexMatrix::identity(n);
    for j in 0..n / 2 {
        m[(2 * j, 2 * j)] = C64::new(c, 0.0);
        m[(2 * j, 2 * j + 1)] = C64::new(-s, 0.0);
        m[(2 * j + 1, 2 * j)] = C64::new(s, 0.0);
        m[(2 * j + 1, 2 * j + 1)] = C64::new(c, 0.0);
    }
    m
}

/// The logical matrix a spec programs, built directly on the N flat modes.
///
/// For the rectangular mesh this is the N x N unitary (coupler blocks on
/// pairs `(2j, 2j+1)` in even layers and `(2j+1, 2j+2)` in odd ones, with
/// waveplate rotations and output phases applied in network order). For the
/// Galton board it is the (2·depth) x 2 isometry of the walk, computed by a
/// direct coin-and-shift recurrence.
pub fn reconstruct(spec: &CircuitSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    match spec.topology {
        Topology::RectangularMesh => {
            let n = spec.n_logical;
            let mut u = ComplexMatrix::identity(n);
            for k in 0..n {
                if k % 2 == 0 {
                    if let Some(r) = spec.global_rotations.iter().find(|r| r.position == k) {
                        u = rotation_layer(n, r.angle).mul(&u);
                    }
                }
                let mut layer = ComplexMatrix::identity(n);
                for c in spec.couplers.iter().filter(|c| c.layer == k) {
                    let pair = if k % 2 == 0 {
                        2 * c.slot
                    } else {
                        2 * c.slot + 1
                    };
                    let b = CouplerParams::block(c.theta, c.phi);
                    layer[(pair, pair)] = b[0][0];
                    layer[(pair, pair + 1)] = b[0][1];
                    layer[(pair + 1, pair)] = b[1][0];
                    layer[(pair + 1, pair + 1)] = b[1][1];
                }
                u = layer.mul(&u);
                if (k + 1) % 2 == 1 {
                    if let Some(r) = spec.global_rotations.iter().find(|r| r.position == k + 1) {
                        u = rotation_layer(n, r.angle).mul(&u);
                    }
                }
            }
            if let Some(r) = spec.global_rotations.iter().find(|r| r.position == n) {
                u = rotation_layer(n, r.angle).mul(&u);
            }
            if let Some(phases) = &spec.output_phases {
                for i in 0..n {
                    let ph = Complex64::from_polar(1.0, phases[i]);
                    for j in 0..n {
                        u[(i, j)] *= ph;
                    }
                }
            }
            Ok(u)
        }
        Topology::GaltonBoard => Ok(walk_columns(spec)),
    }
}

/// Walk output columns via the coin-and-shift recurrence: per layer, couple
/// `(H,V)` inside each pulsed bin, delay `V` one bin, then flip `H -> V`,
/// `V -> -H`. Outputs are `(V,t0), (H,t1), (V,t1), ..., (H,t_depth)`.
fn walk_columns(spec: &CircuitSpec) -> ComplexMatrix {
    let d = spec.depth();
    let bins = d + 2;
    let mut cols = Vec::with_capacity(2);
    for input in 0..2 {
        let mut h = vec![C64::ZERO; bins];
        let mut v = vec![C64::ZERO; bins];
        if input == 0 {
            h[0] = C64::ONE;
        } else {
            v[0] = C64::ONE;
        }
        for k in 0..d {
            for c in spec.couplers.iter().filter(|c| c.layer == k) {
                let b = CouplerParams::block(c.theta, c.phi);
                let (hb, vb) = (h[c.slot], v[c.slot]);
                h[c.slot] = b[0][0] * hb + b[0][1] * vb;
                v[c.slot] = b[1][0] * hb + b[1][1] * vb;
            }
            // crystal: V delayed one bin; waveplate: H -> V, V -> -H
            for b in (1..bins).rev() {
                v[b] = v[b - 1];
            }
            v[0] = C64::ZERO;
            for b in 0..bins {
                let (hb, vb) = (h[b], v[b]);
                h[b] = -vb;
                v[b] = hb;
            }
        }
        let mut col = Vec::with_capacity(2 * d);
        for flat in 1..=2 * d {
            let bin = flat / 2;
            col.push(if flat % 2 == 0 { h[bin] } else { v[bin] });
        }
        cols.push(col);
    }
    let mut m = ComplexMatrix::from_fn(2 * d, 2, |i, j| cols[j][i]);
    if let Some(phases) = &spec.output_phases {
        for i in 0..2 * d {
            let ph = num_complex::Complex64::from_polar(1.0, phases[i]);
            for j in 0..2 {
                m[(i, j)] *= ph;
            }
        }
    }
    m
}

/// Compiles a permutation into switched couplers via odd-even transposition
/// sort. Odd logical dimensions embed into the next even mesh, acting as the
/// identity on the extra mode.
pub fn compile_permutation(sigma: &[usize]) -> Result<CircuitSpec> {
    let n_in = sigma.len();
    if n_in < 1 {
        return Err(Error::InvalidPermutation {
            reason: "empty permutation".into(),
        });
    }
    let mut seen = vec![false; n_in];
    for &s in sigma {
        if s >= n_in || seen[s] {
            return Err(Error::InvalidPermutation {
                reason: format!("not a bijection on 0..{n_in}"),
            });
        }
        seen[s] = true;
    }
    let n = if n_in.is_multiple_of(2) {
        n_in
    } else {
        n_in + 1
    };
    // output position p must end holding input sigma^{-1}(p); sorting the
    // array e[pos] = sigma(pos) into ascending order realizes exactly that
    let mut e: Vec<usize> = (0..n)
        .map(|p| if p < n_in { sigma[p] } else { p })
        .collect();

    let mut spec = CircuitSpec::new(n, Topology::RectangularMesh);
    for layer in 0..n {
        let slots = spec.slots_in_layer(layer);
        for slot in 0..slots {
            let pair = if layer % 2 == 0 {
                2 * slot
            } else {
                2 * slot + 1
            };
            let theta = if e[pair] > e[pair + 1] {
                e.swap(pair, pair + 1);
                FRAC_PI_2
            } else {
                0.0
            };
            spec.couplers
                .push(CouplerParams::new(layer, slot, theta, 0.0));
        }
    }
    debug_assert!(e.windows(2).all(|w| w[0] < w[1]), "sort incomplete");
    Ok(spec)
}

/// The two-pulse N=4 gate whose detection probabilities are uniformly 1/4 in
/// the computational, DFT, xi and zeta input families.
///
/// Exactly two couplers carry coupling (`theta = pi/2` in both odd layers,
/// i.e. two control pulses); the remaining couplers are phase-only settings
/// (`theta = 0`, `phi = ±pi/2`, no pulse energy), and three uniform waveplates
/// complete the gate.
pub fn hadamard4_recipe() -> CircuitSpec {
    let q = FRAC_PI_2;
    CircuitSpec {
        n_logical: 4,
        topology: Topology::RectangularMesh,
        couplers: vec![
            CouplerParams::new(0, 0, 0.0, q),
            CouplerParams::new(0, 1, 0.0, q),
            CouplerParams::new(1, 0, q, 0.0),
            CouplerParams::new(2, 0, 0.0, -q),
            CouplerParams::new(2, 1, 0.0, q),
            CouplerParams::new(3, 0, q, 0.0),
        ],
        global_rotations: vec![
            GlobalRotation {
                position: 1,
                angle: -PI / 4.0,
            },
            GlobalRotation {
                position: 3,
                angle: PI / 4.0,
            },
            GlobalRotation {
                position: 4,
                angle: q,
            },
        ],
        output_phases: None,
    }
}

/// Fixed triangular walk circuit: layer `k` carries `k+1` couplers at the
/// given angle, `depth·(depth+1)/2` couplers total, spreading a bin-0 input
/// over `2·depth` output modes.
pub fn galton_board(depth: usize, theta: f64) -> Result<CircuitSpec> {
    if depth < 1 {
        return Err(Error::ZeroDepth);
    }
    let mut spec = CircuitSpec::new(2 * depth, Topology::GaltonBoard);
    for k in 0..depth {
        for j in 0..=k {
            spec.couplers.push(CouplerParams::new(k, j, theta, 0.0));
        }
    }
    Ok(spec)
}
