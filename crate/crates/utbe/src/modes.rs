//! The polarization ⊗ time-bin mode space.
//!
//! A photon occupies one of two polarizations (`H`, `V`) in one of a train of
//! ultrafast time bins. Modes are flattened interleaved, one bin after the
//! other:
//!
//! ```text
//! flat index:  0       1       2       3       4       5    ...
//! mode:       (H,t0)  (V,t0)  (H,t1)  (V,t1)  (H,t2)  (V,t2) ...
//! ```
//!
//! All matrices in this crate use this ordering. The birefringent shift maps
//! bin `j` to `j+1` for the `V` component, so a network register needs spare
//! bins beyond the logical ones; [`ModeSpace`] carries that padding.

use crate::error::{Error, Result};
use crate::matrix::{StateVector, C64};

pub const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Photon polarization; `H` occupies the even flat offset of a bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn offset(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// A single (polarization, time-bin) mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub pol: Polarization,
    pub bin: usize,
}

impl ModeIndex {
    pub fn new(pol: Polarization, bin: usize) -> Self {
        Self { pol, bin }
    }

    /// Interleaved flat index `2*bin + offset(pol)`.
    pub fn flat_index(self) -> usize {
        2 * self.bin + self.pol.offset()
    }

    /// Inverse of [`ModeIndex::flat_index`].
    pub fn unflatten(flat: usize) -> Self {
        let pol = if flat.is_multiple_of(2) {
            Polarization::H
        } else {
            Polarization::V
        };
        Self { pol, bin: flat / 2 }
    }
}

/// Logical encoding dimension plus register padding.
///
/// `n_logical` is the even circuit dimension N; `n_bins_padded` is the total
/// number of register bins, sized so every birefringent shift in a network
/// stays exactly unitary: `2 * n_bins_padded >= n_logical + 2 * layers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeSpace {
    n_logical: usize,
    n_bins_padded: usize,
}

impl ModeSpace {
    pub fn new(n_logical: usize, n_bins_padded: usize) -> Result<Self> {
        if n_logical < 2 || !n_logical.is_multiple_of(2) {
            return Err(Error::OddDimension { n: n_logical });
        }
        if 2 * n_bins_padded < n_logical {
            return Err(Error::InsufficientPadding {
                needed: n_logical / 2,
                available: n_bins_padded,
            });
        }
        Ok(Self {
            n_logical,
            n_bins_padded,
        })
    }

    /// Space sized for a network of `layers` birefringent shifts on top of
    /// `n_logical` modes.
    pub fn for_network(n_logical: usize, layers: usize) -> Result<Self> {
        Self::new(n_logical, n_logical / 2 + layers)
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn n_bins_padded(&self) -> usize {
        self.n_bins_padded
    }

    /// Full padded register dimension (`2 * n_bins_padded`).
    pub fn padded_dim(&self) -> usize {
        2 * self.n_bins_padded
    }
}

/// The four input-state families used to characterize N=4 gates.
///
/// `Computational` is defined for any N. The other three are the N=4
/// superposition families: `Xi` takes polarization superpositions per bin,
/// `Zeta` takes bin superpositions per polarization, and `Dft` superposes
/// both at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    Computational,
    Dft,
    Xi,
    Zeta,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 4] = [
        BasisFamily::Computational,
        BasisFamily::Dft,
        BasisFamily::Xi,
        BasisFamily::Zeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::Computational => "computational",
            BasisFamily::Dft => "dft",
            BasisFamily::Xi => "xi",
            BasisFamily::Zeta => "zeta",
        }
    }
}

/// The `i`-th state of a basis family on the logical space.
///
/// Sign ordering within each family puts the `+` superposition first:
/// `xi_0 = (|H> + |V>) ⊗ |t0> / sqrt(2)`, `xi_1 = (|H> - |V>) ⊗ |t0> / sqrt(2)`,
/// then the same pair on `t1`; `zeta` orders `H` before `V`; `dft` orders
/// polarization-major: `(+,+), (+,-), (-,+), (-,-)`.
pub fn basis_state(family: BasisFamily, i: usize, space: &ModeSpace) -> Result<StateVector> {
    let n = space.n_logical();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    match family {
        BasisFamily::Computational => StateVector::basis(n, i),
        _ if n != 4 => Err(Error::UnsupportedBasis {
            family: family.name(),
            n,
        }),
        BasisFamily::Xi => {
            // (|H> ± |V>) ⊗ |t_b> / sqrt(2), b = i / 2, sign from i % 2
            let b = i / 2;
            let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut a = vec![C64::ZERO; 4];
            a[2 * b] = C64::new(SQRT_HALF, 0.0);
            a[2 * b + 1] = C64::new(sign * SQRT_HALF, 0.0);
            Ok(StateVector::new(a))
        }
        BasisFamily::Zeta => {
            // |pol> ⊗ (|t0> ± |t1>) / sqrt(2), pol = i / 2, sign from i % 2
            let p = i / 2;
            let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut a = vec![C64::ZERO; 4];
            a[p] = C64::new(SQRT_HALF, 0.0);
            a[2 + p] = C64::new(sign * SQRT_HALF, 0.0);
            Ok(StateVector::new(a))
        }
        BasisFamily::Dft => {
            // (|H> ± |V>) ⊗ (|t0> ± |t1>) / 2, polarization sign major
            let sp = if i / 2 == 0 { 1.0 } else { -1.0 };
            let sb = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            let a = vec![
                C64::new(0.5, 0.0),
                C64::new(0.5 * sp, 0.0),
                C64::new(0.5 * sb, 0.0),
                C64::new(0.5 * sp * sb, 0.0),
            ];
            Ok(StateVector::new(a))
        }
    }
}

/// All N states of a family, as columns of an N x N matrix.
pub fn basis_matrix(
    family: BasisFamily,
    space: &ModeSpace,
) -> Result<crate::matrix::ComplexMatrix> {
    let n = space.n_logical();
    let mut m = crate::matrix::ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let v = basis_state(family, j, space)?;
        for i in 0..n {
            m[(i, j)] = v.amplitudes()[i];
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    #[test]
    fn flat_index_matches_listing_order() {
        assert_eq!(ModeIndex::new(Polarization::H, 0).flat_index(), 0);
        assert_eq!(ModeIndex::new(Polarization::V, 0).flat_index(), 1);
        assert_eq!(ModeIndex::new(Polarization::V, 3).flat_index(), 7);
    }

    #[test]
    fn flat_index_round_trips_exhaustively() {
        for flat in 0..64 {
            let m = ModeIndex::unflatten(flat);
            assert_eq!(m.flat_index(), flat);
        }
        for bin in 0..32 {
            for pol in [Polarization::H, Polarization::V] {
                let m = ModeIndex::new(pol, bin);
                assert_eq!(ModeIndex::unflatten(m.flat_index()), m);
            }
        }
    }

    #[test]
    fn computational_basis_is_standard() {
        let space = ModeSpace::new(4, 2).unwrap();
        let v = basis_state(BasisFamily::Computational, 0, &space).unwrap();
        assert_eq!(v.amplitudes()[0], C64::ONE);
        assert!(v.amplitudes()[1..].iter().all(|z| *z == C64::ZERO));
    }

    #[test]
    fn xi_zero_matches_plus_superposition() {
        let space = ModeSpace::new(4, 2).unwrap();
        let v = basis_state(BasisFamily::Xi, 0, &space).unwrap();
        assert!((v.amplitudes()[0].re - SQRT_HALF).abs() < 1e-15);
        assert!((v.amplitudes()[1].re - SQRT_HALF).abs() < 1e-15);
        assert_eq!(v.amplitudes()[2], C64::ZERO);
    }

    #[test]
    fn dft_states_have_uniform_magnitude() {
        let space = ModeSpace::new(4, 2).unwrap();
        for i in 0..4 {
            let v = basis_state(BasisFamily::Dft, i, &space).unwrap();
            for z in v.amplitudes() {
                assert!((z.norm() - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn all_families_are_orthonormal() {
        let space = ModeSpace::new(4, 2).unwrap();
        for family in BasisFamily::ALL {
            let b = basis_matrix(family, &space).unwrap();
            let gram = b.adjoint().mul(&b);
            assert!(
                gram.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12,
                "{}",
                family.name()
            );
            for j in 0..4 {
                assert!((b.column(j).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn superposition_families_reject_other_dimensions() {
        let space = ModeSpace::new(6, 3).unwrap();
        assert!(matches!(
            basis_state(BasisFamily::Dft, 0, &space),
            Err(Error::UnsupportedBasis { .. })
        ));
    }

    #[test]
    fn out_of_range_index_rejected() {
        let space = ModeSpace::new(4, 2).unwrap();
        assert!(basis_state(BasisFamily::Computational, 4, &space).is_err());
    }
}
