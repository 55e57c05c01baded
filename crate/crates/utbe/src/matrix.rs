//! Dense complex matrices and state vectors.
//!
//! Every transformation in this crate is carried by [`ComplexMatrix`], a plain
//! row-major `Vec<Complex64>` store. Circuit dimensions stay small (at most a
//! few hundred flat modes), so naive O(n^3) products are more than fast enough
//! and keep the numerics easy to audit.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Rectangular complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows given as slices; all rows must share a length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// 0/1 matrix of the permutation sending input `j` to output `sigma[j]`.
    pub fn permutation(sigma: &[usize]) -> Self {
        let n = sigma.len();
        let mut m = Self::zeros(n, n);
        for (j, &i) in sigma.iter().enumerate() {
            m[(i, j)] = C64::ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = vec![C64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = C64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v.amplitudes()[j];
            }
            out[i] = acc;
        }
        StateVector::new(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn column(&self, j: usize) -> StateVector {
        StateVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `other` after aligning global phase on the
    /// largest entry of `other`. Unobservable phases never count as error.
    pub fn max_abs_diff_up_to_phase(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let (mut best, mut idx) = (0.0f64, 0usize);
        for (k, b) in other.data.iter().enumerate() {
            if b.norm() > best {
                best = b.norm();
                idx = k;
            }
        }
        if best == 0.0 {
            return self.max_abs_diff(other);
        }
        let phase = self.data[idx] / other.data[idx];
        let phase = if phase.norm() == 0.0 {
            C64::ONE
        } else {
            phase / phase.norm()
        };
        self.max_abs_diff(&other.scale(phase))
    }

    /// Max-norm of `M†M - I`; also measures isometry error for tall matrices.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        gram.max_abs_diff(&ComplexMatrix::identity(self.cols))
    }

    /// True iff the max-norm of `M†M - I` is within `tol`.
    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.unitarity_deviation() <= tol)
    }

    /// Errors out unless `M†M = I` within `tol`. Accepts tall isometries.
    pub fn require_isometry(&self, tol: f64) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev <= tol {
            Ok(())
        } else {
            Err(Error::NonUnitary {
                deviation: dev,
                tol,
            })
        }
    }

    /// Haar-distributed random unitary (QR of a complex Ginibre sample via
    /// twice-iterated Gram-Schmidt, with the phase convention fixed on the
    /// diagonal).
    #[allow(clippy::needless_range_loop)] // two rows of `cols` indexed in parallel
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
        let mut cols: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        C64::new(
                            rng.sample(rand_distr::StandardNormal),
                            rng.sample(rand_distr::StandardNormal),
                        )
                    })
                    .collect()
            })
            .collect();
        for j in 0..n {
            for _pass in 0..2 {
                for k in 0..j {
                    let proj: C64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                    for i in 0..n {
                        let d = proj * cols[k][i];
                        cols[j][i] -= d;
                    }
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let diag = cols[j][j];
            // r_jj > 0 convention keeps the distribution Haar
            let phase = if diag.norm() > 0.0 {
                diag / diag.norm()
            } else {
                C64::ONE
            };
            for z in cols[j].iter_mut() {
                *z /= norm * phase;
            }
        }
        ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Complex amplitude vector. Sub-normalized states are allowed (loss); a
/// lossless state has norm 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    /// The `i`-th standard basis vector of dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        let mut amplitudes = vec![C64::ZERO; dim];
        amplitudes[i] = C64::ONE;
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Detection probabilities `|a_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn identity_is_unitary() {
        let id = ComplexMatrix::identity(4);
        assert!(id.is_unitary(1e-12).unwrap());
    }

    #[test]
    fn all_ones_is_not_unitary() {
        let m = ComplexMatrix::from_fn(2, 2, |_, _| C64::ONE);
        assert!(!m.is_unitary(1e-12).unwrap());
    }

    #[test]
    fn non_square_unitarity_check_errors() {
        let m = ComplexMatrix::zeros(3, 2);
        assert!(matches!(
            m.is_unitary(1e-12),
            Err(Error::NotSquare { rows: 3, cols: 2 })
        ));
    }

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for n in [2, 4, 7, 16] {
            let u = ComplexMatrix::haar_random(n, &mut rng);
            assert!(u.unitarity_deviation() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn phase_aligned_comparison_ignores_global_phase() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let u = ComplexMatrix::haar_random(4, &mut rng);
        let rotated = u.scale(C64::from_polar(1.0, 1.234));
        assert!(rotated.max_abs_diff_up_to_phase(&u) < 1e-14);
        assert!(rotated.max_abs_diff(&u) > 0.1);
    }

    #[test]
    fn permutation_matrix_routes_inputs() {
        let p = ComplexMatrix::permutation(&[2, 0, 1]);
        let v = StateVector::basis(3, 0).unwrap();
        let out = p.mul_vec(&v);
        assert_eq!(out.amplitudes()[2], C64::ONE);
    }
}
