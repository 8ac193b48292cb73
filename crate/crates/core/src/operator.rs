//! Dense exact matrices on the system space.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{self, ComplexRational};

/// A `dimension × dimension` matrix of exact complex rationals, basis ordered by
/// increasing energy. Stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SystemOperator {
    dim: usize,
    entries: Vec<ComplexRational>,
}

impl SystemOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![exact::czero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.entries[i * dim + i] = exact::cone();
        }
        out
    }

    /// The matrix unit `|row⟩⟨col|`.
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut out = Self::zeros(dim);
        out.entries[row * dim + col] = exact::cone();
        out
    }

    pub fn from_rows(rows: Vec<Vec<ComplexRational>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &ComplexRational {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: ComplexRational) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(exact::is_czero)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul(other))
    }

    /// Matrix product. Panics on dimension mismatch; use [`Self::try_mul`] for checked input.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "system dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        // most operands are partial isometries with a handful of nonzero entries
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if exact::is_czero(a) {
                    continue;
                }
                for j in 0..d {
                    let b = &other.entries[k * d + j];
                    if exact::is_czero(b) {
                        continue;
                    }
                    out.entries[i * d + j] += a * b;
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.dim, other.dim, "system dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if !exact::is_czero(b) {
                *a += b;
            }
        }
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, scale: &ComplexRational, other: &Self) {
        assert_eq!(self.dim, other.dim, "system dimension mismatch");
        if exact::is_czero(scale) {
            return;
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if !exact::is_czero(b) {
                *a += scale * b;
            }
        }
    }

    pub fn scale(&self, factor: &ComplexRational) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&exact::cint(-1, 0), other);
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = exact::conj(&self.entries[i * d + j]);
            }
        }
        out
    }

    pub fn trace(&self) -> ComplexRational {
        (0..self.dim).fold(ComplexRational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// `M·v` for an exact column vector.
    pub fn apply(&self, v: &[ComplexRational]) -> Vec<ComplexRational> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                (0..d).fold(ComplexRational::zero(), |acc, j| {
                    let a = &self.entries[i * d + j];
                    if exact::is_czero(a) || exact::is_czero(&v[j]) {
                        acc
                    } else {
                        acc + a * &v[j]
                    }
                })
            })
            .collect()
    }

    /// `⟨ψ|M|φ⟩`.
    pub fn sandwich(&self, bra: &[ComplexRational], ket: &[ComplexRational]) -> ComplexRational {
        self.apply(ket)
            .iter()
            .zip(bra)
            .fold(ComplexRational::zero(), |acc, (mv, b)| acc + exact::conj(b) * mv)
    }

    pub fn to_complex64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| exact::to_complex64(self.get(i, j)))
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| exact::format_complex(self.get(i, j))).collect())
            .collect()
    }
}

impl fmt::Debug for SystemOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cint;

    #[test]
    fn product_of_units_follows_index_contraction() {
        let a = SystemOperator::unit(3, 2, 1);
        let b = SystemOperator::unit(3, 1, 0);
        assert_eq!(a.mul(&b), SystemOperator::unit(3, 2, 0));
        assert!(b.mul(&a).is_zero());
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let mut m = SystemOperator::zeros(2);
        m.set(0, 1, cint(1, 2));
        let adj = m.adjoint();
        assert_eq!(adj.get(1, 0), &cint(1, -2));
        assert_eq!(adj.adjoint(), m);
    }

    #[test]
    fn checked_product_rejects_mismatched_dimensions() {
        let err = SystemOperator::identity(2)
            .try_mul(&SystemOperator::identity(3))
            .unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }
}
