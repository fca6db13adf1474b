//! Truncated Hermite basis: the bookkeeping object shared by every operator
//! construction in the crate.
//!
//! A `HermiteBasis` fixes a dimension n, a spectral parameter lambda and a
//! degree cutoff; operators are then dense matrices over the graded index
//! list. Degrees are cut at |alpha| <= k_max, so the matrix dimension is
//! binom(k_max + n, n).

use crate::error::{FockError, Result};
use crate::indices::{enumerate_indices, rank_table, MultiIndex};
use crate::scalar::{fu, Scalar, C};
use ndarray::Array2;
use std::collections::HashMap;

/// Dense complex matrix in the graded Hermite basis.
pub type CMatrix<S> = Array2<C<S>>;

#[derive(Clone, Debug)]
pub struct HermiteBasis<S: Scalar> {
    pub n: usize,
    pub k_max: usize,
    pub lambda: S,
    indices: Vec<MultiIndex>,
    ranks: HashMap<Vec<usize>, usize>,
}

impl<S: Scalar> HermiteBasis<S> {
    pub fn new(n: usize, k_max: usize, lambda: S) -> Result<Self> {
        if n == 0 {
            return Err(FockError::InvalidParameter(
                "dimension n must be at least 1".into(),
            ));
        }
        if !lambda.is_finite() || lambda == S::zero() {
            return Err(FockError::InvalidParameter(
                "spectral parameter lambda must be finite and nonzero".into(),
            ));
        }
        let indices = enumerate_indices(n, k_max);
        let ranks = rank_table(&indices);
        Ok(Self {
            n,
            k_max,
            lambda,
            indices,
            ranks,
        })
    }

    /// Matrix dimension binom(k_max + n, n).
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, r: usize) -> &MultiIndex {
        &self.indices[r]
    }

    /// Rank of a multi-index in the graded order, if within the cutoff.
    pub fn rank(&self, alpha: &MultiIndex) -> Option<usize> {
        self.ranks.get(&alpha.alpha).copied()
    }

    /// Oscillator eigenvalue (2|alpha| + n)|lambda| for the r-th basis
    /// element.
    pub fn energy(&self, r: usize) -> S {
        let degree = fu::<S>(2 * self.indices[r].degree() + self.n);
        degree * self.lambda.abs()
    }

    /// Zero matrix of the basis dimension.
    pub fn zeros(&self) -> CMatrix<S> {
        Array2::from_elem((self.dim(), self.dim()), C::new(S::zero(), S::zero()))
    }

    /// Identity matrix of the basis dimension.
    pub fn eye(&self) -> CMatrix<S> {
        let mut m = self.zeros();
        for i in 0..self.dim() {
            m[(i, i)] = C::new(S::one(), S::zero());
        }
        m
    }

    /// Ranks of all indices of exact degree k (a contiguous block in the
    /// graded order).
    pub fn degree_block(&self, k: usize) -> std::ops::Range<usize> {
        let lo = self
            .indices
            .iter()
            .position(|a| a.degree() == k)
            .unwrap_or(self.dim());
        let hi = self
            .indices
            .iter()
            .rposition(|a| a.degree() == k)
            .map_or(lo, |p| p + 1);
        lo..hi
    }

    /// Checks that another basis has identical shape parameters; operator
    /// combinations across mismatched bases are refused.
    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.k_max != other.k_max || self.lambda != other.lambda {
            return Err(FockError::DimensionMismatch(format!(
                "basis mismatch: (n={}, k_max={}, lambda={}) vs (n={}, k_max={}, lambda={})",
                self.n, self.k_max, self.lambda, other.n, other.k_max, other.lambda
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(HermiteBasis::<f64>::new(0, 3, 1.0).is_err());
        assert!(HermiteBasis::<f64>::new(1, 3, 0.0).is_err());
        assert!(HermiteBasis::<f64>::new(1, 3, f64::NAN).is_err());
        assert!(HermiteBasis::<f64>::new(2, 3, -1.0).is_ok());
    }

    #[test]
    fn dimension_and_energy() {
        let b = HermiteBasis::<f64>::new(2, 3, -2.0).unwrap();
        assert_eq!(b.dim(), 10);
        // First index is (0,0): energy (0 + 2) * 2 = 4.
        assert_eq!(b.energy(0), 4.0);
        // Last index is (3,0): energy (6 + 2) * 2 = 16.
        assert_eq!(b.energy(b.dim() - 1), 16.0);
    }

    #[test]
    fn degree_blocks_partition() {
        let b = HermiteBasis::<f64>::new(2, 4, 1.0).unwrap();
        let mut total = 0;
        for k in 0..=4 {
            let blk = b.degree_block(k);
            assert_eq!(blk.len(), k + 1);
            for r in blk.clone() {
                assert_eq!(b.index(r).degree(), k);
            }
            total += blk.len();
        }
        assert_eq!(total, b.dim());
    }

    #[test]
    fn rank_lookup() {
        let b = HermiteBasis::<f64>::new(2, 3, 1.0).unwrap();
        for r in 0..b.dim() {
            assert_eq!(b.rank(b.index(r)), Some(r));
        }
        assert_eq!(b.rank(&MultiIndex::new(vec![4, 0])), None);
    }
}
