//! Threshold vectors `(1, ..., 1, q, 0, ..., 0)`.
//!
//! A K-dimensional threshold vector has `head` leading ones, then a
//! remainder `q` in `[0, 1)`, then zeros. Every optimal solution of the
//! constrained bidding LP takes this shape, and the elementwise minimum of
//! two same-dimension threshold vectors is again a threshold vector, so they
//! form a totally ordered family under `<=` componentwise.

use crate::{Error, Result};

/// Largest f64 strictly below 1.0, used to clamp remainders that round up.
pub(crate) const MAX_REMAINDER: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdVector {
    dim: usize,
    head: usize,
    remainder: f64,
}

impl ThresholdVector {
    /// Build `psi(head, remainder)` in dimension `dim`.
    ///
    /// `head == dim` forces `remainder == 0` (there is no boundary entry).
    pub fn new(dim: usize, head: usize, remainder: f64) -> Result<Self> {
        if head > dim {
            return Err(Error::InvalidParameter(format!(
                "threshold head {head} exceeds dimension {dim}"
            )));
        }
        if !(0.0..1.0).contains(&remainder) {
            return Err(Error::InvalidParameter(format!(
                "threshold remainder {remainder} not in [0, 1)"
            )));
        }
        if head == dim && remainder != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "head == dim forces remainder 0, got {remainder}"
            )));
        }
        Ok(Self {
            dim,
            head,
            remainder,
        })
    }

    /// All-ones vector `psi(dim, 0)`.
    pub fn ones(dim: usize) -> Self {
        Self {
            dim,
            head: dim,
            remainder: 0.0,
        }
    }

    /// All-zeros vector `psi(0, 0)`.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            head: 0,
            remainder: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    /// Component `i` (0-indexed): 1 before the head, the remainder at the
    /// head position, 0 after.
    pub fn component(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim);
        if i < self.head {
            1.0
        } else if i == self.head {
            self.remainder
        } else {
            0.0
        }
    }

    /// Expand to the dense `(1, ..., 1, q, 0, ..., 0)` form.
    pub fn expand(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.component(i)).collect()
    }

    /// Elementwise minimum, which is again a threshold vector.
    ///
    /// Same-dimension threshold vectors are totally ordered componentwise,
    /// and that order coincides with lexicographic order on `(head, q)`.
    pub fn min(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if (self.head, self.remainder) <= (other.head, other.remainder) {
            Ok(*self)
        } else {
            Ok(*other)
        }
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        (self.head, self.remainder) <= (other.head, other.remainder)
    }

    /// Weighted sum of components against `weights` (length `dim`).
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.dim);
        let mut sum: f64 = weights[..self.head].iter().sum();
        if self.head < self.dim {
            sum += self.remainder * weights[self.head];
        }
        sum
    }
}

/// `tv_min` over three vectors; a convenience for `min{x^R, x^B, psi(k, 0)}`.
pub fn min3(
    a: &ThresholdVector,
    b: &ThresholdVector,
    c: &ThresholdVector,
) -> Result<ThresholdVector> {
    a.min(b)?.min(c)
}
