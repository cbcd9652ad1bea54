//! Dense symmetric matrices at subdomain scale.

use crate::error::{Error, Result};

/// Absolute per-entry tolerance used by the symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Square symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.entries[i * order + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting asymmetric input.
    pub fn from_row_major(order: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::LengthMismatch {
                expected: order * order,
                found: entries.len(),
            });
        }
        let m = Self { order, entries };
        m.check_symmetric()?;
        Ok(m)
    }

    /// Row-major constructor that skips the symmetry check.
    pub(crate) fn from_row_major_unchecked(order: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), order * order);
        Self { order, entries }
    }

    pub fn check_symmetric(&self) -> Result<()> {
        let n = self.order;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = self.entries[i * n + j];
                let b = self.entries[j * n + i];
                if !a.is_finite() || !b.is_finite() || (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.order + j] = value;
        self.entries[j * self.order + i] = value;
    }

    #[inline]
    pub(crate) fn add_diag(&mut self, i: usize, value: f64) {
        self.entries[i * self.order + i] += value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.entries
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        (0..self.order)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Principal submatrix on the given (local) indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> DenseSymMatrix {
        let k = idx.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in idx {
            let row = self.row(i);
            entries.extend(idx.iter().map(|&j| row[j]));
        }
        DenseSymMatrix { order: k, entries }
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> DenseSymMatrix {
        let mut m = self.clone();
        for i in 0..self.order {
            m.add_diag(i, shift);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseSymMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Plain matrix product; the result is symmetric only when the factors commute.
    pub fn matmul(&self, other: &DenseSymMatrix) -> DenseSymMatrix {
        let n = self.order;
        assert_eq!(n, other.order);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        DenseSymMatrix { order: n, entries: out }
    }

    /// Symmetrizes in place by averaging mirrored entries.
    pub(crate) fn symmetrize(&mut self) {
        let n = self.order;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i]);
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg;
            }
        }
    }
}
