//! Dense symmetric eigendecomposition and SPD solves.
//!
//! The eigensolver delegates to faer's self-adjoint decomposition. The
//! Cholesky factorization is implemented here so that kernels built from the
//! spectrum can be checked against an independent solve-based route.

use faer::{Mat, Side};

use crate::dense::DenseSymMatrix;
use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    // column-major, column k is the eigenvector for values[k]
    vectors: Vec<f64>,
    order: usize,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.order..(k + 1) * self.order]
    }

    /// `V f(Λ) Vᵀ`, the spectral function `f` applied to the decomposed matrix.
    pub fn map_spectrum<F: Fn(f64) -> f64>(&self, f: F) -> DenseSymMatrix {
        let n = self.order;
        if n == 0 {
            return DenseSymMatrix::zeros(0);
        }
        let v = faer::mat::from_column_major_slice(&self.vectors, n, n);
        let scaled = Mat::<f64>::from_fn(n, n, |i, k| v.read(i, k) * f(self.values[k]));
        let prod = &scaled * v.transpose();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            entries.extend((0..n).map(|j| prod.read(i, j)));
        }
        let mut out = DenseSymMatrix::from_row_major_unchecked(n, entries);
        out.symmetrize();
        out
    }

    /// Max-norm of `VᵀV - I`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.order;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = self.vector(a).iter().zip(self.vector(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eigen(m: &DenseSymMatrix) -> Result<EigenDecomposition> {
    m.check_symmetric()?;
    let n = m.order();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: Vec::new(),
            order: 0,
        });
    }
    let mat = Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j));
    let evd = mat.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();

    let mut perm: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|k| s.read(k)).collect();
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence(0));
    }
    perm.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));

    let values: Vec<f64> = perm.iter().map(|&k| raw[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &perm {
        vectors.extend((0..n).map(|i| u.read(i, k)));
    }
    if vectors.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::NoConvergence(0));
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        order: n,
    })
}

/// Lower-triangular Cholesky factor `M = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    order: usize,
    // row-major, upper triangle unused
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &DenseSymMatrix) -> Result<Self> {
        let n = m.order();
        let max_diag = (0..n).map(|i| m.get(i, i).abs()).fold(0.0_f64, f64::max);
        let tol = f64::EPSILON * n as f64 * max_diag.max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let d = m.get(j, j) - l[j * n..j * n + j].iter().map(|x| x * x).sum::<f64>();
            if d.is_nan() || d <= tol {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let pivot = d.sqrt();
            l[j * n + j] = pivot;
            for i in (j + 1)..n {
                let (upper, lower) = l.split_at_mut(i * n);
                let row_j = &upper[j * n..j * n + j];
                let row_i = &mut lower[..n];
                let dot: f64 = row_i[..j].iter().zip(row_j).map(|(a, b)| a * b).sum();
                row_i[j] = (m.get(i, j) - dot) / pivot;
            }
        }
        Ok(Self { order: n, lower: l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order;
        assert_eq!(b.len(), n);
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let row = &l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }
}

/// Solves `M x = b` for symmetric positive definite `M`.
pub fn spd_solve(m: &DenseSymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != m.order() {
        return Err(Error::LengthMismatch {
            expected: m.order(),
            found: b.len(),
        });
    }
    m.check_symmetric()?;
    Ok(Cholesky::factor(m)?.solve(b))
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
