//! Polyharmonic-spline graph basis function kernel `(εI + L)^{-s}`.

use serde::{Deserialize, Serialize};

use crate::dense::DenseSymMatrix;
use crate::error::{Error, Result};
use crate::numerics::{sym_eigen, EigenDecomposition};

const MIN_SHIFT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub epsilon: f64,
    pub s: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            s: 2.0,
        }
    }
}

impl KernelParams {
    pub fn new(epsilon: f64, s: f64) -> Result<Self> {
        let p = Self { epsilon, s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "exponent s must be positive, got {}",
                self.s
            )));
        }
        Ok(())
    }

    /// Spectral profile `(ε + λ)^{-s}`.
    #[inline]
    pub fn profile(&self, lambda: f64) -> f64 {
        (self.epsilon + lambda).powf(-self.s)
    }
}

/// `K = Σ_k (ε + λ_k)^{-s} u_k u_kᵀ` for the Laplacian `l`.
pub fn gbf_kernel(l: &DenseSymMatrix, p: &KernelParams) -> Result<DenseSymMatrix> {
    p.validate()?;
    let eig = sym_eigen(l)?;
    gbf_kernel_from_eigen(&eig, p)
}

pub fn gbf_kernel_from_eigen(eig: &EigenDecomposition, p: &KernelParams) -> Result<DenseSymMatrix> {
    p.validate()?;
    if let Some(&lambda_min) = eig.values().first() {
        let shift = p.epsilon + lambda_min;
        if shift.is_nan() || shift <= MIN_SHIFT {
            return Err(Error::NonPositiveShift { shift });
        }
    }
    Ok(eig.map_spectrum(|lambda| p.profile(lambda)))
}
