//! Single-mode Gaussian states in the convention where the covariance
//! diagonal is twice the quadrature variance (vacuum = identity).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NU_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
}

impl CovarianceMatrix {
    pub const IDENTITY: Self = Self { s11: 1.0, s12: 0.0, s22: 1.0 };

    pub fn new(s11: f64, s12: f64, s22: f64) -> Self {
        Self { s11, s12, s22 }
    }

    pub fn thermal(n: f64) -> Self {
        Self { s11: 2.0 * n + 1.0, s12: 0.0, s22: 2.0 * n + 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.s11 * self.s22 - self.s12 * self.s12
    }

    /// R σ Rᵀ for the phase-space rotation by angle `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            s11: c * c * self.s11 - 2.0 * c * s * self.s12 + s * s * self.s22,
            s12: c * s * (self.s11 - self.s22) + (c * c - s * s) * self.s12,
            s22: s * s * self.s11 + 2.0 * c * s * self.s12 + c * c * self.s22,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.s11 - other.s11).abs().max((self.s12 - other.s12).abs()).max((self.s22 - other.s22).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub cov: CovarianceMatrix,
}

impl GaussianState {
    pub fn centered(cov: CovarianceMatrix) -> Self {
        Self { mean_q: 0.0, mean_p: 0.0, cov }
    }
}

/// ν = √det σ, clamped to 1 inside a 1e−9 band below 1.
pub fn symplectic_eigenvalue(cov: &CovarianceMatrix) -> Result<f64> {
    let det = cov.det();
    if det < 1.0 - NU_BAND || !det.is_finite() {
        return Err(Error::UnphysicalCovariance { det });
    }
    Ok(det.max(1.0).sqrt())
}

/// Von Neumann entropy (nats) of a single-mode Gaussian state with
/// symplectic eigenvalue ν.
pub fn gaussian_entropy(nu: f64) -> Result<f64> {
    if nu < 1.0 - NU_BAND || nu.is_nan() {
        return Err(Error::UnphysicalNu { nu });
    }
    Ok(entropy_from_occupation(0.5 * (nu.max(1.0) - 1.0)))
}

/// Thermal-state entropy (m+1)log(m+1) − m log m at mean occupation m = (ν−1)/2.
pub fn entropy_from_occupation(m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    (m + 1.0) * m.ln_1p() - m * m.ln()
}

/// ⟨a†a⟩ from covariance and first moments.
pub fn occupation_from_cov(state: &GaussianState) -> f64 {
    0.25 * (state.cov.s11 + state.cov.s22) + 0.5 * (state.mean_q * state.mean_q + state.mean_p * state.mean_p) - 0.5
}

/// Covariance of the squeezed vacuum S(r e^{iθ})|0⟩.
pub fn squeezed_vacuum(r: f64, theta: f64) -> CovarianceMatrix {
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    CovarianceMatrix { s11: ch - theta.cos() * sh, s12: -theta.sin() * sh, s22: ch + theta.cos() * sh }
}
