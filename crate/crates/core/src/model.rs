//! Parameters of the system–oscillator–continuum model and its instantaneous
//! normal-mode decomposition.
//!
//! The system mode `a` (frequency ω(t)) couples to the reaction-coordinate
//! oscillator `d` (frequency ω0) with strength κ. Diagonalizing the 2×2
//! quadratic form gives normal modes `c = Y·(a, d)` with frequencies ω1 ≥ ω2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static model parameters. Units are ħ = k_B = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Zero-point offset of F#; kept at 0.
    #[serde(default)]
    pub f_sharp_inf: f64,
}

impl ModelParams {
    pub fn new(omega0: f64, kappa: f64, gamma: f64, beta: f64) -> Result<Self> {
        let p = Self { omega0, kappa, gamma, beta, f_sharp_inf: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidParameter(format!("omega0 = {} must be > 0", self.omega0)));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} must be >= 0", self.gamma)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {} must be > 0", self.beta)));
        }
        if !(self.kappa >= 0.0 && self.kappa < self.omega0) {
            return Err(Error::InvalidParameter(format!("kappa = {} must satisfy 0 <= kappa < omega0", self.kappa)));
        }
        if self.f_sharp_inf != 0.0 {
            return Err(Error::InvalidParameter("f_sharp_inf is fixed to 0".into()));
        }
        Ok(())
    }

    /// Normal-mode decomposition of the undriven Hamiltonian.
    pub fn static_mode(&self) -> DressedMode {
        normal_mode(self.omega0, self.omega0, self.kappa)
    }

    /// Same parameters at a different inverse temperature.
    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..*self }
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self { kappa, ..*self }
    }
}

/// Frequency modulation ω(t) = ω0 + λ e^{−ηt} sin(Ωt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivingParams {
    pub lambda: f64,
    /// Modulation frequency Ω.
    #[serde(alias = "Omega")]
    pub omega: f64,
    pub eta: f64,
}

impl DrivingParams {
    pub const NONE: Self = Self { lambda: 0.0, omega: 0.0, eta: 0.0 };

    pub fn new(lambda: f64, omega: f64, eta: f64) -> Self {
        Self { lambda, omega, eta }
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        if !(self.lambda >= 0.0 && self.omega >= 0.0 && self.eta >= 0.0) {
            return Err(Error::InvalidParameter("driving parameters lambda, Omega, eta must be >= 0".into()));
        }
        if !(self.lambda < p.omega0 - p.kappa) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be < omega0 - kappa = {}",
                self.lambda,
                p.omega0 - p.kappa
            )));
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        self.lambda == 0.0 || self.omega == 0.0
    }
}

/// Normal-mode frequencies and the weights of the system mode on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedMode {
    pub omega1: f64,
    pub omega2: f64,
    /// Y11²
    pub w1: f64,
    /// Y12²
    pub w2: f64,
}

/// The symmetric, orthogonal, traceless mixing matrix
/// `Y = [[y11, y12], [y12, −y11]]` with `y11, y12 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingMatrix {
    pub y11: f64,
    pub y12: f64,
}

impl MixingMatrix {
    pub fn y21(&self) -> f64 {
        self.y12
    }

    pub fn y22(&self) -> f64 {
        -self.y11
    }

    pub fn to_array(&self) -> [[f64; 2]; 2] {
        [[self.y11, self.y12], [self.y12, -self.y11]]
    }
}

pub fn drive_omega(t: f64, p: &ModelParams, d: &DrivingParams) -> f64 {
    p.omega0 + d.lambda * (-d.eta * t).exp() * (d.omega * t).sin()
}

/// dω/dt.
pub fn drive_omega_dot(t: f64, d: &DrivingParams) -> f64 {
    let (s, c) = (d.omega * t).sin_cos();
    d.lambda * (-d.eta * t).exp() * (d.omega * c - d.eta * s)
}

/// Cosine and sine of the mixing angle θ, with tan 2θ = 2κ/(ω − ω0).
/// Both are returned squared, computed without cancellation.
fn mixing_weights(omega_t: f64, omega0: f64, kappa: f64) -> (f64, f64) {
    let delta = omega_t - omega0;
    if kappa == 0.0 {
        return if delta < 0.0 { (0.0, 1.0) } else { (1.0, 0.0) };
    }
    let two_r = delta.hypot(2.0 * kappa);
    let k2 = 4.0 * kappa * kappa;
    if delta >= 0.0 {
        let w2 = 0.5 * k2 / (two_r * (two_r + delta));
        (1.0 - w2, w2)
    } else {
        let w1 = 0.5 * k2 / (two_r * (two_r - delta));
        (w1, 1.0 - w1)
    }
}

/// Unchecked normal-mode decomposition.
pub(crate) fn normal_mode(omega_t: f64, omega0: f64, kappa: f64) -> DressedMode {
    let half_sum = 0.5 * (omega_t + omega0);
    let r = (0.5 * (omega_t - omega0)).hypot(kappa);
    let (w1, w2) = mixing_weights(omega_t, omega0, kappa);
    DressedMode { omega1: half_sum + r, omega2: half_sum - r, w1, w2 }
}

pub fn dressed_mode(omega_t: f64, p: &ModelParams) -> Result<DressedMode> {
    let m = normal_mode(omega_t, p.omega0, p.kappa);
    if !(m.omega2 > 0.0) {
        return Err(Error::NonPositiveFrequency { omega2: m.omega2 });
    }
    Ok(m)
}

pub fn mixing_matrix(omega_t: f64, p: &ModelParams) -> Result<MixingMatrix> {
    let m = dressed_mode(omega_t, p)?;
    Ok(mixing_from_mode(&m))
}

pub(crate) fn mixing_from_mode(m: &DressedMode) -> MixingMatrix {
    MixingMatrix { y11: m.w1.sqrt(), y12: m.w2.sqrt() }
}

/// μ = Y11 Ẏ12 − Ẏ11 Y12, which equals the rate of the mixing angle,
/// dθ/dt = −κ ω̇ / ((ω − ω0)² + 4κ²).
pub fn mixing_rate_mu(t: f64, p: &ModelParams, d: &DrivingParams) -> f64 {
    if p.kappa == 0.0 {
        return 0.0;
    }
    let delta = drive_omega(t, p, d) - p.omega0;
    -p.kappa * drive_omega_dot(t, d) / (delta * delta + 4.0 * p.kappa * p.kappa)
}

/// Mean Bose occupation 1/(e^{βω} − 1); returns 0 once e^{βω} overflows.
pub fn bose_occupation(omega: f64, beta: f64) -> f64 {
    1.0 / (beta * omega).exp_m1()
}
