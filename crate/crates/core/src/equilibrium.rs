//! Equilibrium thermostatics from the intrinsic Hamiltonian of mean force,
//! and the comparison quantities of the conventional mean-force approach.
//!
//! The reduced equilibrium state of the system is thermal in `a†a` with mean
//! occupation `m(β) = w1·n̄(ω1) + w2·n̄(ω2)`; every quantity here is a function
//! of that occupation. The dressed mode is held fixed while β varies.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian::entropy_from_occupation;
use crate::model::{bose_occupation, DressedMode, ModelParams};
use crate::numerics::quadrature::{integrate_tail, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub beta: f64,
    pub nu: f64,
    pub entropy: f64,
    pub free_energy_sharp: f64,
    pub partition_sharp: f64,
    pub internal_energy_sharp: f64,
    pub heat_capacity_sharp: f64,
    pub phi: f64,
    pub h_sharp_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarComparison {
    pub partition_star: f64,
    pub internal_energy_star: f64,
    pub heat_capacity_star: f64,
}

/// Mean occupation of the reduced equilibrium state.
pub fn eq_occupation(beta: f64, mode: &DressedMode) -> f64 {
    mode.w1 * bose_occupation(mode.omega1, beta) + mode.w2 * bose_occupation(mode.omega2, beta)
}

/// log of [`eq_occupation`], accurate when the occupation underflows.
pub fn log_eq_occupation(beta: f64, mode: &DressedMode) -> f64 {
    let ((wd, od), (wo, oo)) = if mode.w2 > 0.0 {
        ((mode.w2, mode.omega2), (mode.w1, mode.omega1))
    } else {
        ((mode.w1, mode.omega1), (mode.w2, mode.omega2))
    };
    let ld = -(-beta * od).exp_m1();
    let lo = -(-beta * oo).exp_m1();
    let ratio = (wo / wd) * (-beta * (oo - od)).exp() * ld / lo;
    wd.ln() - beta * od - ld.ln() + ratio.ln_1p()
}

pub fn eq_nu(beta: f64, mode: &DressedMode) -> f64 {
    2.0 * eq_occupation(beta, mode) + 1.0
}

pub fn eq_entropy(beta: f64, mode: &DressedMode) -> f64 {
    entropy_from_occupation(eq_occupation(beta, mode))
}

/// F#(β) = −∫_β^∞ S(α)/α² dα, so that F#(∞) = 0.
pub fn free_energy_sharp(beta: f64, mode: &DressedMode, q: &QuadratureSpec) -> Result<f64> {
    let est = integrate_tail(|alpha| eq_entropy(alpha, mode), beta, q)?;
    Ok(-est.value)
}

pub fn partition_sharp(beta: f64, mode: &DressedMode, q: &QuadratureSpec) -> Result<f64> {
    Ok((-beta * free_energy_sharp(beta, mode, q)?).exp())
}

pub fn internal_energy_sharp(beta: f64, mode: &DressedMode, q: &QuadratureSpec) -> Result<f64> {
    Ok(free_energy_sharp(beta, mode, q)? + eq_entropy(beta, mode) / beta)
}

/// C# = −β ∂S/∂β from the analytic derivative chain.
pub fn heat_capacity_sharp(beta: f64, mode: &DressedMode) -> f64 {
    let m = eq_occupation(beta, mode);
    if m <= 0.0 {
        return 0.0;
    }
    let ds_dm = m.ln_1p() - m.ln();
    let dm_dbeta: f64 = [(mode.w1, mode.omega1), (mode.w2, mode.omega2)]
        .iter()
        .map(|&(w, om)| {
            let n = bose_occupation(om, beta);
            w * om * n * (n + 1.0)
        })
        .sum();
    beta * ds_dm * dm_dbeta
}

/// Effective frequency φ and offset c0 with H# = φ a†a + c0.
pub fn phi_and_offset(beta: f64, mode: &DressedMode, q: &QuadratureSpec) -> Result<(f64, f64)> {
    Ok(phi_and_offset_with(beta, mode, free_energy_sharp(beta, mode, q)?))
}

/// [`phi_and_offset`] for a precomputed F#(β).
pub fn phi_and_offset_with(beta: f64, mode: &DressedMode, f_sharp: f64) -> (f64, f64) {
    let m = eq_occupation(beta, mode);
    let phi = (m.ln_1p() - log_eq_occupation(beta, mode)) / beta;
    (phi, f_sharp + m.ln_1p() / beta)
}

pub fn equilibrium_point(beta: f64, mode: &DressedMode, q: &QuadratureSpec) -> Result<EquilibriumPoint> {
    let f = free_energy_sharp(beta, mode, q)?;
    let s = eq_entropy(beta, mode);
    let (phi, c0) = phi_and_offset_with(beta, mode, f);
    Ok(EquilibriumPoint {
        beta,
        nu: eq_nu(beta, mode),
        entropy: s,
        free_energy_sharp: f,
        partition_sharp: (-beta * f).exp(),
        internal_energy_sharp: f + s / beta,
        heat_capacity_sharp: heat_capacity_sharp(beta, mode),
        phi,
        h_sharp_offset: c0,
    })
}

/// log(1 − e^{−x}).
fn log1m_exp(x: f64) -> f64 {
    (-(-x).exp_m1()).ln()
}

pub fn log_partition_star(beta: f64, p: &ModelParams) -> f64 {
    let m = p.static_mode();
    log1m_exp(beta * p.omega0) - log1m_exp(beta * m.omega1) - log1m_exp(beta * m.omega2)
}

pub fn star_quantities(beta: f64, p: &ModelParams) -> StarComparison {
    let m = p.static_mode();
    let terms = [(1.0, m.omega1), (1.0, m.omega2), (-1.0, p.omega0)];
    let (e, c) = terms.iter().fold((0.0, 0.0), |(e, c), &(sign, om)| {
        let n = bose_occupation(om, beta);
        (e + sign * om * n, c + sign * (beta * om).powi(2) * n * (n + 1.0))
    });
    StarComparison { partition_star: log_partition_star(beta, p).exp(), internal_energy_star: e, heat_capacity_star: c }
}
