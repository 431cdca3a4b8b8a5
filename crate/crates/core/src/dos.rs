//! Densities of states: numerical inversion of Z#(s), the closed-form
//! oscillator densities, and the second-order expansion of ϱ# in κ.
//!
//! Delta peaks are regularized into boxcars of width ϵ on [ε0, ε0 + ϵ], which
//! is what the factor (1 − e^{−ϵs})/(ϵs) produces under inversion.

use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DressedMode, ModelParams};
use crate::numerics::ilt::{boxcar_factor, complex_exp_m1, inverse_laplace, IltSpec};
use crate::numerics::quadrature::{integrate_half_line, QuadratureSpec};

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub epsilon: Vec<f64>,
    pub values: Vec<f64>,
    pub reg_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// Bare system oscillator.
    S,
    /// System plus reaction coordinate.
    SO,
    /// Conventional mean-force density ϱ*.
    Star,
}

/// One term `weight · δ^{(order)}(ε − center)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionTerm {
    pub center: f64,
    pub order: u8,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DistributionSeries {
    pub terms: Vec<DistributionTerm>,
}

impl DistributionSeries {
    /// ∫ ϱ(ε) e^{−βε} dε; a δ^{(k)} term at c contributes β^k e^{−βc}.
    pub fn laplace(&self, beta: f64) -> f64 {
        self.terms.iter().map(|t| t.weight * beta.powi(t.order as i32) * (-beta * t.center).exp()).sum()
    }
}

/// Uniform grid 0, h, 2h, … up to `eps_max`.
pub fn energy_grid(eps_max: f64, spacing: f64) -> Vec<f64> {
    let n = (eps_max / spacing).round() as usize;
    (0..=n).map(|k| k as f64 * spacing).collect()
}

fn validate_grid(grid: &[f64], reg_width: f64) -> Result<()> {
    if !(reg_width > 0.0) {
        return Err(Error::InvalidParameter("regularizer width must be > 0".into()));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("energy grid must be nonempty and strictly increasing".into()));
    }
    Ok(())
}

/// Occupation m(α) continued to complex α.
fn complex_occupation(alpha: C64, mode: &DressedMode) -> C64 {
    let term = |w: f64, om: f64| {
        let z = alpha * om;
        if w == 0.0 || z.re > 700.0 {
            C64::default()
        } else {
            w / complex_exp_m1(z)
        }
    };
    term(mode.w1, mode.omega1) + term(mode.w2, mode.omega2)
}

/// log m(α), continued from large Re α where m is dominated by the lower
/// mode, so that the logarithm follows the phase of e^{−αω} continuously.
fn complex_log_occupation(alpha: C64, mode: &DressedMode) -> C64 {
    let ((wd, od), (wo, oo)) = if mode.w2 > 0.0 {
        ((mode.w2, mode.omega2), (mode.w1, mode.omega1))
    } else {
        ((mode.w1, mode.omega1), (mode.w2, mode.omega2))
    };
    let ld = -complex_exp_m1(-alpha * od);
    let mut log_m = wd.ln() - alpha * od - ld.ln();
    if wo > 0.0 {
        let lo = -complex_exp_m1(-alpha * oo);
        let v = (-alpha * (oo - od)).exp() * ld / lo * (wo / wd);
        log_m += (v + 1.0).ln();
    }
    log_m
}

fn complex_entropy(alpha: C64, mode: &DressedMode) -> C64 {
    let m = complex_occupation(alpha, mode);
    if m.norm() < 1e-300 {
        return C64::default();
    }
    let one_plus = m + 1.0;
    let l1p = if m.norm() < 1e-8 { m - m * m * 0.5 } else { one_plus.ln() };
    one_plus * l1p - m * complex_log_occupation(alpha, mode)
}

/// Z#(s) = exp(s ∫_0^∞ S(s + x)/(s + x)² dx), the integral taken along the
/// horizontal ray from s; requires Re s > 0.
pub fn partition_sharp_complex(s: C64, mode: &DressedMode, q: &QuadratureSpec) -> Result<C64> {
    if !(s.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Z#(s) needs Re s > 0, got {s}")));
    }
    let scale = s.re.max(1.0 / mode.omega2);
    let est = integrate_half_line(
        |x: f64| {
            let a = s + x;
            complex_entropy(a, mode) / (a * a)
        },
        scale,
        q,
    )?;
    Ok((s * est.value).exp())
}

fn invert<F>(f: F, grid: &[f64], ilt: &IltSpec) -> Result<Vec<f64>>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let out = inverse_laplace(
        |s| {
            f(s).unwrap_or_else(|e| {
                failure.lock().expect("poisoned").get_or_insert(e);
                C64::new(f64::NAN, f64::NAN)
            })
        },
        grid,
        ilt,
    );
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    out
}

/// Regularized ϱ#_ϵ by numerical inversion of (1 − e^{−ϵs})/(ϵs)·Z#(s).
pub fn density_sharp(
    p: &ModelParams,
    grid: &[f64],
    reg_width: f64,
    ilt: &IltSpec,
    q: &QuadratureSpec,
) -> Result<DensityGrid> {
    validate_grid(grid, reg_width)?;
    let mode = p.static_mode();
    let values = invert(|s| Ok(boxcar_factor(s, reg_width) * partition_sharp_complex(s, &mode, q)?), grid, ilt)?;
    Ok(DensityGrid { epsilon: grid.to_vec(), values, reg_width })
}

/// Cumulative count N#(ε) from the inversion of Z#(s)/s.
pub fn cumulative_sharp(p: &ModelParams, grid: &[f64], ilt: &IltSpec, q: &QuadratureSpec) -> Result<Vec<f64>> {
    validate_grid(grid, 1.0)?;
    let mode = p.static_mode();
    invert(|s| Ok(partition_sharp_complex(s, &mode, q)? / s), grid, ilt)
}

/// Value at ε of a unit-mass boxcar on [c, c + ϵ], half-valued at interior
/// endpoints. At ε = 0, the edge of the spectrum, the right limit is used.
fn boxcar(eps: f64, center: f64, width: f64) -> f64 {
    let tol = 1e-9 * width;
    let (lo, hi) = (center, center + width);
    if eps < lo - tol || eps > hi + tol {
        0.0
    } else if ((eps - lo).abs() <= tol && eps.abs() > tol) || (eps - hi).abs() <= tol {
        0.5 / width
    } else {
        1.0 / width
    }
}

/// Lattice energies and weights of a closed-form density below `eps_max`.
pub fn closed_form_deltas(which: ClosedForm, p: &ModelParams, eps_max: f64) -> Vec<(f64, f64)> {
    let mode = p.static_mode();
    let so = |shift: f64, sign: f64| {
        let mut pts = Vec::new();
        let mut n = 0.0;
        while shift + n * mode.omega1 <= eps_max {
            let mut k = 0.0;
            while shift + n * mode.omega1 + k * mode.omega2 <= eps_max {
                pts.push((shift + n * mode.omega1 + k * mode.omega2, sign));
                k += 1.0;
            }
            n += 1.0;
        }
        pts
    };
    match which {
        ClosedForm::S => (0..).map(|n| n as f64 * p.omega0).take_while(|&e| e <= eps_max).map(|e| (e, 1.0)).collect(),
        ClosedForm::SO => so(0.0, 1.0),
        ClosedForm::Star => {
            let mut pts = so(0.0, 1.0);
            pts.extend(so(p.omega0, -1.0));
            pts
        }
    }
}

/// Exact regularized densities as boxcar sums.
pub fn density_closed_forms(which: ClosedForm, p: &ModelParams, grid: &[f64], reg_width: f64) -> Result<DensityGrid> {
    validate_grid(grid, reg_width)?;
    let eps_max = *grid.last().expect("validated");
    let deltas = closed_form_deltas(which, p, eps_max);
    let mut values = vec![0.0; grid.len()];
    let h = grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let start = grid[0];
    for (c, w) in deltas {
        let approx = if h.is_finite() { (((c - start) / h).floor().max(0.0) as usize).saturating_sub(1) } else { 0 };
        for (e, v) in grid.iter().zip(values.iter_mut()).skip(approx) {
            if *e > c + 2.0 * reg_width {
                break;
            }
            *v += w * boxcar(*e, c, reg_width);
        }
    }
    Ok(DensityGrid { epsilon: grid.to_vec(), values, reg_width })
}

/// ϱ# to second order in κ: δ(ε − nω0) + κ²[n(n+1)/4·δ″ + n/(2ω0)·δ′].
pub fn density_sharp_perturbative(p: &ModelParams, max_n: usize) -> DistributionSeries {
    let k2 = p.kappa * p.kappa;
    let mut terms = Vec::new();
    for n in 0..=max_n {
        let (c, nf) = (n as f64 * p.omega0, n as f64);
        terms.push(DistributionTerm { center: c, order: 0, weight: 1.0 });
        if n >= 1 {
            terms.push(DistributionTerm { center: c, order: 2, weight: k2 * nf * (nf + 1.0) / 4.0 });
            terms.push(DistributionTerm { center: c, order: 1, weight: k2 * nf / (2.0 * p.omega0) });
        }
    }
    DistributionSeries { terms }
}

/// ϱ_SO to second order in κ: (n+1)δ(ε − nω0) + κ² n(n+1)(n+2)/6·δ″.
pub fn density_so_perturbative(p: &ModelParams, max_n: usize) -> DistributionSeries {
    let k2 = p.kappa * p.kappa;
    let mut terms = Vec::new();
    for n in 0..=max_n {
        let (c, nf) = (n as f64 * p.omega0, n as f64);
        terms.push(DistributionTerm { center: c, order: 0, weight: nf + 1.0 });
        if n >= 1 {
            terms.push(DistributionTerm { center: c, order: 2, weight: k2 * nf * (nf + 1.0) * (nf + 2.0) / 6.0 });
        }
    }
    DistributionSeries { terms }
}

/// Trapezoidal ∫ ϱ(ε) e^{−βε} dε over the grid.
pub fn forward_laplace(d: &DensityGrid, beta: f64) -> f64 {
    d.epsilon
        .windows(2)
        .zip(d.values.windows(2))
        .map(|(e, v)| 0.5 * (e[1] - e[0]) * (v[0] * (-beta * e[0]).exp() + v[1] * (-beta * e[1]).exp()))
        .sum()
}

/// Centers of isolated peaks, each taken as the midpoint of its half-maximum
/// crossings. Only local maxima above `threshold` are reported.
pub fn peak_centers(d: &DensityGrid, threshold: f64) -> Vec<f64> {
    let (e, v) = (&d.epsilon, &d.values);
    let mut centers = Vec::new();
    let mut k = 1;
    while k + 1 < v.len() {
        if v[k] > threshold && v[k] >= v[k - 1] && v[k] > v[k + 1] {
            let half = 0.5 * v[k];
            let mut lo = k;
            while lo > 0 && v[lo - 1] > half {
                lo -= 1;
            }
            let mut hi = k;
            while hi + 1 < v.len() && v[hi + 1] > half {
                hi += 1;
            }
            let cross = |a: usize, b: usize| {
                let (va, vb) = (v[a], v[b]);
                if va == vb {
                    e[a]
                } else {
                    e[a] + (half - va) / (vb - va) * (e[b] - e[a])
                }
            };
            let left = if lo > 0 { cross(lo - 1, lo) } else { e[0] };
            let right = if hi + 1 < v.len() { cross(hi, hi + 1) } else { e[hi] };
            centers.push(0.5 * (left + right));
            k = hi + 1;
        } else {
            k += 1;
        }
    }
    centers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{log_partition_star, partition_sharp};
    use crate::numerics::IltMethod;

    fn p(kappa: f64) -> ModelParams {
        ModelParams::new(1.0, kappa, 0.1, 1.0).unwrap()
    }

    #[test]
    fn complex_partition_matches_real_axis() {
        let q = QuadratureSpec::default();
        for &k in &[0.0, 0.05, 0.25, 0.5] {
            let mode = p(k).static_mode();
            for &b in &[0.3, 1.0, 2.5] {
                let z = partition_sharp_complex(C64::new(b, 0.0), &mode, &q).unwrap();
                let zr = partition_sharp(b, &mode, &q).unwrap();
                assert!((z.re / zr - 1.0).abs() < 1e-10 && z.im.abs() < 1e-12 * zr, "k {k} b {b}");
            }
        }
    }

    #[test]
    fn complex_partition_weak_coupling_is_geometric() {
        let q = QuadratureSpec::default();
        let mode = p(0.0).static_mode();
        for &s in &[C64::new(0.5, 3.0), C64::new(1.0, -40.0), C64::new(0.2, 700.0)] {
            let z = partition_sharp_complex(s, &mode, &q).unwrap();
            let exact = -1.0 / complex_exp_m1(-s);
            assert!((z - exact).norm() < 1e-8 * exact.norm(), "{s}: {z} vs {exact}");
        }
    }

    #[test]
    fn complex_partition_is_analytic() {
        let q = QuadratureSpec::default();
        let mode = p(0.5).static_mode();
        let s0 = C64::new(0.8, 5.0);
        let h = 1e-4;
        let z = |s: C64| partition_sharp_complex(s, &mode, &q).unwrap();
        let dx = (z(s0 + h) - z(s0 - h)) / (2.0 * h);
        let dy = (z(s0 + C64::new(0.0, h)) - z(s0 - C64::new(0.0, h))) / C64::new(0.0, 2.0 * h);
        assert!((dx - dy).norm() < 1e-6 * dx.norm().max(1.0));
    }

    #[test]
    fn closed_forms_integrate_to_partition_functions() {
        let (eps, h) = (1e-3, 2.5e-4);
        let grid = energy_grid(40.0, h);
        let pp = p(0.5);
        let s = density_closed_forms(ClosedForm::S, &pp, &grid, eps).unwrap();
        let so = density_closed_forms(ClosedForm::SO, &pp, &grid, eps).unwrap();
        let st = density_closed_forms(ClosedForm::Star, &pp, &grid, eps).unwrap();
        let m = pp.static_mode();
        for &b in &[1.0, 2.0, 3.0] {
            let reg = boxcar_factor(C64::new(b, 0.0), eps).re;
            let z_s = 1.0 / -(-b).exp_m1();
            let z_so = 1.0 / ((-(-b * m.omega1).exp_m1()) * (-(-b * m.omega2).exp_m1()));
            assert!((forward_laplace(&s, b) / (reg * z_s) - 1.0).abs() < 5e-3);
            assert!((forward_laplace(&so, b) / (reg * z_so) - 1.0).abs() < 5e-3);
            let z_star = log_partition_star(b, &pp).exp();
            assert!((forward_laplace(&st, b) / (reg * z_star) - 1.0).abs() < 5e-3);
        }
    }

    #[test]
    fn so_multiplicities() {
        let deltas = closed_form_deltas(ClosedForm::SO, &p(0.5), 3.2);
        let count = |e: f64| deltas.iter().filter(|(c, _)| (c - e).abs() < 1e-12).count();
        let seq: Vec<usize> = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0].iter().map(|&e| count(e)).collect();
        assert_eq!(seq, vec![1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn star_density_has_negative_boxcars() {
        let grid = energy_grid(4.0, 2.5e-4);
        let st = density_closed_forms(ClosedForm::Star, &p(0.05), &grid, 1e-3).unwrap();
        let peak = st.values.iter().cloned().fold(f64::MIN, f64::max);
        let low = st.values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(low < -1e-3 * peak);
    }

    #[test]
    fn boxcar_peak_centers() {
        let grid = energy_grid(3.0, 2.5e-4);
        let so = density_closed_forms(ClosedForm::SO, &p(0.5), &grid, 1e-3).unwrap();
        let c = peak_centers(&so, 100.0);
        for (found, expect) in c.iter().zip([0.0, 0.5, 1.0, 1.5, 2.0, 2.5].iter()) {
            assert!((found - (expect + 5e-4)).abs() < 2.5e-4, "{found} {expect}");
        }
    }

    #[test]
    fn perturbative_series_matches_partition() {
        let q = QuadratureSpec::default();
        let pp = p(0.01);
        let series = density_sharp_perturbative(&pp, 200);
        let so = density_so_perturbative(&pp, 200);
        let m = pp.static_mode();
        for &b in &[0.5, 1.0, 1.5, 2.0] {
            let z = partition_sharp(b, &m, &q).unwrap();
            assert!((series.laplace(b) / z - 1.0).abs() < 1e-6, "b {b}");
            let z_so = 1.0 / ((-(-b * m.omega1).exp_m1()) * (-(-b * m.omega2).exp_m1()));
            assert!((so.laplace(b) / z_so - 1.0).abs() < 1e-6, "b {b}");
        }
        assert!(density_sharp_perturbative(&p(0.0), 5).terms.iter().all(|t| t.order == 0 || t.weight == 0.0));
    }

    #[test]
    fn coarse_sharp_density_forward_consistency() {
        let q = QuadratureSpec { rel_tol: 1e-9, ..QuadratureSpec::default() };
        let pp = p(0.5);
        let eps = 2e-2;
        let grid = energy_grid(12.0, eps / 4.0);
        let ilt = IltSpec { method: IltMethod::FourierSeries, contour_terms: 64, precision_digits: 8 };
        let d = density_sharp(&pp, &grid, eps, &ilt, &q).unwrap();
        let m = pp.static_mode();
        for &b in &[0.5, 1.0, 2.0, 3.0] {
            let target = partition_sharp(b, &m, &q).unwrap() * boxcar_factor(C64::new(b, 0.0), eps).re;
            let rel = forward_laplace(&d, b) / target - 1.0;
            assert!(rel.abs() < 0.02, "b {b}: {rel}");
        }
    }
}
