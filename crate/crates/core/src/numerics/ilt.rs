//! Numerical inverse Laplace transforms.
//!
//! Three methods are offered. The Fourier-series method evaluates the
//! Bromwich integral on a vertical line with an FFT and is the only one that
//! copes with transforms whose inverse contains delayed, nearly singular
//! features. Fixed Talbot and Gaver–Stehfest are available for smooth targets.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IltMethod {
    FixedTalbot,
    GaverStehfest,
    FourierSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IltSpec {
    pub method: IltMethod,
    pub contour_terms: usize,
    pub precision_digits: u32,
}

impl Default for IltSpec {
    fn default() -> Self {
        Self { method: IltMethod::FourierSeries, contour_terms: 64, precision_digits: 8 }
    }
}

impl IltSpec {
    pub fn talbot(terms: usize) -> Self {
        Self { method: IltMethod::FixedTalbot, contour_terms: terms, precision_digits: 8 }
    }

    pub fn gaver_stehfest(terms: usize) -> Self {
        Self { method: IltMethod::GaverStehfest, contour_terms: terms, precision_digits: 6 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.contour_terms < 8 {
            return Err(Error::InvalidParameter("contour_terms must be >= 8".into()));
        }
        if self.method == IltMethod::GaverStehfest && (self.contour_terms % 2 != 0 || self.contour_terms > 64) {
            return Err(Error::InvalidParameter("Gaver-Stehfest needs an even number of terms <= 64".into()));
        }
        if self.precision_digits == 0 {
            return Err(Error::InvalidParameter("precision_digits must be >= 1".into()));
        }
        Ok(())
    }
}

/// Samples of the inverse transform of `f` at each point of `grid`.
pub fn inverse_laplace<F>(f: F, grid: &[f64], spec: &IltSpec) -> Result<Vec<f64>>
where
    F: Fn(C64) -> C64 + Sync,
{
    spec.validate()?;
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("grid must be nonnegative and strictly increasing".into()));
    }
    match spec.method {
        IltMethod::FixedTalbot => grid.par_iter().map(|&t| talbot(&f, t, spec)).collect(),
        IltMethod::GaverStehfest => {
            let v = stehfest_weights(spec.contour_terms);
            grid.par_iter().map(|&t| gaver_stehfest(&f, t, &v, spec)).collect()
        }
        IltMethod::FourierSeries => fourier_series(&f, grid, spec),
    }
}

fn check_cancellation(value: f64, magnitude: f64, t: f64, spec: &IltSpec, name: &str) -> Result<f64> {
    let roundoff = f64::EPSILON * magnitude;
    let tol = 10f64.powi(-(spec.precision_digits as i32)) * value.abs().max(1.0);
    if !value.is_finite() || !(roundoff <= tol) {
        return Err(Error::IltDivergence(format!(
            "{name} at t = {t}: result {value:e} from terms of size {magnitude:e}"
        )));
    }
    Ok(value)
}

fn talbot<F: Fn(C64) -> C64>(f: &F, t: f64, spec: &IltSpec) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::IltDivergence("Talbot contour is undefined at t = 0".into()));
    }
    let m = spec.contour_terms;
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (f(C64::new(r, 0.0)) * (r * t).exp()).re;
    let mut magnitude = sum.abs();
    for k in 1..m {
        let th = k as f64 * std::f64::consts::PI / m as f64;
        let cot = th.cos() / th.sin();
        let s = C64::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        let term = ((s * t).exp() * f(s) * C64::new(1.0, sigma)).re;
        magnitude += term.abs();
        sum += term;
    }
    check_cancellation(sum * r / m as f64, magnitude * r / m as f64, t, spec, "Talbot")
}

/// Stehfest coefficients V_k, k = 1..=n.
pub fn stehfest_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let fact = |k: usize| (1..=k).fold(1.0f64, |a, j| a * j as f64);
    (1..=n)
        .map(|k| {
            let sum: f64 = (k.div_ceil(2)..=k.min(half))
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half) % 2 == 0 {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

fn gaver_stehfest<F: Fn(C64) -> C64>(f: &F, t: f64, v: &[f64], spec: &IltSpec) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::IltDivergence("Gaver-Stehfest is undefined at t = 0".into()));
    }
    let a = std::f64::consts::LN_2 / t;
    let (sum, magnitude) = v.iter().enumerate().fold((0.0, 0.0), |(s, m), (i, &vk)| {
        let term = vk * f(C64::new(a * (i + 1) as f64, 0.0)).re;
        (s + term, m + term.abs())
    });
    check_cancellation(a * sum, a * magnitude, t, spec, "Gaver-Stehfest")
}

/// Fourier-series inversion: trapezoidal Bromwich sum on Re s = a with
/// Lanczos smoothing, evaluated for all output times by one FFT.
fn fourier_series<F: Fn(C64) -> C64 + Sync>(f: &F, grid: &[f64], spec: &IltSpec) -> Result<Vec<f64>> {
    let Some(&t_max) = grid.last() else {
        return Ok(Vec::new());
    };
    let spacing = grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let spacing = if spacing.is_finite() { spacing } else { t_max.max(1.0) / spec.contour_terms as f64 };
    let terms = spec.contour_terms.max((t_max / spacing).ceil() as usize + 1);
    let big_t = terms as f64 * spacing;
    let a = spec.precision_digits as f64 * std::f64::consts::LN_10 / (2.0 * big_t);
    let w = std::f64::consts::PI / big_t;

    let values: Vec<C64> = (0..terms).into_par_iter().map(|k| f(C64::new(a, w * k as f64))).collect();
    if let Some(k) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::IltDivergence(format!("transform not finite at s = {a} + {}i", w * k as f64)));
    }
    let len = 2 * terms;
    let mut buf = vec![C64::default(); len];
    for (k, v) in values.iter().enumerate() {
        let sigma = if k == 0 {
            0.5
        } else {
            let x = std::f64::consts::PI * k as f64 / terms as f64;
            x.sin() / x
        };
        buf[k] = v * sigma;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let mut samples: Vec<f64> =
        buf.iter().take(terms + 1).enumerate().map(|(j, z)| (a * j as f64 * spacing).exp() / big_t * z.re).collect();
    // The series converges to the mean of the one-sided limits at t = 0.
    samples[0] *= 2.0;

    Ok(grid
        .iter()
        .map(|&t| {
            let x = t / spacing;
            let j = (x.floor() as usize).min(terms - 1);
            let frac = x - j as f64;
            if frac.abs() < 1e-9 {
                samples[j]
            } else if (1.0 - frac).abs() < 1e-9 {
                samples[j + 1]
            } else {
                samples[j] * (1.0 - frac) + samples[j + 1] * frac
            }
        })
        .collect())
}

/// Boxcar regularizer (1 − e^{−ϵs})/(ϵs), continuous at s = 0.
pub fn boxcar_factor(s: C64, width: f64) -> C64 {
    let z = s * width;
    if z.norm() < 1e-4 {
        C64::new(1.0, 0.0) - z * 0.5 + z * z / 6.0 - z * z * z / 24.0
    } else {
        -(-z).exp_m1() / z
    }
}

trait ExpM1 {
    fn exp_m1(self) -> Self;
}

impl ExpM1 for C64 {
    fn exp_m1(self) -> C64 {
        if self.norm() < 1e-5 {
            self + self * self * 0.5
        } else {
            let (s, c) = (0.5 * self.im).sin_cos();
            let em1 = self.re.exp_m1();
            let ex = self.re.exp();
            C64::new(em1 - 2.0 * ex * s * s, ex * 2.0 * s * c)
        }
    }
}

/// e^z − 1 without cancellation for small |z|.
pub fn complex_exp_m1(z: C64) -> C64 {
    z.exp_m1()
}
