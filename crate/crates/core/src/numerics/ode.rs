//! Dormand–Prince 5(4) integration with the order-4 continuous extension,
//! and the propagator interface built on it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub dense_dt: f64,
}

impl Default for OdeSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_step: 0.5, dense_dt: 2.0 * std::f64::consts::PI / 20.0 }
    }
}

impl OdeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0 && self.dense_dt > 0.0) {
            return Err(Error::InvalidParameter("ODE tolerances, max_step and dense_dt must be > 0".into()));
        }
        Ok(())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates dy/dt = f(t, y) from `times[0]` and returns y at every entry
/// of the increasing sequence `times`, using dense output between steps.
pub fn solve_dense<F>(mut rhs: F, y0: &[C64], times: &[f64], spec: &OdeSpec) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    spec.validate()?;
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("output times must be nondecreasing".into()));
    }
    let n = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let Some(&t_end) = times.last() else {
        return Ok(out);
    };
    let mut t = times[0];
    let mut y = y0.to_vec();
    let mut next = 0;
    while next < times.len() && times[next] <= t {
        out.push(y.clone());
        next += 1;
    }
    if next == times.len() {
        return Ok(out);
    }

    let mut k: Vec<Vec<C64>> = vec![vec![C64::default(); n]; 7];
    let mut tmp = vec![C64::default(); n];
    let mut y1 = vec![C64::default(); n];
    let mut rcont: Vec<Vec<C64>> = vec![vec![C64::default(); n]; 5];
    rhs(t, &y, &mut k[0]);

    let scale = |a: &[C64], b: &[C64], i: usize| spec.abs_tol + spec.rel_tol * a[i].norm().max(b[i].norm());
    let mut h = {
        let d0 = (0..n).map(|i| (y[i].norm() / scale(&y, &y, i)).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..n).map(|i| (k[0][i].norm() / scale(&y, &y, i)).powi(2)).sum::<f64>().sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(spec.max_step).min(t_end - t)
    };
    let mut rejected_last = false;

    while next < times.len() {
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let h_try = h.min(t_end - t).min(spec.max_step);
        let stage = |w: &mut Vec<C64>, coeffs: &[(usize, f64)], k: &[Vec<C64>]| {
            for i in 0..n {
                let mut acc = y[i];
                for &(j, a) in coeffs {
                    acc += k[j][i] * (h_try * a);
                }
                w[i] = acc;
            }
        };
        stage(&mut tmp, &[(0, A21)], &k);
        rhs(t + C2 * h_try, &tmp, &mut k[1]);
        stage(&mut tmp, &[(0, A31), (1, A32)], &k);
        rhs(t + C3 * h_try, &tmp, &mut k[2]);
        stage(&mut tmp, &[(0, A41), (1, A42), (2, A43)], &k);
        rhs(t + C4 * h_try, &tmp, &mut k[3]);
        stage(&mut tmp, &[(0, A51), (1, A52), (2, A53), (3, A54)], &k);
        rhs(t + C5 * h_try, &tmp, &mut k[4]);
        stage(&mut tmp, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k);
        rhs(t + h_try, &tmp, &mut k[5]);
        stage(&mut y1, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &k);
        rhs(t + h_try, &y1, &mut k[6]);

        let err = ((0..n)
            .map(|i| {
                let e =
                    (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h_try;
                (e.norm() / scale(&y, &y1, i)).powi(2)
            })
            .sum::<f64>()
            / n.max(1) as f64)
            .sqrt();

        if !err.is_finite() {
            h = 0.1 * h_try;
            rejected_last = true;
            continue;
        }
        if err <= 1.0 {
            for i in 0..n {
                let ydiff = y1[i] - y[i];
                let bspl = k[0][i] * h_try - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - k[6][i] * h_try - bspl;
                rcont[4][i] =
                    (k[0][i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5 + k[5][i] * D6 + k[6][i] * D7) * h_try;
            }
            let t_new = if t_end - (t + h_try) < 1e-12 * t_end.abs().max(1.0) { t_end } else { t + h_try };
            while next < times.len() && times[next] <= t_new {
                let th = ((times[next] - t) / h_try).clamp(0.0, 1.0);
                let th1 = 1.0 - th;
                let v = (0..n)
                    .map(|i| {
                        rcont[0][i] + (rcont[1][i] + (rcont[2][i] + (rcont[3][i] + rcont[4][i] * th1) * th) * th1) * th
                    })
                    .collect();
                out.push(v);
                next += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y1);
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
            let mut fac = 0.9 * err.powf(-0.2);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = h_try * fac.clamp(0.2, 10.0);
            rejected_last = false;
        } else {
            h = h_try * (0.9 * err.powf(-0.2)).max(0.2);
            rejected_last = true;
        }
    }
    Ok(out)
}

/// One dense sample of the fundamental matrix and affine part.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSample {
    pub t: f64,
    pub m: DMatrix<C64>,
    pub y: DVector<C64>,
}

/// Solves dM/dt = L(t)M with M(t0) = 1 and dy/dt = L(t)y + u(t) with
/// y(t0) = 0, sampled on `times` (which must start at t0).
pub fn propagate_on_grid<L, U>(
    generator: L,
    inhomogeneity: Option<U>,
    times: &[f64],
    spec: &OdeSpec,
) -> Result<Vec<PropagatorSample>>
where
    L: Fn(f64) -> DMatrix<C64>,
    U: Fn(f64) -> DVector<C64>,
{
    let Some(&t0) = times.first() else {
        return Ok(Vec::new());
    };
    let n = generator(t0).nrows();
    let cols = n + 1;
    let mut z0 = vec![C64::default(); n * cols];
    for i in 0..n {
        z0[i + i * n] = C64::new(1.0, 0.0);
    }
    let rhs = |t: f64, z: &[C64], dz: &mut [C64]| {
        let l = generator(t);
        let zm = nalgebra::DMatrixView::from_slice(z, n, cols);
        let mut dm = nalgebra::DMatrixViewMut::from_slice(dz, n, cols);
        dm.gemm(C64::new(1.0, 0.0), &l, &zm, C64::new(0.0, 0.0));
        if let Some(u) = inhomogeneity.as_ref() {
            let uv = u(t);
            for i in 0..n {
                dm[(i, n)] += uv[i];
            }
        }
    };
    let states = solve_dense(rhs, &z0, times, spec)?;
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, z)| {
            let full = DMatrix::from_vec(n, cols, z);
            PropagatorSample { t, m: full.columns(0, n).into_owned(), y: full.column(n).into_owned() }
        })
        .collect())
}

/// Uniform sample times from t0 to t1 inclusive with spacing at most `dt`.
pub fn uniform_grid(t0: f64, t1: f64, dt: f64) -> Vec<f64> {
    let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut grid: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * h).collect();
    grid.push(t1);
    grid
}

/// [`propagate_on_grid`] on a uniform grid of spacing at most `spec.dense_dt`.
pub fn propagate<L, U>(
    generator: L,
    t0: f64,
    t1: f64,
    inhomogeneity: Option<U>,
    spec: &OdeSpec,
) -> Result<Vec<PropagatorSample>>
where
    L: Fn(f64) -> DMatrix<C64>,
    U: Fn(f64) -> DVector<C64>,
{
    spec.validate()?;
    propagate_on_grid(generator, inhomogeneity, &uniform_grid(t0, t1, spec.dense_dt), spec)
}
