//! Gaussian moment dynamics of the system and reaction-coordinate pair under
//! the secular master equation, with and without frequency driving.
//!
//! The driven case is solved in the instantaneous normal-mode frame, where
//! the Heisenberg equations for `c`, `cc` and `c†c` close on generators
//! L1, L2, L3. Propagators are mapped back to the `(a, d)` basis through the
//! congruences built from the mixing matrix Y(t).

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Matrix4, Vector2, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian::{CovarianceMatrix, GaussianState};
use crate::model::{
    bose_occupation, drive_omega, mixing_from_mode, mixing_rate_mu, normal_mode, DrivingParams, MixingMatrix,
    ModelParams,
};
use crate::numerics::ode::{propagate_on_grid, OdeSpec};

type C64 = Complex64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// First and second moments of the `(a, d)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moments {
    pub a: C64,
    pub d: C64,
    pub aa: C64,
    pub ad: C64,
    pub dd: C64,
    pub na: C64,
    pub x_ad: C64,
    pub x_da: C64,
    pub nd: C64,
}

impl Moments {
    /// Largest violation of hermiticity: imaginary parts of the occupations
    /// and the mismatch between ⟨d†a⟩ and the conjugate of ⟨a†d⟩.
    pub fn hermiticity_defect(&self) -> f64 {
        self.na.im.abs().max(self.nd.im.abs()).max((self.x_da - self.x_ad.conj()).norm())
    }
}

/// Propagators in the `(a, d)` basis at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSet {
    pub t: f64,
    pub a: Matrix2<C64>,
    pub b: Matrix3<C64>,
    pub c: Matrix4<C64>,
    pub y: Vector4<C64>,
}

impl PropagatorSet {
    pub fn identity(t: f64) -> Self {
        Self { t, a: Matrix2::identity(), b: Matrix3::identity(), c: Matrix4::identity(), y: Vector4::zeros() }
    }
}

/// Propagators Ã, B̃, C̃ and ỹ in the normal-mode frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFramePropagators {
    pub t: f64,
    pub a: Matrix2<C64>,
    pub b: Matrix3<C64>,
    pub c: Matrix4<C64>,
    pub y: Vector4<C64>,
}

pub fn initial_moments_product(r: f64, theta: f64, beta: f64, p: &ModelParams) -> Moments {
    let (sh, ch) = (r.sinh(), r.cosh());
    Moments {
        aa: -C64::from_polar(sh * ch, theta),
        na: re(sh * sh),
        nd: re(bose_occupation(p.omega0, beta)),
        ..Moments::default()
    }
}

/// Moments of the joint Gibbs state of the undriven pair.
pub fn initial_moments_joint_gibbs(beta: f64, p: &ModelParams) -> Moments {
    let mode = p.static_mode();
    let y = mixing_from_mode(&mode);
    let (n1, n2) = (bose_occupation(mode.omega1, beta), bose_occupation(mode.omega2, beta));
    let x = y.y11 * y.y12 * (n1 - n2);
    Moments {
        na: re(mode.w1 * n1 + mode.w2 * n2),
        nd: re(mode.w2 * n1 + mode.w1 * n2),
        x_ad: re(x),
        x_da: re(x),
        ..Moments::default()
    }
}

/// Closed-form reduced covariance without driving, starting from a squeezed
/// vacuum times the thermal reaction coordinate.
pub fn covariance_no_driving(t: f64, r: f64, theta: f64, beta: f64, p: &ModelParams) -> CovarianceMatrix {
    let mode = p.static_mode();
    let decay = (-0.5 * p.gamma * t).exp();
    let n0 = bose_occupation(p.omega0, beta);
    let n12 = bose_occupation(mode.omega1, beta) + bose_occupation(mode.omega2, beta);
    let (sk, ck) = (p.kappa * t).sin_cos();
    let sh2 = r.sinh().powi(2);
    let s2r = (2.0 * r).sinh();
    let phase = 2.0 * p.omega0 * t - theta;
    let common = decay * (2.0 * ck * ck * sh2 + 2.0 * sk * sk * n0) + (1.0 - decay) * n12 + 1.0;
    let squeeze = decay * ck * ck * s2r;
    CovarianceMatrix {
        s11: common - squeeze * phase.cos(),
        s12: squeeze * phase.sin(),
        s22: common + squeeze * phase.cos(),
    }
}

/// The map (a², ad, d²) ↦ (c1², c1c2, c2²) induced by Y.
pub fn r_matrix(y: &MixingMatrix) -> Matrix3<C64> {
    let (y11, y12, y21, y22) = (y.y11, y.y12, y.y21(), y.y22());
    Matrix3::new(
        y11 * y11,
        2.0 * y11 * y12,
        y12 * y12,
        y11 * y21,
        y11 * y22 + y12 * y21,
        y12 * y22,
        y21 * y21,
        2.0 * y21 * y22,
        y22 * y22,
    )
    .map(re)
}

/// The map (a†a, a†d, d†a, d†d) ↦ (c1†c1, c1†c2, c2†c1, c2†c2) induced by Y.
pub fn g_matrix(y: &MixingMatrix) -> Matrix4<C64> {
    let (y11, y12, y21, y22) = (y.y11, y.y12, y.y21(), y.y22());
    Matrix4::new(
        y11 * y11,
        y11 * y12,
        y11 * y12,
        y12 * y12,
        y11 * y21,
        y11 * y22,
        y12 * y21,
        y12 * y22,
        y11 * y21,
        y12 * y21,
        y11 * y22,
        y12 * y22,
        y21 * y21,
        y21 * y22,
        y21 * y22,
        y22 * y22,
    )
    .map(re)
}

fn y_matrix(y: &MixingMatrix) -> Matrix2<C64> {
    Matrix2::new(y.y11, y.y12, y.y21(), y.y22()).map(re)
}

/// Instantaneous generator data: normal frequencies, mixing rate, occupations.
struct Instant {
    w1: f64,
    w2: f64,
    mu: f64,
    n1: f64,
    n2: f64,
}

fn instant(t: f64, p: &ModelParams, d: &DrivingParams) -> Instant {
    let m = normal_mode(drive_omega(t, p, d), p.omega0, p.kappa);
    Instant {
        w1: m.omega1,
        w2: m.omega2,
        mu: mixing_rate_mu(t, p, d),
        n1: bose_occupation(m.omega1, p.beta),
        n2: bose_occupation(m.omega2, p.beta),
    }
}

pub fn generator_l1(t: f64, p: &ModelParams, d: &DrivingParams) -> Matrix2<C64> {
    let s = instant(t, p, d);
    let g = -p.gamma / 4.0;
    Matrix2::new(C64::new(g, -s.w1), re(-s.mu), re(s.mu), C64::new(g, -s.w2))
}

pub fn generator_l2(t: f64, p: &ModelParams, d: &DrivingParams) -> Matrix3<C64> {
    let s = instant(t, p, d);
    let g = -p.gamma / 2.0;
    let z = re(0.0);
    Matrix3::new(
        C64::new(g, -2.0 * s.w1),
        re(-2.0 * s.mu),
        z,
        re(s.mu),
        C64::new(g, -(s.w1 + s.w2)),
        re(-s.mu),
        z,
        re(2.0 * s.mu),
        C64::new(g, -2.0 * s.w2),
    )
}

pub fn generator_l3(t: f64, p: &ModelParams, d: &DrivingParams) -> Matrix4<C64> {
    let s = instant(t, p, d);
    let g = -p.gamma / 2.0;
    let (m, z) = (re(s.mu), re(0.0));
    Matrix4::new(
        re(g),
        -m,
        -m,
        z,
        m,
        C64::new(g, s.w1 - s.w2),
        z,
        -m,
        m,
        z,
        C64::new(g, -(s.w1 - s.w2)),
        -m,
        z,
        m,
        m,
        re(g),
    )
}

pub fn inhomogeneity_u(t: f64, p: &ModelParams, d: &DrivingParams) -> Vector4<C64> {
    let s = instant(t, p, d);
    let h = p.gamma / 2.0;
    Vector4::new(re(h * s.n1), re(0.0), re(0.0), re(h * s.n2))
}

/// Default dense-output interval resolving both free and driven oscillation.
pub fn default_dense_dt(p: &ModelParams, d: &DrivingParams) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut dt = tau / (20.0 * p.omega0);
    if d.omega > 0.0 {
        dt = dt.min(tau / (20.0 * d.omega));
    }
    dt
}

fn to_dmatrix<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> DMatrix<C64> {
    DMatrix::from_column_slice(N, N, m.as_slice())
}

/// Ã, B̃, C̃, ỹ on `t_grid`, which must start at 0.
///
/// Each system is integrated with the uniform decay removed (integrating
/// factor e^{ct}, c = γ/4 or γ/2), which keeps the step control relative to
/// the non-decaying part of the propagator.
pub fn normal_frame_propagators(
    t_grid: &[f64],
    p: &ModelParams,
    d: &DrivingParams,
    spec: &OdeSpec,
) -> Result<Vec<NormalFramePropagators>> {
    p.validate()?;
    d.validate(p)?;
    type NoU = fn(f64) -> DVector<C64>;
    let (c1, c2) = (p.gamma / 4.0, p.gamma / 2.0);
    let shifted = |m: DMatrix<C64>, c: f64| {
        let n = m.nrows();
        m + DMatrix::from_diagonal_element(n, n, re(c))
    };
    let a = propagate_on_grid(|t| shifted(to_dmatrix(&generator_l1(t, p, d)), c1), None::<NoU>, t_grid, spec)?;
    let b = propagate_on_grid(|t| shifted(to_dmatrix(&generator_l2(t, p, d)), c2), None::<NoU>, t_grid, spec)?;
    let c = propagate_on_grid(
        |t| shifted(to_dmatrix(&generator_l3(t, p, d)), c2),
        Some(|t: f64| DVector::from_column_slice((inhomogeneity_u(t, p, d) * re((c2 * t).exp())).as_slice())),
        t_grid,
        spec,
    )?;
    Ok(a.into_iter()
        .zip(b)
        .zip(c)
        .map(|((a, b), c)| {
            let (fa, fb) = (re((-c1 * a.t).exp()), re((-c2 * a.t).exp()));
            NormalFramePropagators {
                t: a.t,
                a: Matrix2::from_column_slice(a.m.as_slice()) * fa,
                b: Matrix3::from_column_slice(b.m.as_slice()) * fb,
                c: Matrix4::from_column_slice(c.m.as_slice()) * fb,
                y: Vector4::from_column_slice(c.y.as_slice()) * fb,
            }
        })
        .collect())
}

/// Converts normal-frame propagators to the `(a, d)` basis.
pub fn to_bare_frame(nf: &NormalFramePropagators, p: &ModelParams, d: &DrivingParams) -> PropagatorSet {
    let y0 = mixing_from_mode(&normal_mode(drive_omega(0.0, p, d), p.omega0, p.kappa));
    let yt = mixing_from_mode(&normal_mode(drive_omega(nf.t, p, d), p.omega0, p.kappa));
    let gt = g_matrix(&yt);
    PropagatorSet {
        t: nf.t,
        a: y_matrix(&yt) * nf.a * y_matrix(&y0),
        b: r_matrix(&yt) * nf.b * r_matrix(&y0),
        c: gt * nf.c * g_matrix(&y0),
        y: gt * nf.y,
    }
}

pub fn propagators_driven(
    t_grid: &[f64],
    p: &ModelParams,
    d: &DrivingParams,
    spec: &OdeSpec,
) -> Result<Vec<PropagatorSet>> {
    Ok(normal_frame_propagators(t_grid, p, d, spec)?.iter().map(|nf| to_bare_frame(nf, p, d)).collect())
}

pub fn evolve_moments(props: &PropagatorSet, m0: &Moments) -> Moments {
    let first = props.a * Vector2::new(m0.a, m0.d);
    let second = props.b * Vector3::new(m0.aa, m0.ad, m0.dd);
    let normal = props.c * Vector4::new(m0.na, m0.x_ad, m0.x_da, m0.nd) + props.y;
    Moments {
        a: first[0],
        d: first[1],
        aa: second[0],
        ad: second[1],
        dd: second[2],
        na: normal[0],
        x_ad: normal[1],
        x_da: normal[2],
        nd: normal[3],
    }
}

/// Reduced Gaussian state of the system mode.
pub fn reduced_covariance(m: &Moments) -> Result<GaussianState> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let (q, pm) = (sqrt2 * m.a.re, sqrt2 * m.a.im);
    let cov = CovarianceMatrix {
        s11: 2.0 * (m.na.re + m.aa.re + 0.5) - 2.0 * q * q,
        s12: 2.0 * m.aa.im - 2.0 * q * pm,
        s22: 2.0 * (m.na.re - m.aa.re + 0.5) - 2.0 * pm * pm,
    };
    crate::gaussian::symplectic_eigenvalue(&cov)?;
    Ok(GaussianState { mean_q: q, mean_p: pm, cov })
}

/// Largest deviation from 1 among the singular values of `m`.
pub fn unitarity_defect(m: DMatrix<C64>) -> f64 {
    m.singular_values().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
}

/// Scaled-unitarity defects (Ã, B̃, C̃) of one normal-frame sample.
pub fn scaled_unitarity(nf: &NormalFramePropagators, gamma: f64) -> (f64, f64, f64) {
    let s = std::f64::consts::SQRT_2;
    let dmat = Matrix3::new(1.0, 0.0, 0.0, 0.0, s, 0.0, 0.0, 0.0, 1.0).map(re);
    let dinv = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0 / s, 0.0, 0.0, 0.0, 1.0).map(re);
    let ea = re((gamma * nf.t / 4.0).exp());
    let eb = re((gamma * nf.t / 2.0).exp());
    (
        unitarity_defect(to_dmatrix(&(nf.a * ea))),
        unitarity_defect(to_dmatrix(&(dmat * nf.b * dinv * eb))),
        unitarity_defect(to_dmatrix(&(nf.c * eb))),
    )
}
