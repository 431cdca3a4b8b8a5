//! Direct integration of the secular master equation on the truncated
//! two-mode Fock space.
//!
//! Each normal mode `c_k` is damped at rate γ/2 towards its Bose occupation.
//! Integration runs in the frame rotating with ω0·N, which commutes with the
//! dissipator, so only the exchange term κ(a†d + d†a) drives the coherent
//! part.

use super::density::{hermitian_part, CMatrix, DensityMatrix, C64};
use super::fock::{top_levels_population, two_mode_annihilators};
use crate::error::{Error, Result};
use crate::model::{bose_occupation, ModelParams};
use crate::numerics::ode::{solve_dense, OdeSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladSpec {
    pub ode: OdeSpec,
    /// Largest allowed population of the two highest Fock levels.
    pub leakage_limit: f64,
}

impl Default for LindbladSpec {
    fn default() -> Self {
        Self {
            ode: OdeSpec { rel_tol: 1e-10, abs_tol: 1e-13, max_step: 0.5, ..OdeSpec::default() },
            leakage_limit: 1e-6,
        }
    }
}

/// Operator stored as (row, column, value) triplets.
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != C64::default() {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        Self { entries }
    }

    /// out += s·(A X) for column-major X of size dim×dim.
    fn left_mul_acc(&self, x: &[C64], out: &mut [C64], dim: usize, s: C64) {
        for &(r, k, v) in &self.entries {
            let v = v * s;
            for c in 0..dim {
                out[r + c * dim] += v * x[k + c * dim];
            }
        }
    }

    /// out = X A†.
    fn right_mul_adjoint(&self, x: &[C64], out: &mut [C64], dim: usize) {
        out.iter_mut().for_each(|z| *z = C64::default());
        for &(c, k, v) in &self.entries {
            let v = v.conj();
            let (dst, src) = (c * dim, k * dim);
            for r in 0..dim {
                out[dst + r] += x[src + r] * v;
            }
        }
    }
}

/// Evolves `rho0` on `t_grid` (starting at 0) with the undriven master
/// equation truncated at `n_max` quanta per mode.
pub fn lindblad_evolve_truncated(
    rho0: &DensityMatrix,
    t_grid: &[f64],
    p: &ModelParams,
    n_max: usize,
    spec: &LindbladSpec,
) -> Result<Vec<DensityMatrix>> {
    p.validate()?;
    let n = n_max + 1;
    let dim = n * n;
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch(format!("state of dimension {} for n_max = {n_max}", rho0.dim())));
    }
    if t_grid.first() != Some(&0.0) {
        return Err(Error::InvalidParameter("time grid must start at 0".into()));
    }
    let leak = top_levels_population(rho0, n_max);
    if leak > spec.leakage_limit {
        return Err(Error::TruncationLeakage { leakage: leak, limit: spec.leakage_limit });
    }

    let (a, d) = two_mode_annihilators(n_max);
    let mode = p.static_mode();
    let (y11, y12) = (mode.w1.sqrt(), mode.w2.sqrt());
    let re = |x: f64| C64::new(x, 0.0);
    let c1 = &a * re(y11) + &d * re(y12);
    let c2 = &a * re(y12) - &d * re(y11);
    let (n1, n2) = (bose_occupation(mode.omega1, p.beta), bose_occupation(mode.omega2, p.beta));
    let g = 0.5 * p.gamma;
    let jumps: Vec<(CMatrix, f64)> = vec![
        (c1.clone(), g * (n1 + 1.0)),
        (c1.adjoint(), g * n1),
        (c2.clone(), g * (n2 + 1.0)),
        (c2.adjoint(), g * n2),
    ];
    let exchange = (a.adjoint() * &d + d.adjoint() * &a) * re(p.kappa);
    let mut h_eff = exchange;
    for (l, rate) in &jumps {
        h_eff -= (l.adjoint() * l) * C64::new(0.0, 0.5 * rate);
    }
    let h_eff = Sparse::from_dense(&h_eff);
    let jumps: Vec<(Sparse, f64)> = jumps.iter().map(|(l, r)| (Sparse::from_dense(l), *r)).collect();

    let mut x = vec![C64::default(); dim * dim];
    let mut tmp = vec![C64::default(); dim * dim];
    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        h_eff.right_mul_adjoint(y, &mut x, dim);
        for (d, v) in dy.iter_mut().zip(&x) {
            *d = C64::new(0.0, 1.0) * v;
        }
        h_eff.left_mul_acc(y, dy, dim, C64::new(0.0, -1.0));
        for (l, rate) in &jumps {
            l.right_mul_adjoint(y, &mut tmp, dim);
            l.left_mul_acc(&tmp, dy, dim, re(*rate));
        }
    };
    let states = solve_dense(rhs, rho0.entries().as_slice(), t_grid, &spec.ode)?;

    let quanta: Vec<f64> = (0..dim).map(|k| (k / n + k % n) as f64).collect();
    t_grid
        .iter()
        .zip(states)
        .map(|(&t, y)| {
            let rot = CMatrix::from_fn(dim, dim, |r, c| {
                y[r + c * dim] * C64::from_polar(1.0, -p.omega0 * (quanta[r] - quanta[c]) * t)
            });
            let rho = DensityMatrix::new(hermitian_part(&rot))?;
            let leak = top_levels_population(&rho, n_max);
            if leak > spec.leakage_limit {
                return Err(Error::TruncationLeakage { leakage: leak, limit: spec.leakage_limit });
            }
            Ok(rho)
        })
        .collect()
}
