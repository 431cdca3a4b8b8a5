//! Truncated two-mode Fock space of the system `a` and the reaction
//! coordinate `d`, each kept up to `n_max` quanta. Basis index of |i, j⟩ is
//! `i·(n_max+1) + j`.

use nalgebra::{DMatrix, DVector};

use super::density::{CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::model::ModelParams;

pub fn annihilation(n_max: usize) -> CMatrix {
    let n = n_max + 1;
    CMatrix::from_fn(n, n, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::default() })
}

/// `(a ⊗ 1, 1 ⊗ d)` on the truncated two-mode space.
pub fn two_mode_annihilators(n_max: usize) -> (CMatrix, CMatrix) {
    let a = annihilation(n_max);
    let id = CMatrix::identity(n_max + 1, n_max + 1);
    (a.kronecker(&id), id.kronecker(&a))
}

/// H_SO = ω0(a†a + d†d) + κ(a†d + d†a) on the truncated space.
pub fn hamiltonian_so(n_max: usize, p: &ModelParams) -> CMatrix {
    let (a, d) = two_mode_annihilators(n_max);
    let (ad, dd) = (a.adjoint(), d.adjoint());
    let k = C64::new(p.kappa, 0.0);
    (&ad * &a + &dd * &d).scale(p.omega0) + (&ad * &d + &dd * &a) * k
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedGibbs {
    pub rho: DensityMatrix,
    pub n_max: usize,
    /// Population of states with either mode in its top level.
    pub tail_weight: f64,
    pub log_partition: f64,
    /// Tr(ρ H_SO).
    pub energy: f64,
}

impl TruncatedGibbs {
    pub fn truncation_warning(&self) -> Option<String> {
        (self.tail_weight > 1e-8)
            .then(|| format!("Fock tail weight {:e} at n_max = {} exceeds 1e-8", self.tail_weight, self.n_max))
    }

    /// Reduced state of the system mode.
    pub fn system_state(&self) -> Result<DensityMatrix> {
        self.rho.trace_second(self.n_max + 1, self.n_max + 1)
    }
}

/// e^{−βH_SO}/Z, diagonalized block by block in the total number of quanta.
pub fn truncated_so_gibbs(n_max: usize, beta: f64, p: &ModelParams) -> Result<TruncatedGibbs> {
    p.validate()?;
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} must be >= 2")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be > 0")));
    }
    let n = n_max + 1;
    let mut levels = Vec::new();
    for total in 0..=2 * n_max {
        let lo = total.saturating_sub(n_max);
        let hi = total.min(n_max);
        let size = hi - lo + 1;
        let block = DMatrix::<f64>::from_fn(size, size, |r, c| {
            let (i, j) = (lo + r, lo + c);
            if r == c {
                p.omega0 * total as f64
            } else if i == j + 1 {
                p.kappa * ((i as f64) * (total - j) as f64).sqrt()
            } else if j == i + 1 {
                p.kappa * ((j as f64) * (total - i) as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = block.symmetric_eigen();
        for (k, &e) in eig.eigenvalues.iter().enumerate() {
            levels.push((total, lo, e, eig.eigenvectors.column(k).into_owned()));
        }
    }
    let e_min = levels.iter().map(|l| l.2).fold(f64::INFINITY, f64::min);
    let boltz: Vec<f64> = levels.iter().map(|l| (-beta * (l.2 - e_min)).exp()).collect();
    let z: f64 = boltz.iter().sum();
    let mut rho = CMatrix::zeros(n * n, n * n);
    let mut energy = 0.0;
    for ((total, lo, e, v), w) in levels.iter().zip(&boltz) {
        let pw = w / z;
        if pw == 0.0 {
            continue;
        }
        energy += pw * e;
        let idx = |r: usize| (lo + r) * n + (total - lo - r);
        for r in 0..v.len() {
            for c in 0..v.len() {
                rho[(idx(r), idx(c))] += C64::new(pw * v[r] * v[c], 0.0);
            }
        }
    }
    let tail_weight = (0..n * n).filter(|&k| k / n == n_max || k % n == n_max).map(|k| rho[(k, k)].re).sum();
    Ok(TruncatedGibbs {
        rho: DensityMatrix::from_psd_unchecked(rho),
        n_max,
        tail_weight,
        log_partition: -beta * e_min + z.ln(),
        energy,
    })
}

/// Squeezed vacuum S(re^{iθ})|0⟩ truncated to `n_max` quanta and renormalized.
pub fn squeezed_vacuum_fock(r: f64, theta: f64, n_max: usize) -> Result<DensityMatrix> {
    let mut psi = DVector::<C64>::zeros(n_max + 1);
    let ratio = -C64::from_polar(r.tanh(), theta);
    let mut amp = C64::new(1.0 / r.cosh().sqrt(), 0.0);
    for k in 0..=n_max / 2 {
        psi[2 * k] = amp;
        let kf = k as f64;
        amp *= ratio * (((2.0 * kf + 1.0) * (2.0 * kf + 2.0)).sqrt() / (2.0 * (kf + 1.0)));
    }
    DensityMatrix::pure(&psi)
}

/// Thermal state of frequency ω truncated to `n_max` quanta and renormalized.
pub fn thermal_fock(omega: f64, beta: f64, n_max: usize) -> Result<DensityMatrix> {
    let diag = DVector::from_fn(n_max + 1, |k, _| C64::new((-beta * omega * k as f64).exp(), 0.0));
    DensityMatrix::from_unnormalized(CMatrix::from_diagonal(&diag))
}

/// Covariance matrix of a single-mode state from its Fock-space moments.
pub fn single_mode_covariance(rho: &DensityMatrix) -> CovarianceMatrix {
    let n_max = rho.dim() - 1;
    let a = annihilation(n_max);
    let mean = rho.expectation(&a);
    let aa = rho.expectation(&(&a * &a));
    let na = rho.expectation(&(a.adjoint() * &a)).re;
    let sqrt2 = std::f64::consts::SQRT_2;
    let (q, pm) = (sqrt2 * mean.re, sqrt2 * mean.im);
    CovarianceMatrix {
        s11: 2.0 * (na + aa.re) + 1.0 - 2.0 * q * q,
        s12: 2.0 * aa.im - 2.0 * q * pm,
        s22: 2.0 * (na - aa.re) + 1.0 - 2.0 * pm * pm,
    }
}

/// Population of the two highest Fock levels of either mode.
pub fn top_levels_population(rho: &DensityMatrix, n_max: usize) -> f64 {
    let n = n_max + 1;
    let m = rho.entries();
    (0..n * n).filter(|&k| k / n + 1 >= n_max || k % n + 1 >= n_max).map(|k| m[(k, k)].re).sum()
}
