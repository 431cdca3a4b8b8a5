//! Density matrices, Hermitian matrix functions and the quantum relative entropy.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Eigenvalues below this are treated as zero by matrix functions.
pub const EIGEN_CLIP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity (1e−12), positivity (−1e−10) and unit trace (1e−10).
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidState(format!("{}×{} matrix is not square", entries.nrows(), entries.ncols())));
        }
        let herm = (&entries - entries.adjoint()).camax();
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:e}")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let entries = hermitian_part(&entries);
        let min = entries.clone().symmetric_eigenvalues().min();
        if min < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { entries })
    }

    /// Skips the eigenvalue check for matrices positive by construction.
    pub(crate) fn from_psd_unchecked(entries: CMatrix) -> Self {
        debug_assert!(entries.is_square());
        Self { entries: hermitian_part(&entries) }
    }

    /// Normalizes a positive semidefinite matrix to unit trace.
    pub fn from_unnormalized(m: CMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(m.unscale(tr))
    }

    /// A pure state |ψ⟩⟨ψ| (normalized here).
    pub fn pure(psi: &nalgebra::DVector<C64>) -> Result<Self> {
        Self::from_unnormalized(psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        (&self.entries * op).trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues().iter().filter(|&&l| l > EIGEN_CLIP).map(|&l| -l * l.ln()).sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { entries: self.entries.kronecker(&other.entries) }
    }

    /// Tr over the second factor of a `dim_a ⊗ dim_b` space.
    pub fn trace_second(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        Ok(Self { entries: partial_trace_second(&self.entries, dim_a, dim_b)? })
    }

    /// Tr over the first factor of a `dim_a ⊗ dim_b` space.
    pub fn trace_first(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        Ok(Self { entries: partial_trace_first(&self.entries, dim_a, dim_b)? })
    }
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

fn check_product(m: &CMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if m.nrows() != dim_a * dim_b || !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}×{} matrix on a {dim_a}⊗{dim_b} space", m.nrows(), m.ncols())));
    }
    Ok(())
}

pub fn partial_trace_second(m: &CMatrix, dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    check_product(m, dim_a, dim_b)?;
    Ok(CMatrix::from_fn(dim_a, dim_a, |i, j| (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()))
}

pub fn partial_trace_first(m: &CMatrix, dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    check_product(m, dim_a, dim_b)?;
    Ok(CMatrix::from_fn(dim_b, dim_b, |i, j| (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()))
}

/// f(M) for Hermitian M through its eigendecomposition.
pub fn hermitian_function<F: Fn(f64) -> f64>(m: &CMatrix, f: F) -> CMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let v = &eig.eigenvectors;
    let fd = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(f(l), 0.0)));
    v * fd * v.adjoint()
}

/// Positive square root with eigenvalues below [`EIGEN_CLIP`] set to zero.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |l| if l > EIGEN_CLIP { l.sqrt() } else { 0.0 })
}

/// D(ρ‖σ) = Tr ρ log ρ − Tr ρ log σ in nats; `f64::INFINITY` when the
/// support of ρ is not contained in that of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), sigma.dim(), "relative entropy of states of different dimension");
    let neg_entropy = -rho.von_neumann_entropy();
    let eig = sigma.entries.clone().symmetric_eigen();
    let mut cross = 0.0;
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let weight = (v.adjoint() * &rho.entries * v)[(0, 0)].re;
        if mu > EIGEN_CLIP {
            cross += weight * mu.ln();
        } else if weight > 1e-12 {
            return f64::INFINITY;
        }
    }
    neg_entropy - cross
}
