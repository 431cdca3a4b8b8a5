//! Petz recovery map and block-structured states saturating the monotonicity
//! of the relative entropy under the partial trace over the reservoir.

use super::density::{hermitian_function, relative_entropy, sqrt_psd, CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};

/// Thermal state e^{−βH}/Z of a Hermitian matrix.
pub fn gibbs_state(h: &CMatrix, beta: f64) -> Result<DensityMatrix> {
    let min = h.clone().symmetric_eigenvalues().min();
    DensityMatrix::from_unnormalized(hermitian_function(h, |l| (-beta * (l - min)).exp()))
}

/// ρ_SRβ^{1/2} (ρ_S,eq^{−1/2} ρ_S ρ_S,eq^{−1/2} ⊗ 1) ρ_SRβ^{1/2}, where
/// ρ_S,eq is the system marginal of ρ_SRβ.
pub fn petz_map(rho_s: &DensityMatrix, rho_srb: &DensityMatrix, dim_s: usize, dim_r: usize) -> Result<DensityMatrix> {
    if rho_s.dim() != dim_s {
        return Err(Error::DimensionMismatch(format!("system state of dimension {} for dim_s = {dim_s}", rho_s.dim())));
    }
    let eq = rho_srb.trace_second(dim_s, dim_r)?;
    let min_eig = eq.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    if !(min_eig > 1e-12) {
        return Err(Error::RankDeficient { min_eig });
    }
    let inv_sqrt = hermitian_function(eq.entries(), |l| 1.0 / l.sqrt());
    let x = &inv_sqrt * rho_s.entries() * &inv_sqrt;
    let lifted = x.kronecker(&CMatrix::identity(dim_r, dim_r));
    let root = sqrt_psd(rho_srb.entries());
    DensityMatrix::new(&root * lifted * &root)
}

/// D(ρ_SR‖ρ_SRβ) − D(ρ_S‖ρ_S,eq), which is ≥ 0 and vanishes exactly for
/// valid thermodynamic initial conditions.
pub fn verify_thermo_initial_condition(
    rho_sr: &DensityMatrix,
    rho_srb: &DensityMatrix,
    dim_s: usize,
    dim_r: usize,
) -> Result<f64> {
    if rho_sr.dim() != rho_srb.dim() {
        return Err(Error::DimensionMismatch(format!("states of dimension {} and {}", rho_sr.dim(), rho_srb.dim())));
    }
    let d_sr = relative_entropy(rho_sr, rho_srb);
    let d_s = relative_entropy(&rho_sr.trace_second(dim_s, dim_r)?, &rho_srb.trace_second(dim_s, dim_r)?);
    Ok(d_sr - d_s)
}

/// One summand p_j ρ_{A_j} ⊗ σ_{B_j R} of a block decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub dim_a: usize,
    pub dim_b: usize,
    pub weight: f64,
    pub state_a: DensityMatrix,
    pub state_br: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    pub rho: DensityMatrix,
    pub dim_s: usize,
    pub dim_r: usize,
}

/// Assembles ⊕_j p_j ρ_{A_j} ⊗ σ_{B_j R} with system basis ordered block by block.
pub fn build_block_state(spec: &BlockSpec) -> Result<BlockState> {
    let first = spec.blocks.first().ok_or_else(|| Error::InvalidParameter("block spec is empty".into()))?;
    if first.dim_b == 0 {
        return Err(Error::DimensionMismatch("block with dim_b = 0".into()));
    }
    let dim_r = first.state_br.dim() / first.dim_b;
    let total: f64 = spec.blocks.iter().map(|b| b.weight).sum();
    if (total - 1.0).abs() > 1e-12 || spec.blocks.iter().any(|b| !(b.weight >= 0.0)) {
        return Err(Error::InvalidParameter(format!("block weights must be nonnegative and sum to 1, got {total}")));
    }
    for (j, b) in spec.blocks.iter().enumerate() {
        if b.state_a.dim() != b.dim_a || b.state_br.dim() != b.dim_b * dim_r {
            return Err(Error::DimensionMismatch(format!(
                "block {j}: states of dimension {} and {} for dim_a = {}, dim_b = {}, dim_r = {dim_r}",
                b.state_a.dim(),
                b.state_br.dim(),
                b.dim_a,
                b.dim_b
            )));
        }
    }
    let dim_s: usize = spec.blocks.iter().map(|b| b.dim_a * b.dim_b).sum();
    let mut rho = CMatrix::zeros(dim_s * dim_r, dim_s * dim_r);
    let mut offset = 0;
    for b in &spec.blocks {
        let piece = b.state_a.entries().kronecker(b.state_br.entries()) * C64::new(b.weight, 0.0);
        let size = b.dim_a * b.dim_b * dim_r;
        rho.view_mut((offset * dim_r, offset * dim_r), (size, size)).copy_from(&piece);
        offset += b.dim_a * b.dim_b;
    }
    Ok(BlockState { rho: DensityMatrix::new(rho)?, dim_s, dim_r })
}

/// Adds a coherence of Frobenius norm `amplitude` between basis states `i` and `j`.
pub fn add_coherence(rho: &DensityMatrix, i: usize, j: usize, amplitude: f64) -> Result<DensityMatrix> {
    if i == j || i.max(j) >= rho.dim() {
        return Err(Error::InvalidParameter(format!(
            "coherence indices ({i}, {j}) invalid for dimension {}",
            rho.dim()
        )));
    }
    let mut m = rho.entries().clone();
    let c = C64::new(amplitude / std::f64::consts::SQRT_2, 0.0);
    m[(i, j)] += c;
    m[(j, i)] += c;
    DensityMatrix::new(m)
}
