//! Exact truncated-Fock and finite-dimensional oracles: the equilibrium
//! state of the system–oscillator pair, direct master-equation integration,
//! relative entropies and the Petz recovery map.

pub mod density;
pub mod fock;
pub mod lindblad;
pub mod petz;

pub use density::{
    hermitian_function, partial_trace_first, partial_trace_second, relative_entropy, sqrt_psd, CMatrix, DensityMatrix,
};
pub use fock::{
    single_mode_covariance, squeezed_vacuum_fock, thermal_fock, top_levels_population, truncated_so_gibbs,
    TruncatedGibbs,
};
pub use lindblad::{lindblad_evolve_truncated, LindbladSpec};
pub use petz::{
    add_coherence, build_block_state, gibbs_state, petz_map, verify_thermo_initial_condition, Block, BlockSpec,
    BlockState,
};
