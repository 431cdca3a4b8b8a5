//! Numerical engines shared by the physics modules.

pub mod ilt;
pub mod ode;
pub mod quadrature;

pub use ilt::{boxcar_factor, complex_exp_m1, inverse_laplace, IltMethod, IltSpec};
pub use ode::{propagate, propagate_on_grid, solve_dense, uniform_grid, OdeSpec, PropagatorSample};
pub use quadrature::{integrate, integrate_half_line, integrate_tail, Estimate, Integrand, QuadratureSpec};
