//! Shared numerical machinery: dense complex linear algebra with explicit
//! summation order, the matrix exponential, Gauss-Laguerre quadrature and
//! derivative-free minimizers.

pub mod expm;
pub mod gauss_laguerre;
pub mod linalg;
pub mod nelder_mead;

pub use expm::expm;
pub use gauss_laguerre::gauss_laguerre;
pub use linalg::{identity, inf_norm, mat_mul, max_abs, one_norm, solve, spectral_norm_estimate};
pub use nelder_mead::{golden_section_min, nelder_mead};
