//! Numerical verification lab for bilinear form inequalities of symmetric
//! contraction operators on finite discrete measure spaces.
//!
//! The crate builds finite measure spaces and kernel operators on them,
//! classifies operators (symmetric, Dunford-Schwartz, sub-Markovian,
//! Markovian), represents the bilinear form `(f, g) -> pair(Tf, g)` as a
//! measure on the product space, disintegrates `Id - T` into a diagonal part
//! plus two-point blocks, and certifies the resulting form inequalities --
//! including the optimal angle of L^p analyticity -- on randomized and
//! structured instances at pinned tolerances.

pub mod bilinear;
pub mod error;
pub mod forms;
pub mod io;
pub mod numerics;
pub mod operator;
pub mod semigroup;
pub mod space;
pub mod suites;

pub use error::{Error, EvalError, Result};
pub use operator::{c2_membership, e_lambda, random_symmetric_contraction, KernelOperator,
    OperatorClass, RandomClass, DEFAULT_TOL};
pub use space::{CFunction, Exponent, FiniteMeasureSpace};

/// Version string embedded in reports: `git describe` output when the build
/// happened inside a git checkout, the crate version otherwise.
pub const VERSION: &str = env!("FORMLAB_GIT_VERSION");
