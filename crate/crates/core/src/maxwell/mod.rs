//! Damped Maxwell operator: per-mode eigen-decomposition, exact semigroup,
//! Duhamel formula and cached propagators.

pub mod bounds;
pub mod duhamel;
pub mod expm;
pub mod mode;
pub mod propagator;

pub use bounds::{verify_lambda_bounds, LambdaBoundsReport, ShellSpectrum};
pub use duhamel::{duhamel_magnetic, duhamel_magnetic_direct, duhamel_magnetic_sigma};
pub use mode::{
    eigen_pair, eigen_pair_sigma, mode_decompose, mode_decompose_sigma, semigroup_apply, semigroup_apply_sigma,
    ModeDecomposition,
};
pub use propagator::{semigroup_apply_fields, PhiKind, SemigroupCache};
