//! Time-periodic solutions: explicit per-mode linear solve, Picard fixed
//! point with time collocation, and the resonance constants of the solve.

pub mod constants;
pub mod energy;
pub mod linear;
pub mod picard;
pub mod profile;

pub use constants::{
    alpha_beta_sup, alpha_sum, beta0_bound, beta_sum, default_t_grid, resonance_constants, resonance_constants_for,
    resonance_sums, AlphaBeta, EvaluationGrid, ResonanceConstants, TailedSum, ALPHA0_BOUND,
};
pub use energy::{energy_cross_check, EnergyCrossCheck};
pub use linear::{
    linear_periodic_solve, periodic_residual, resonance_margin, solve_mode, ModeSolve, PeriodicResidual, PeriodicTriple,
};
pub use picard::{
    assemble_picard_forcing, calibrate_forcing, nonlinear_residual, picard_fixed_point, picard_map, xtilde_norm, xtilde_norms,
    PicardConfig, PicardReport, PicardStatus, SOLVER_BAND,
};
pub use profile::{random_profile, PeriodicProfile};
