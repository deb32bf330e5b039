//! Perturbations of a periodic orbit: the error nonlinearity, perturbed
//! runs with decay diagnostics, and the contraction probe of the Duhamel
//! map on error trajectories.

pub mod nonlinearity;
pub mod probe;
pub mod run;

pub use crate::dyadic::{decay_fit, DecayFit};
pub use nonlinearity::{error_nonlinearity, error_rhs, ErrorNonlinearity, ErrorTerm, Target};
pub use probe::{contraction_probe, contraction_threshold, seeded_probe, x_norm, Candidate, ProbeConfig, ProbeResult, ThresholdScan};
pub use run::{
    component_decay, data_norm, fit_trace, integrate_error, perturb_and_run, perturb_and_run_many, perturbation,
    ComponentDecay, PeriodicOrbit, StabilityConfig, StabilityRun,
};
