//! Initial-value integration with exact heat and damped Maxwell
//! propagators, exponential time differencing for the remaining terms, and
//! energy bookkeeping.

pub mod energy;
pub mod integrator;
pub mod run;

pub use energy::{energy_report, energy_sample, EnergyLedger, EnergyRow};
pub use integrator::{etd_step, rhs_nonlinear, rhs_on, ForceFields, Forcing, Integrator, IntegratorConfig, Scheme};
pub use run::{evolve, evolve_observed, EvolutionRun};
