//! One module per subcommand. Each `run` writes its artifacts and returns
//! whether every property check passed.

pub mod constants;
pub mod evolve;
pub mod periodic;
pub mod spectral;
pub mod stability;
pub mod verify;

use nsmx::dyadic::DyadicPartition;
use nsmx::periodic::{calibrate_forcing, random_profile, PeriodicTriple, SOLVER_BAND};
use nsmx::physics::Physics;
use nsmx::spectral::FrequencyLattice;
use nsmx::Lattice;

use crate::config::{ForceSpec, GridConfig};
use crate::error::CliError;
use crate::output::OutDir;

pub fn lattice(grid: &GridConfig) -> Result<Lattice, CliError> {
    Ok(FrequencyLattice::new(grid.n, grid.length)?)
}

/// Seeded forcing with `spec.k_max` time modes, padded to `k_max`, and
/// calibrated when `spec.target` is set.
pub fn seeded_forcing(
    lat: &Lattice,
    physics: Physics,
    period: f64,
    k_max: usize,
    spec: &ForceSpec,
    seed: u64,
) -> Result<PeriodicTriple<f64>, CliError> {
    let k = spec.k_max.min(k_max);
    let prof = |s: u64, div_free: bool| -> Result<_, CliError> {
        Ok(random_profile(lat, period, k, spec.slope, s, div_free, SOLVER_BAND, spec.amplitude)?.resized(k_max))
    };
    let raw = PeriodicTriple::new(prof(seed, false)?, prof(seed + 1000, false)?, prof(seed + 2000, true)?)?;
    match spec.target {
        Some(target) => {
            let part = DyadicPartition::build(lat)?;
            Ok(calibrate_forcing(&raw, physics, &part, target)?.0)
        }
        None => Ok(raw),
    }
}

/// Writes the modes of a periodic triple as one snapshot: `u`, then `E`,
/// then `B`, each ordered `k = -K..=K`.
pub fn write_triple(out: &OutDir, name: &str, p: &PeriodicTriple<f64>) -> Result<(), CliError> {
    let fields: Vec<&nsmx::Field> = p.parts().iter().flat_map(|prof| prof.modes().iter()).collect();
    out.write_snapshot(name, &fields)
}
