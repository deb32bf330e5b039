use crate::dyadic::{DecayTrace, DyadicPartition};
use crate::error::{Error, Result};
use crate::evolution::energy::{energy_report, energy_sample, EnergyLedger};
use crate::evolution::integrator::{Forcing, Integrator, IntegratorConfig};
use crate::physics::EMState;
use crate::scalar::Real;

/// Output of [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolutionRun<T: Real> {
    /// Last finite state.
    pub last: EMState<T>,
    /// States at every cadence point, starting with the initial state.
    pub snapshots: Vec<EMState<T>>,
    pub ledger: EnergyLedger,
    /// Block-norm traces of `u`, `E`, `B` at cadence points.
    pub traces: [DecayTrace; 3],
    /// Time of the first non-finite step, if any.
    pub blow_up: Option<f64>,
}

/// Runs the integrator from `state0` (truncated to the configured band),
/// calling `observe` on the state at every cadence point.
pub fn evolve_observed<T: Real, F>(
    state0: &EMState<T>,
    forcing: &Forcing<T>,
    config: &IntegratorConfig,
    epsilon: f64,
    mut observe: F,
) -> Result<(EMState<T>, EnergyLedger, [DecayTrace; 3], Option<f64>)>
where
    F: FnMut(&EMState<T>) -> Result<()>,
{
    let integ = Integrator::new(state0.lattice(), state0.physics, *config)?;
    let part = DyadicPartition::build(state0.lattice())?;
    let mut traces = [DecayTrace::new(&part, epsilon)?, DecayTrace::new(&part, epsilon)?, DecayTrace::new(&part, epsilon)?];
    let mut state = state0.clone();
    state.truncate(config.band);
    state.u.clear_zero_mode();
    state.e.clear_zero_mode();
    state.b.clear_zero_mode();
    let t0 = state.time;
    let mut rows = vec![energy_sample(&state, forcing.at(t0).as_ref(), config.band)];
    let record = |traces: &mut [DecayTrace; 3], s: &EMState<T>| -> Result<()> {
        let t = s.time - t0;
        traces[0].record(&part, t, &s.u)?;
        traces[1].record(&part, t, &s.e)?;
        traces[2].record(&part, t, &s.b)?;
        Ok(())
    };
    record(&mut traces, &state)?;
    observe(&state)?;
    let stride = config.stride();
    let mut blow_up = None;
    for n in 1..=config.steps() {
        match integ.step(&state, forcing) {
            Ok(mut next) => {
                next.time = t0 + n as f64 * config.dt;
                state = next;
            }
            Err(Error::BlowUp { time }) => {
                blow_up = Some(time);
                break;
            }
            Err(e) => return Err(e),
        }
        rows.push(energy_sample(&state, forcing.at(state.time).as_ref(), config.band));
        if n % stride == 0 {
            record(&mut traces, &state)?;
            observe(&state)?;
        }
    }
    let ledger = energy_report(&rows, state0.physics.nu, state0.physics.sigma)?;
    Ok((state, ledger, traces, blow_up))
}

/// Runs the integrator and keeps every cadence snapshot in memory.
pub fn evolve<T: Real>(
    state0: &EMState<T>,
    forcing: &Forcing<T>,
    config: &IntegratorConfig,
    epsilon: f64,
) -> Result<EvolutionRun<T>> {
    let mut snapshots = Vec::new();
    let (last, ledger, traces, blow_up) = evolve_observed(state0, forcing, config, epsilon, |s| {
        snapshots.push(s.clone());
        Ok(())
    })?;
    Ok(EvolutionRun { last, snapshots, ledger, traces, blow_up })
}
