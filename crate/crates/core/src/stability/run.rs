use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{decay_fit, solution_norms, DecayFit, DecayTrace, DyadicPartition, HybridBesovSpec, NormKind, SumExp};
use crate::error::{Error, Result};
use crate::evolution::{evolve_observed, Forcing, Integrator, IntegratorConfig, Scheme};
use crate::periodic::{picard_fixed_point, PeriodicTriple, PicardConfig, PicardReport};
use crate::physics::{EMState, Physics};
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::{random_field, Band, LatticeRef};
use crate::stability::nonlinearity::error_rhs;

/// A time-periodic solution together with the forcing that sustains it.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit<T: Real> {
    pub solution: PeriodicTriple<T>,
    pub forcing: PeriodicTriple<T>,
    pub physics: Physics,
}

impl<T: Real> PeriodicOrbit<T> {
    pub fn new(solution: PeriodicTriple<T>, forcing: PeriodicTriple<T>, physics: Physics) -> Result<Self> {
        solution.u.check_compatible(&forcing.u)?;
        physics.validate()?;
        Ok(Self { solution, forcing, physics })
    }

    /// Solves for the orbit sustained by `forcing` by Picard iteration;
    /// fails unless the iteration converges.
    pub fn solve(forcing: PeriodicTriple<T>, physics: Physics, config: PicardConfig) -> Result<(Self, PicardReport)> {
        let part = DyadicPartition::build(forcing.u.lattice())?;
        let (solution, report) = picard_fixed_point(&forcing, physics, config, &part)?;
        if !report.converged {
            return Err(Error::Config(format!(
                "periodic orbit did not converge: {:?} after {} iterations",
                report.status, report.iterations
            )));
        }
        Ok((Self { solution, forcing, physics }, report))
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        self.solution.u.lattice()
    }

    /// State at time `t` by exact time-Fourier summation.
    pub fn state_at(&self, t: f64) -> EMState<T> {
        EMState {
            u: self.solution.u.sample(t),
            e: self.solution.e.sample(t),
            b: self.solution.b.sample(t),
            physics: self.physics,
            time: t,
        }
    }
}

/// Parameters of a perturbation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub seed: u64,
    /// Size of the perturbation in the `Ḃ^{1/2}_{2,(∞,1)} × H^{1/2} × H^{1/2}` norm.
    pub amplitude: f64,
    pub horizon: f64,
    pub epsilon: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Spectral slope of the random perturbation.
    pub slope: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self { seed: 1, amplitude: 1e-2, horizon: 64.0, epsilon: 0.1, dt: 1.0 / 32.0, scheme: Scheme::Etd2rk, slope: 3.0 }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Config(format!("amplitude must be nonnegative, got {}", self.amplitude)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        self.integrator().validate()
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            scheme: self.scheme,
            band: Band::Half,
            horizon: self.horizon,
            cadence: self.dt,
            nonlinear: true,
        }
    }
}

/// `‖u‖_{Ḃ^{1/2}_{2,(∞,1)}} + ‖E‖_{H^{1/2}} + ‖B‖_{H^{1/2}}`.
pub fn data_norm<T: Real>(part: &DyadicPartition, s: &EMState<T>) -> f64 {
    let b = HybridBesovSpec::besov_inf1(0.5);
    let h = HybridBesovSpec::sobolev(0.0, 0.5);
    b.combine(part.q_min(), &crate::dyadic::block_l2_norms(part, &s.u))
        + h.combine(part.q_min(), &crate::dyadic::block_l2_norms(part, &s.e))
        + h.combine(part.q_min(), &crate::dyadic::block_l2_norms(part, &s.b))
}

/// Seeded random perturbation with divergence-free `u` and `B`, scaled to
/// `amplitude` in [`data_norm`].
pub fn perturbation<T: Real>(
    lattice: &LatticeRef<T>,
    physics: Physics,
    seed: u64,
    slope: f64,
    amplitude: f64,
) -> Result<EMState<T>> {
    let part = DyadicPartition::build(lattice)?;
    let base = seed.wrapping_mul(3);
    let mut s = EMState::new(
        random_field(lattice, slope, base, true, Band::Half)?,
        random_field(lattice, slope, base + 1, false, Band::Half)?,
        random_field(lattice, slope, base + 2, true, Band::Half)?,
        physics,
    )?;
    for f in [&mut s.u, &mut s.e, &mut s.b] {
        f.clear_zero_mode();
    }
    let n = data_norm(&part, &s);
    if n == 0.0 {
        return Err(Error::Degenerate { xi_norm: 0.0 });
    }
    let a = T::lit(amplitude / n);
    for f in [&mut s.u, &mut s.e, &mut s.b] {
        f.scale(a);
    }
    Ok(s)
}

/// Error traces of a perturbation experiment.
#[derive(Debug, Clone)]
pub struct StabilityRun {
    pub config: StabilityConfig,
    /// Measured data norm of the perturbation.
    pub perturbation_norm: f64,
    /// Block-norm traces of the error `u`, `E`, `B` at every step.
    pub traces: [DecayTrace; 3],
    pub blow_up: Option<f64>,
}

/// Per-component decay diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentDecay {
    pub component: &'static str,
    /// Weighted-decay norm of the component (`X1+L∞B`, `X2`, `X3`).
    pub x_norm: f64,
    /// Unweighted window norms `‖·‖_{L²(n,n+1; L²)}`.
    pub window_norms: Vec<f64>,
    /// `(n+1)^{(1-ε)/2}` times the window norm in the component's block space.
    pub weighted: Vec<f64>,
    pub weighted_sup: f64,
    pub argmax_window: usize,
    pub fit: DecayFit,
}

impl ComponentDecay {
    pub fn initial(&self) -> f64 {
        self.window_norms.first().copied().unwrap_or(0.0)
    }

    pub fn terminal(&self) -> f64 {
        self.window_norms.last().copied().unwrap_or(0.0)
    }
}

const COMPONENTS: [&str; 3] = ["u", "E", "B"];

fn component_spec(i: usize) -> HybridBesovSpec {
    match i {
        0 => HybridBesovSpec::new(1.5, 1.5, SumExp::Infinity, SumExp::One),
        1 => HybridBesovSpec::sobolev(0.0, 0.5),
        _ => HybridBesovSpec::sobolev(1.0, 0.5),
    }
}

/// Decay diagnostics of one component trace (`0 = u`, `1 = E`, `2 = B`).
pub fn component_decay(i: usize, trace: &DecayTrace) -> Result<ComponentDecay> {
    let kind = [NormKind::Xfull, NormKind::X2, NormKind::X3][i];
    let eps = trace.epsilon();
    let spec = component_spec(i);
    let windows = trace.window_count();
    let weighted: Vec<f64> = (0..windows)
        .map(|n| (n as f64 + 1.0).powf(0.5 * (1.0 - eps)) * spec.combine(trace.q_min(), &trace.window_block_l2(n)))
        .collect();
    let (argmax_window, weighted_sup) =
        weighted.iter().copied().enumerate().fold((0, 0.0f64), |acc, (n, v)| if v > acc.1 { (n, v) } else { acc });
    let window_norms = trace.window_norms();
    Ok(ComponentDecay {
        component: COMPONENTS[i],
        x_norm: solution_norms(trace, kind)?,
        fit: decay_fit(&window_norms, eps)?,
        window_norms,
        weighted,
        weighted_sup,
        argmax_window,
    })
}

/// Fit of a trace's window norms.
pub fn fit_trace(trace: &DecayTrace) -> Result<DecayFit> {
    decay_fit(&trace.window_norms(), trace.epsilon())
}

impl StabilityRun {
    pub fn components(&self) -> Result<Vec<ComponentDecay>> {
        (0..3).map(|i| component_decay(i, &self.traces[i])).collect()
    }

    /// Unweighted window norms of the whole error `(u, E, B)`.
    pub fn total_window_norms(&self) -> Vec<f64> {
        let w: Vec<Vec<f64>> = self.traces.iter().map(|t| t.window_norms()).collect();
        (0..w[0].len()).map(|n| (w[0][n].powi(2) + w[1][n].powi(2) + w[2][n].powi(2)).sqrt()).collect()
    }
}

/// Evolves `Γ_per(0) + Γ⁰_err` with the orbit's forcing (no forcing when
/// `orbit` is `None`) and records `Γ_err(t) = Γ̄(t) - Γ_per(t)`. A blow-up
/// ends the run and is reported with the partial traces.
pub fn perturb_and_run<T: Real>(
    orbit: Option<&PeriodicOrbit<T>>,
    lattice: &LatticeRef<T>,
    physics: Physics,
    config: &StabilityConfig,
) -> Result<StabilityRun> {
    config.validate()?;
    let err0 = perturbation(lattice, physics, config.seed, config.slope, config.amplitude)?;
    let part = DyadicPartition::build(lattice)?;
    let per_at = |t: f64| match orbit {
        Some(o) => o.state_at(t),
        None => EMState::zeros(lattice, physics),
    };
    let forcing = match orbit {
        Some(o) => {
            check_same(o.lattice(), lattice)?;
            Forcing::Periodic(o.forcing.clone())
        }
        None => Forcing::None,
    };
    let mut start = per_at(0.0).add(&err0)?;
    start.physics = physics;
    let mk = || DecayTrace::new(&part, config.epsilon);
    let mut traces = [mk()?, mk()?, mk()?];
    let (_, _, _, blow_up) = evolve_observed(&start, &forcing, &config.integrator(), config.epsilon, |s| {
        let mut per = per_at(s.time);
        per.truncate(Band::Half);
        let d = s.sub(&per)?;
        traces[0].record(&part, s.time, &d.u)?;
        traces[1].record(&part, s.time, &d.e)?;
        traces[2].record(&part, s.time, &d.b)
    })?;
    Ok(StabilityRun { config: *config, perturbation_norm: data_norm(&part, &err0), traces, blow_up })
}

/// Runs several seeds in parallel; results are ordered as `seeds`.
pub fn perturb_and_run_many<T: Real>(
    orbit: Option<&PeriodicOrbit<T>>,
    lattice: &LatticeRef<T>,
    physics: Physics,
    config: &StabilityConfig,
    seeds: &[u64],
) -> Result<Vec<StabilityRun>> {
    seeds
        .par_iter()
        .map(|&seed| perturb_and_run(orbit, lattice, physics, &StabilityConfig { seed, ..*config }))
        .collect()
}

/// Integrates the error equation `Γ' = AΓ + N(Γ; Γ_per(t))` directly.
pub fn integrate_error<T: Real>(
    orbit: Option<&PeriodicOrbit<T>>,
    err0: &EMState<T>,
    config: &IntegratorConfig,
) -> Result<EMState<T>> {
    let physics = err0.physics;
    let integ = Integrator::new(err0.lattice(), physics, *config)?;
    let mut y = [err0.u.truncated(config.band), err0.e.truncated(config.band), err0.b.truncated(config.band)];
    for f in y.iter_mut() {
        f.clear_zero_mode();
    }
    let t0 = err0.time;
    for n in 0..config.steps() {
        let t = t0 + n as f64 * config.dt;
        y = integ.step_with(&y, t, |s, t| {
            let per = orbit.map(|o| o.state_at(t));
            error_rhs(&s[0], &s[1], &s[2], per.as_ref(), physics.sigma, config.band)
        })?;
    }
    let [u, e, b] = y;
    Ok(EMState { u, e, b, physics, time: t0 + config.horizon })
}
