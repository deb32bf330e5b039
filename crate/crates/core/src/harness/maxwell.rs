use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{hybrid_norm_l2, solution_norms, DecayTrace, DyadicPartition, HybridBesovSpec, NormKind};
use crate::error::{Error, Result};
use crate::harness::laws::{LawId, LawSpec};
use crate::harness::profile::{separable_trace, TimeGrid, TimeProfile};
use crate::harness::report::{GridReport, RatioReport, Refinement, TrialRecord};
use crate::maxwell::{PhiKind, SemigroupCache};
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::{random_field_nested, Band, FrequencyLattice, LatticeRef, SpectralField};

/// Trials of the damped Maxwell system forced by `θ(t) W` in the electric
/// equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxwellCheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub slopes: Vec<f64>,
    pub grids: [usize; 2],
    pub length: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub time: TimeGrid,
}

impl Default for MaxwellCheckConfig {
    fn default() -> Self {
        Self::from(&LawSpec::new(LawId::MaxwellDecay))
    }
}

impl From<&LawSpec> for MaxwellCheckConfig {
    fn from(s: &LawSpec) -> Self {
        Self {
            trials: s.trials,
            seed: s.seed,
            slopes: s.slopes.clone(),
            grids: s.grids,
            length: s.length,
            sigma: 1.0,
            epsilon: s.epsilon,
            time: s.time,
        }
    }
}

impl MaxwellCheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("maxwell check needs at least one trial".into()));
        }
        if self.slopes.is_empty() {
            return Err(Error::Config("maxwell check needs at least one slope".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        self.time.validate()
    }
}

/// Traces of `(E, B)` for `E(0) = e0`, `B(0) = b0` and electric forcing
/// `θ(t) W`. The free part is propagated exactly; the forcing integral is
/// exact for `θ` linear between samples.
pub fn maxwell_traces<T: Real>(
    part: &DyadicPartition,
    e0: &SpectralField<T>,
    b0: &SpectralField<T>,
    w: &SpectralField<T>,
    profile: TimeProfile,
    grid: &TimeGrid,
    sigma: f64,
    epsilon: f64,
) -> Result<[DecayTrace; 2]> {
    let lat = e0.lattice();
    check_same(lat, b0.lattice())?;
    check_same(lat, w.lattice())?;
    grid.validate()?;
    let h = grid.dt();
    let cache = SemigroupCache::new(lat, h, sigma);
    let zero = SpectralField::zeros(lat);
    let forced = w.max_abs() > T::zero();
    let (p1, p2) = if forced {
        (cache.apply(PhiKind::Phi1, w, &zero)?, cache.apply(PhiKind::Phi2, w, &zero)?)
    } else {
        ((zero.clone(), zero.clone()), (zero.clone(), zero.clone()))
    };
    let mut e = e0.clone();
    let mut b = b0.clone();
    let mut te = DecayTrace::new(part, epsilon)?;
    let mut tb = DecayTrace::new(part, epsilon)?;
    let mut theta_prev = profile.at(0.0);
    for (j, t) in grid.times().enumerate() {
        if j > 0 {
            let theta = profile.at(t);
            let (en, bn) = cache.apply(PhiKind::Exp, &e, &b)?;
            e = en;
            b = bn;
            if forced {
                let a1 = T::lit(h * theta_prev);
                let a2 = T::lit(h * (theta - theta_prev));
                e.axpy(a1, &p1.0);
                b.axpy(a1, &p1.1);
                e.axpy(a2, &p2.0);
                b.axpy(a2, &p2.1);
            }
            theta_prev = theta;
        }
        te.record(part, t, &e)?;
        tb.record(part, t, &b)?;
    }
    Ok([te, tb])
}

/// `(‖E‖_{𝒳2} + ‖B‖_{𝒳3}, ‖E⁰‖_{H^{1/2}} + ‖B⁰‖_{H^{1/2}} + ‖θW‖_{𝒴2})`.
#[allow(clippy::too_many_arguments)]
pub fn maxwell_sides<T: Real>(
    part: &DyadicPartition,
    e0: &SpectralField<T>,
    b0: &SpectralField<T>,
    w: &SpectralField<T>,
    profile: TimeProfile,
    grid: &TimeGrid,
    sigma: f64,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let [te, tb] = maxwell_traces(part, e0, b0, w, profile, grid, sigma, epsilon)?;
    let g = separable_trace(part, w, &[profile], grid, epsilon)?;
    let h = HybridBesovSpec::sobolev(0.0, 0.5);
    let lhs = solution_norms(&te, NormKind::X2)? + solution_norms(&tb, NormKind::X3)?;
    let rhs = hybrid_norm_l2(part, e0, &h) + hybrid_norm_l2(part, b0, &h) + solution_norms(&g, NormKind::Y2)?;
    Ok((lhs, rhs))
}

/// Seeded `(E⁰, B⁰, W, θ)` for Maxwell trial `trial`.
pub fn maxwell_inputs<T: Real>(
    lattice: &LatticeRef<T>,
    seed: u64,
    trial: usize,
    slopes: &[f64],
) -> Result<(SpectralField<T>, SpectralField<T>, SpectralField<T>, TimeProfile)> {
    let base = seed.wrapping_mul(0x0100_0000_01b3) ^ ((trial as u64) << 8) ^ 0x4d;
    let slope = |k: usize| slopes[(trial + k) % slopes.len()];
    let e0 = random_field_nested(lattice, slope(0), base, false, Band::Half)?;
    let b0 = random_field_nested(lattice, slope(1), base ^ 0x100, true, Band::Half)?;
    let w = random_field_nested(lattice, slope(2), base ^ 0x200, false, Band::Half)?;
    let profile = match trial % 3 {
        0 => TimeProfile::InverseSqrt,
        1 => TimeProfile::Bump { start: (trial % 4) as f64, width: 2.0 },
        _ => TimeProfile::Constant,
    };
    Ok((e0, b0, w, profile))
}

fn run_level(config: &MaxwellCheckConfig, n: usize) -> Result<GridReport> {
    let lat = FrequencyLattice::<f64>::new(n, config.length)?;
    let part = DyadicPartition::build(&lat)?;
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let (e0, b0, w, prof) = maxwell_inputs(&lat, config.seed, i, &config.slopes)?;
            let (l, r) = maxwell_sides(&part, &e0, &b0, &w, prof, &config.time, config.sigma, config.epsilon)?;
            Ok(TrialRecord::new(i, l, r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport::from_trials(format!("n={n}"), trials))
}

/// Ratios of the damped Maxwell decay estimate on the coarse and fine grid.
pub fn maxwell_decay_check(config: &MaxwellCheckConfig) -> Result<RatioReport> {
    config.validate()?;
    let coarse = run_level(config, config.grids[0])?;
    let fine = run_level(config, config.grids[1])?;
    Ok(RatioReport { law: LawId::MaxwellDecay, coarse, fine, rule: Refinement::Within { tol: 0.10 } })
}
