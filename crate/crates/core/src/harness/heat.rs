use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{hybrid_norm_l2, solution_norms, DecayTrace, DyadicPartition, HybridBesovSpec, NormKind};
use crate::error::{Error, Result};
use crate::harness::laws::{LawId, LawSpec};
use crate::harness::profile::{separable_trace, TimeGrid, TimeProfile};
use crate::harness::report::{GridReport, RatioReport, Refinement, TrialRecord};
use crate::maxwell::expm::phi_scalar;
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::{random_field_nested, Band, FrequencyLattice, SpectralField};

/// Trials of the forced heat equation `∂_t u - Δu = θ(t) W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatCheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub slopes: Vec<f64>,
    pub n: usize,
    pub length: f64,
    pub epsilon: f64,
    /// Coarse sampling; the refined level halves the step.
    pub time: TimeGrid,
}

impl Default for HeatCheckConfig {
    fn default() -> Self {
        Self::from(&LawSpec::new(LawId::HeatMaxreg))
    }
}

impl From<&LawSpec> for HeatCheckConfig {
    fn from(s: &LawSpec) -> Self {
        Self {
            trials: s.trials,
            seed: s.seed,
            slopes: s.slopes.clone(),
            n: s.grids[0],
            length: s.length,
            epsilon: s.epsilon,
            time: s.time,
        }
    }
}

impl HeatCheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("heat check needs at least one trial".into()));
        }
        if self.slopes.is_empty() {
            return Err(Error::Config("heat check needs at least one slope".into()));
        }
        self.time.validate()
    }
}

/// Per-shell sums `Σ|u⁰|²`, `Σ Re(u⁰·W̄)`, `Σ|W|²` of the data.
struct ShellSums {
    shells: Vec<u32>,
    lambda: Vec<f64>,
    uu: Vec<f64>,
    uw: Vec<f64>,
    ww: Vec<f64>,
}

fn shell_sums<T: Real>(u0: &SpectralField<T>, w: &SpectralField<T>) -> ShellSums {
    let lat = u0.lattice();
    let shells = lat.shells();
    let mut pos = vec![usize::MAX; lat.max_shell() as usize + 1];
    for (i, &s) in shells.iter().enumerate() {
        pos[s as usize] = i;
    }
    let k = shells.len();
    let (mut uu, mut uw, mut ww) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    for idx in 1..lat.len() {
        let i = pos[lat.shell(idx) as usize];
        let (a, b) = (u0.at(idx), w.at(idx));
        for c in 0..3 {
            let (ar, ai) = (a[c].re.as_f64(), a[c].im.as_f64());
            let (br, bi) = (b[c].re.as_f64(), b[c].im.as_f64());
            uu[i] += ar * ar + ai * ai;
            uw[i] += ar * br + ai * bi;
            ww[i] += br * br + bi * bi;
        }
    }
    let lambda = shells.iter().map(|&s| lat.shell_xi2(s).as_f64()).collect();
    ShellSums { shells, lambda, uu, uw, ww }
}

/// Trace of the exact solution of `∂_t u - Δu = θ(t) W`, `u(0) = u⁰`.
/// Each mode is integrated exactly with `θ` linearly interpolated between
/// samples.
pub fn heat_trace<T: Real>(
    part: &DyadicPartition,
    u0: &SpectralField<T>,
    w: &SpectralField<T>,
    profile: TimeProfile,
    grid: &TimeGrid,
    epsilon: f64,
) -> Result<DecayTrace> {
    check_same(u0.lattice(), w.lattice())?;
    grid.validate()?;
    let sums = shell_sums(u0, w);
    let h = grid.dt();
    let phis: Vec<(f64, f64, f64)> = sums.lambda.iter().map(|&l| phi_scalar(-l * h)).collect();
    let mut forced = vec![0.0; sums.shells.len()];
    let mut tr = DecayTrace::new(part, epsilon)?;
    let mut theta_prev = profile.at(0.0);
    for (j, t) in grid.times().enumerate() {
        if j > 0 {
            let theta = profile.at(t);
            for (i, f) in forced.iter_mut().enumerate() {
                let (e, p1, p2) = phis[i];
                *f = e * *f + h * ((p1 - p2) * theta_prev + p2 * theta);
            }
            theta_prev = theta;
        }
        let mut blocks = vec![0.0; part.len()];
        let mut total = 0.0;
        for (i, &s) in sums.shells.iter().enumerate() {
            let e = (-sums.lambda[i] * t).exp();
            let f = forced[i];
            let energy = (e * e * sums.uu[i] + 2.0 * e * f * sums.uw[i] + f * f * sums.ww[i]).max(0.0);
            total += energy;
            for &(q, wq) in part.shell_weights(s) {
                blocks[(q - part.q_min()) as usize] += wq * wq * energy;
            }
        }
        tr.push(t, blocks.into_iter().map(f64::sqrt).collect(), total.sqrt())?;
    }
    Ok(tr)
}

/// `(‖u‖_{𝒳1 ∩ L̃^∞Ḃ^{1/2}}, ‖u⁰‖_{Ḃ^{1/2}_{2,(∞,1)}} + ‖θW‖_{𝒴1})`.
pub fn heat_sides<T: Real>(
    part: &DyadicPartition,
    u0: &SpectralField<T>,
    w: &SpectralField<T>,
    profile: TimeProfile,
    grid: &TimeGrid,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let u = heat_trace(part, u0, w, profile, grid, epsilon)?;
    let f = separable_trace(part, w, &[profile], grid, epsilon)?;
    let lhs = solution_norms(&u, NormKind::Xfull)?;
    let rhs = hybrid_norm_l2(part, u0, &HybridBesovSpec::besov_inf1(0.5)) + solution_norms(&f, NormKind::Y1)?;
    Ok((lhs, rhs))
}

fn heat_profile(trial: usize, horizon: f64) -> TimeProfile {
    let windows = (horizon as usize / 2).max(1);
    match trial % 3 {
        0 => TimeProfile::Bump { start: (trial / 3 % windows) as f64, width: 1.0 },
        1 => TimeProfile::InverseSqrt,
        _ => TimeProfile::Bump { start: 0.0, width: 2.0 },
    }
}

/// Seeded `(u⁰, W, θ)` for heat trial `trial`.
pub fn heat_inputs(
    lattice: &crate::Lattice,
    seed: u64,
    trial: usize,
    slopes: &[f64],
    horizon: f64,
) -> Result<(SpectralField<f64>, SpectralField<f64>, TimeProfile)> {
    let base = seed.wrapping_mul(0x0100_0000_01b3) ^ ((trial as u64) << 8);
    let u0 = random_field_nested(lattice, slopes[trial % slopes.len()], base, true, Band::Half)?;
    let w = random_field_nested(lattice, slopes[(trial + 1) % slopes.len()], base | 1, true, Band::Half)?;
    Ok((u0, w, heat_profile(trial, horizon)))
}

/// Ratios of the maximal-regularity estimate at the configured step and at
/// half of it.
pub fn heat_maxreg_check(config: &HeatCheckConfig) -> Result<RatioReport> {
    config.validate()?;
    let lat = FrequencyLattice::<f64>::new(config.n, config.length)?;
    let part = DyadicPartition::build(&lat)?;
    let fine_time = TimeGrid { per_unit: 2 * config.time.per_unit, ..config.time };
    let records = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let (u0, w, prof) = heat_inputs(&lat, config.seed, i, &config.slopes, config.time.horizon)?;
            let (l0, r0) = heat_sides(&part, &u0, &w, prof, &config.time, config.epsilon)?;
            let (l1, r1) = heat_sides(&part, &u0, &w, prof, &fine_time, config.epsilon)?;
            Ok((TrialRecord::new(i, l0, r0), TrialRecord::new(i, l1, r1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (coarse, fine): (Vec<_>, Vec<_>) = records.into_iter().unzip();
    Ok(RatioReport {
        law: LawId::HeatMaxreg,
        coarse: GridReport::from_trials(format!("dt=1/{}", config.time.per_unit), coarse),
        fine: GridReport::from_trials(format!("dt=1/{}", fine_time.per_unit), fine),
        rule: Refinement::Within { tol: 0.05 },
    })
}
