use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{block_l2_norms, hybrid_norm_l2, DyadicPartition, HybridBesovSpec};
use crate::error::{Error, Result};
use crate::periodic::linear::{linear_periodic_solve, periodic_residual, PeriodicTriple};
use crate::periodic::profile::PeriodicProfile;
use crate::physics::{nonlinear_terms, Physics};
use crate::scalar::Real;
use crate::spectral::{Band, SpectralField};

/// Spatial band on which periodic iterates live.
pub const SOLVER_BAND: Band = Band::Half;

/// Stopping rule of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    /// Relative tolerance on successive differences in the `X̃` norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardStatus {
    Converged,
    MaxIter,
    Diverged,
}

/// Iteration history.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// `‖Γ_{n+1} - Γ_n‖_X̃` for each iteration.
    pub diffs: Vec<f64>,
    /// `‖Γ_{n+1}‖_X̃` for each iteration.
    pub norms: Vec<f64>,
    /// `diffs[n] / diffs[n-1]`.
    pub contraction: Vec<f64>,
    pub status: PicardStatus,
    pub converged: bool,
    /// Relative residual of the full nonlinear system at the last iterate.
    pub residual: f64,
    /// `‖Γ - S(N(Γ))‖_X̃ / ‖Γ‖_X̃` at the last iterate.
    pub fixed_point_defect: f64,
}

impl PicardReport {
    pub fn max_contraction(&self) -> f64 {
        self.contraction.iter().copied().fold(0.0, f64::max)
    }
}

/// Discrete `X̃` norms of a periodic triple: `u` in
/// `L̃^∞ Ḃ^{1/2}_{2,(∞,1)} ∩ L̃^2 Ḃ^{3/2}_{2,(∞,1)}`, `E` and `B` in
/// `L^∞ H^{1/2}`, with time suprema over collocation samples.
pub fn xtilde_norms<T: Real>(part: &DyadicPartition, p: &PeriodicTriple<T>) -> [f64; 3] {
    let samples_u = p.u.samples();
    let samples_e = p.e.samples();
    let samples_b = p.b.samples();
    let q_min = part.q_min();
    let nb = part.len();
    let b_half = HybridBesovSpec::besov_inf1(0.5);
    let b_3half = HybridBesovSpec::besov_inf1(1.5);
    let h_half = HybridBesovSpec::sobolev(0.0, 0.5);
    let sup = |v: &[SpectralField<T>], spec: &HybridBesovSpec| {
        v.par_iter().map(|f| hybrid_norm_l2(part, f, spec)).reduce(|| 0.0, f64::max)
    };
    let mut blocks_sq = vec![0.0f64; nb];
    for f in p.u.modes() {
        for (a, x) in blocks_sq.iter_mut().zip(block_l2_norms(part, f)) {
            *a += x * x;
        }
    }
    let t = p.period();
    let time_l2: Vec<f64> = blocks_sq.iter().map(|x| (t * x).sqrt()).collect();
    let xu = sup(&samples_u, &b_half) + b_3half.combine(q_min, &time_l2);
    [xu, sup(&samples_e, &h_half), sup(&samples_b, &h_half)]
}

/// Sum of the three `X̃` norms.
pub fn xtilde_norm<T: Real>(part: &DyadicPartition, p: &PeriodicTriple<T>) -> f64 {
    xtilde_norms(part, p).iter().sum()
}

/// Forcing of the next Picard step,
/// `F_n = ℙ(-div(U⊗U) + J×B + F)`, `G_n = -σU×B + G`, `H_n = H`
/// with `J = σ(E + U×B)`, evaluated by collocation in time on
/// `N_t ≥ 4K+1` samples and truncated to `|k| ≤ K`.
pub fn assemble_picard_forcing<T: Real>(
    state: &PeriodicTriple<T>,
    external: &PeriodicTriple<T>,
    physics: Physics,
) -> Result<PeriodicTriple<T>> {
    state.u.check_compatible(&external.u)?;
    state.u.check_compatible(&state.e)?;
    state.u.check_compatible(&state.b)?;
    let k_max = state.k_max();
    let n_t = state.u.collocation();
    if n_t < 4 * k_max + 1 {
        return Err(Error::Aliasing(format!("{n_t} collocation times cannot dealias cubic terms with K = {k_max}")));
    }
    let period = state.period();
    let su = state.u.samples();
    let se = state.e.samples();
    let sb = state.b.samples();
    let nl: Vec<_> = (0..n_t)
        .into_par_iter()
        .map(|j| nonlinear_terms(&su[j], &se[j], &sb[j], physics.sigma, SOLVER_BAND))
        .collect::<Result<_>>()?;
    let (nu_s, ne_s): (Vec<_>, Vec<_>) = nl.into_iter().map(|n| (n.n_u, n.n_e)).unzip();
    let mut f = PeriodicProfile::from_samples(period, k_max, &nu_s)?.with_collocation(n_t);
    let mut g = PeriodicProfile::from_samples(period, k_max, &ne_s)?.with_collocation(n_t);
    let mut fe = external.u.truncated(SOLVER_BAND);
    fe.clear_zero_mode();
    fe.project_solenoidal();
    f.axpy(T::one(), &fe.with_collocation(n_t))?;
    let mut ge = external.e.truncated(SOLVER_BAND);
    ge.clear_zero_mode();
    g.axpy(T::one(), &ge.with_collocation(n_t))?;
    let mut h = external.b.truncated(SOLVER_BAND).with_collocation(n_t);
    h.clear_zero_mode();
    PeriodicTriple::new(f, g, h)
}

/// One application of `Γ ↦ S(N(Γ))`.
pub fn picard_map<T: Real>(
    state: &PeriodicTriple<T>,
    external: &PeriodicTriple<T>,
    physics: Physics,
) -> Result<PeriodicTriple<T>> {
    let n = assemble_picard_forcing(state, external, physics)?;
    linear_periodic_solve(&n.u, &n.e, &n.b, physics)
}

/// Relative residual of the full nonlinear periodic system at `state`.
pub fn nonlinear_residual<T: Real>(
    state: &PeriodicTriple<T>,
    external: &PeriodicTriple<T>,
    physics: Physics,
) -> Result<f64> {
    let n = assemble_picard_forcing(state, external, physics)?;
    Ok(periodic_residual(state, &n, physics)?.max())
}

/// Picard iteration `Γ_{n+1} = S(N(Γ_n))` from `Γ_0 = 0`.
pub fn picard_fixed_point<T: Real>(
    external: &PeriodicTriple<T>,
    physics: Physics,
    config: PicardConfig,
    part: &DyadicPartition,
) -> Result<(PeriodicTriple<T>, PicardReport)> {
    physics.validate()?;
    if !(config.tol > 0.0) || config.max_iter == 0 {
        return Err(Error::Config("Picard tolerance must be positive and max_iter at least 1".into()));
    }
    let lat = external.u.lattice().clone();
    let n_t = external.u.collocation();
    let zero = PeriodicProfile::zeros(&lat, external.period(), external.k_max())?.with_collocation(n_t);
    let mut cur = PeriodicTriple::new(zero.clone(), zero.clone(), zero)?;
    let mut diffs = Vec::new();
    let mut norms = Vec::new();
    let mut contraction = Vec::new();
    let mut status = PicardStatus::MaxIter;
    for _ in 0..config.max_iter {
        let next = picard_map(&cur, external, physics)?;
        if !next.is_finite() {
            status = PicardStatus::Diverged;
            break;
        }
        let d = xtilde_norm(part, &next.sub(&cur)?);
        let nn = xtilde_norm(part, &next);
        if let Some(&prev) = diffs.last() {
            contraction.push(if prev > 0.0 { d / prev } else { 0.0 });
        }
        diffs.push(d);
        norms.push(nn);
        cur = next;
        if d <= config.tol * nn || d == 0.0 {
            status = PicardStatus::Converged;
            break;
        }
        if !(nn.is_finite()) || nn > 1e8 * norms[0].max(f64::MIN_POSITIVE) {
            status = PicardStatus::Diverged;
            break;
        }
    }
    let residual = if cur.is_finite() { nonlinear_residual(&cur, external, physics)? } else { f64::NAN };
    let fixed_point_defect = if cur.is_finite() {
        let img = picard_map(&cur, external, physics)?;
        let nc = xtilde_norm(part, &cur);
        let d = xtilde_norm(part, &img.sub(&cur)?);
        if nc > 0.0 {
            d / nc
        } else {
            d
        }
    } else {
        f64::NAN
    };
    let report = PicardReport {
        iterations: diffs.len(),
        diffs,
        norms,
        contraction,
        status,
        converged: status == PicardStatus::Converged,
        residual,
        fixed_point_defect,
    };
    Ok((cur, report))
}

/// Rescales `external` so that the first Picard iterate `S(ℙF, G, H)` has
/// `X̃` norm `target`; returns the rescaled forcing and the factor applied.
pub fn calibrate_forcing<T: Real>(
    external: &PeriodicTriple<T>,
    physics: Physics,
    part: &DyadicPartition,
    target: f64,
) -> Result<(PeriodicTriple<T>, f64)> {
    let lat = external.u.lattice().clone();
    let zero = PeriodicTriple::zeros(&lat, external.period(), external.k_max())?;
    let first = picard_map(&zero, external, physics)?;
    let n = xtilde_norm(part, &first);
    if !(n > 0.0) {
        return Err(Error::RejectedInput("forcing produces a zero first iterate".into()));
    }
    let factor = target / n;
    Ok((external.scaled(T::lit(factor)), factor))
}
