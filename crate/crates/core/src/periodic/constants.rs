use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::spectral::FrequencyLattice;

/// Largest `t` on the default `α`/`β` grid.
pub const DEFAULT_T_MAX: f64 = 1e4;

/// Truncated sum plus an analytic upper bound on the neglected terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailedSum {
    pub value: f64,
    pub tail: f64,
}

/// Grid on which the suprema were taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationGrid {
    pub period: f64,
    pub k_max: usize,
    pub xi_count: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub t_count: usize,
    pub t_max: f64,
}

/// Suprema of the time-mode sums controlling the periodic linear solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceConstants {
    pub a_t: f64,
    pub b_t: f64,
    pub c_t: f64,
    pub d_t: f64,
    pub alpha0: f64,
    pub beta0: f64,
    /// Tail bounds at the maximizing grid point, same order as above.
    pub tails: [f64; 6],
    pub grid: EvaluationGrid,
}

/// `α`/`β` grid suprema with maximizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBeta {
    pub alpha0: f64,
    pub beta0: f64,
    pub t_alpha: f64,
    pub t_beta: f64,
    pub tail_alpha: f64,
    pub tail_beta: f64,
}

fn sum_to(k_max: usize, f: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..=k_max).rev() {
        acc += f(k as f64);
    }
    acc
}

/// `Σ_{k≥1} t/(t² + k²)` truncated at `K` with tail `≤ π/2 - atan(K/t)`.
pub fn alpha_sum(t: f64, k_max: usize) -> TailedSum {
    if t <= 0.0 {
        return TailedSum { value: 0.0, tail: 0.0 };
    }
    let s = sum_to(k_max, |k| t / (t * t + k * k));
    let tail = FRAC_PI_2 - (k_max as f64 / t).atan();
    TailedSum { value: s + tail, tail }
}

/// `Σ_{k≥1} (t + k²)/(k² + (t - k²)²)`; the cutoff is raised to
/// `⌈√(2t)⌉` if needed so that the tail bound `4t/(3K³) + 4/K` applies.
pub fn beta_sum(t: f64, k_max: usize) -> TailedSum {
    let k_eff = k_max.max((2.0 * t).sqrt().ceil() as usize).max(1);
    let s = sum_to(k_eff, |k| {
        let k2 = k * k;
        (t + k2) / (k2 + (t - k2) * (t - k2))
    });
    let kf = k_eff as f64;
    let tail = 4.0 * t / (3.0 * kf.powi(3)) + 4.0 / kf;
    TailedSum { value: s + tail, tail }
}

/// Logarithmic grid on `[10^{-3}, t_max]` (40 points per decade) plus `0`
/// and `m² + {-1/2, -1/4, 0, 1/4, 1/2}` for every integer `m ≤ √t_max`.
pub fn default_t_grid(t_max: f64) -> Vec<f64> {
    let mut g = vec![0.0];
    let lo = -3.0f64;
    let hi = t_max.max(1e-3).log10();
    let n = ((hi - lo) * 40.0).ceil() as usize;
    for i in 0..=n {
        g.push(10f64.powf(lo + (hi - lo) * i as f64 / n.max(1) as f64));
    }
    let m_max = t_max.sqrt().floor() as u64;
    for m in 1..=m_max {
        let sq = (m * m) as f64;
        for d in [-0.5, -0.25, 0.0, 0.25, 0.5] {
            let t = sq + d;
            if (0.0..=t_max).contains(&t) {
                g.push(t);
            }
        }
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Grid suprema of the `α` and `β` sums.
pub fn alpha_beta_sup(t_grid: &[f64], k_max: usize) -> AlphaBeta {
    let vals: Vec<(f64, TailedSum, TailedSum)> =
        t_grid.par_iter().map(|&t| (t, alpha_sum(t, k_max), beta_sum(t, k_max))).collect();
    let mut out = AlphaBeta { alpha0: 0.0, beta0: 0.0, t_alpha: 0.0, t_beta: 0.0, tail_alpha: 0.0, tail_beta: 0.0 };
    for (t, a, b) in vals {
        if a.value > out.alpha0 {
            out.alpha0 = a.value;
            out.t_alpha = t;
            out.tail_alpha = a.tail;
        }
        if b.value > out.beta0 {
            out.beta0 = b.value;
            out.t_beta = t;
            out.tail_beta = b.tail;
        }
    }
    out
}

/// The four frequency sums at `|ξ|² = s`, each `(1/T) Σ_{k≠0}`, with tails.
pub fn resonance_sums(period: f64, s: f64, k_max: usize) -> [TailedSum; 4] {
    let w = TAU / period;
    let w2 = w * w;
    let pre = 2.0 / period;
    let a_sum = sum_to(k_max, |k| s / (s * s + w2 * k * k));
    let a_tail = if s > 0.0 { (FRAC_PI_2 - (w * k_max as f64 / s).atan()) / w } else { 0.0 };
    let k_eff = k_max.max(((2.0 * s).sqrt() / w).ceil() as usize).max(1);
    let den = |k: f64| {
        let d = s - w2 * k * k;
        d * d + w2 * k * k
    };
    let b_sum = sum_to(k_eff, |k| (1.0 + s + w2 * k * k) / den(k));
    let c_sum = sum_to(k_eff, |k| (s + w2 * k * k) / den(k));
    let kf = k_eff as f64;
    let cube = 4.0 / (3.0 * w2 * w2 * kf.powi(3));
    let b_tail = cube * (1.0 + s) + 4.0 / (w2 * kf);
    let c_tail = cube * s + 4.0 / (w2 * kf);
    let d_sum = sum_to(k_max, |k| 1.0 / (1.0 + w2 * k * k));
    let d_tail = (FRAC_PI_2 - (w * k_max as f64).atan()) / w;
    [(a_sum, a_tail), (b_sum, b_tail), (c_sum, c_tail), (d_sum, d_tail)]
        .map(|(v, t)| TailedSum { value: pre * (v + t), tail: pre * t })
}

/// Resonance constants with the `ξ`-supremum over the given `|ξ|` values
/// and `α`, `β` over [`default_t_grid`]`(`[`DEFAULT_T_MAX`]`)`.
pub fn resonance_constants_for(period: f64, xi_norms: &[f64], k_max: usize) -> ResonanceConstants {
    let k_max = k_max.max(1);
    let sums: Vec<[TailedSum; 4]> = xi_norms.par_iter().map(|&x| resonance_sums(period, x * x, k_max)).collect();
    let mut best = [TailedSum { value: 0.0, tail: 0.0 }; 4];
    for s in &sums {
        for c in 0..4 {
            if s[c].value > best[c].value {
                best[c] = s[c];
            }
        }
    }
    let grid_t = default_t_grid(DEFAULT_T_MAX);
    let ab = alpha_beta_sup(&grid_t, k_max);
    let (xi_min, xi_max) = xi_norms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    ResonanceConstants {
        a_t: best[0].value,
        b_t: best[1].value,
        c_t: best[2].value,
        d_t: best[3].value,
        alpha0: ab.alpha0,
        beta0: ab.beta0,
        tails: [best[0].tail, best[1].tail, best[2].tail, best[3].tail, ab.tail_alpha, ab.tail_beta],
        grid: EvaluationGrid {
            period,
            k_max,
            xi_count: xi_norms.len(),
            xi_min: if xi_norms.is_empty() { 0.0 } else { xi_min },
            xi_max,
            t_count: grid_t.len(),
            t_max: DEFAULT_T_MAX,
        },
    }
}

/// Resonance constants with the `ξ`-supremum over the nonzero shells of a
/// lattice.
pub fn resonance_constants<T: Real>(period: f64, lattice: &FrequencyLattice<T>, k_max: usize) -> ResonanceConstants {
    let xi: Vec<f64> = lattice
        .shells()
        .into_iter()
        .filter(|&s| s > 0)
        .map(|s| lattice.shell_xi2(s).as_f64().sqrt())
        .collect();
    resonance_constants_for(period, &xi, k_max)
}

/// Sum of the two partial bounds on `β₀`:
/// `16 (7/2 + π²/6) + 5 + 8π²/25`.
pub fn beta0_bound() -> f64 {
    let p2 = std::f64::consts::PI.powi(2);
    16.0 * (3.5 + p2 / 6.0) + 5.0 + 8.0 * p2 / 25.0
}

/// Upper bound `7/2` on `α₀`.
pub const ALPHA0_BOUND: f64 = 3.5;
