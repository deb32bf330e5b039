use serde::{Deserialize, Serialize};

use crate::dyadic::blocks::{block_l2_norms, HybridBesovSpec, SumExp};
use crate::dyadic::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SpectralField;

/// Default decay-loss parameter.
pub const DEFAULT_EPSILON: f64 = 0.1;

const TIME_SLACK: f64 = 1e-9;

/// Time series of per-block `L^2` norms of one field, sampled at solver
/// times and grouped into unit windows `[n, n+1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayTrace {
    q_min: i32,
    n_blocks: usize,
    epsilon: f64,
    times: Vec<f64>,
    blocks: Vec<Vec<f64>>,
    totals: Vec<f64>,
}

impl DecayTrace {
    pub fn new(part: &DyadicPartition, epsilon: f64) -> Result<Self> {
        Self::with_blocks(part.q_min(), part.len(), epsilon)
    }

    pub fn with_blocks(q_min: i32, n_blocks: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { q_min, n_blocks, epsilon, times: Vec::new(), blocks: Vec::new(), totals: Vec::new() })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Per-sample block norms.
    pub fn block_samples(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    /// Per-sample full `L^2` norms.
    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Appends a sample. Times must start at 0 or later and not decrease.
    pub fn push(&mut self, t: f64, blocks: Vec<f64>, total: f64) -> Result<()> {
        if blocks.len() != self.n_blocks {
            return Err(Error::RejectedInput(format!(
                "{} block norms for a trace of {} blocks",
                blocks.len(),
                self.n_blocks
            )));
        }
        if t < 0.0 || self.times.last().is_some_and(|&last| t < last) {
            return Err(Error::RejectedInput(format!("sample time {t} out of order")));
        }
        self.times.push(t);
        self.blocks.push(blocks);
        self.totals.push(total);
        Ok(())
    }

    /// Samples a field: block norms from `part`, total from Parseval.
    pub fn record<T: Real>(&mut self, part: &DyadicPartition, t: f64, f: &SpectralField<T>) -> Result<()> {
        self.push(t, block_l2_norms(part, f), f.norm_l2().as_f64())
    }

    /// Number of unit windows covered, counting a final partial window only
    /// when no complete one exists.
    pub fn window_count(&self) -> usize {
        match self.times.last() {
            None => 0,
            Some(&t) => ((t + TIME_SLACK).floor() as usize).max(1),
        }
    }

    fn window_range(&self, n: usize) -> std::ops::Range<usize> {
        let lo = n as f64 - TIME_SLACK;
        let hi = n as f64 + 1.0 + TIME_SLACK;
        let start = self.times.partition_point(|&t| t < lo);
        let end = self.times.partition_point(|&t| t <= hi);
        start..end
    }

    fn trapezoid_l2(&self, range: std::ops::Range<usize>, value: impl Fn(usize) -> f64) -> f64 {
        if range.len() == 1 {
            return value(range.start);
        }
        let mut acc = 0.0;
        for i in range.start..range.end.saturating_sub(1) {
            let (a, b) = (value(i), value(i + 1));
            acc += 0.5 * (self.times[i + 1] - self.times[i]) * (a * a + b * b);
        }
        acc.sqrt()
    }

    /// `‖Δ_q f‖_{L^2(n, n+1)}` per block, by the trapezoid rule.
    pub fn window_block_l2(&self, n: usize) -> Vec<f64> {
        let r = self.window_range(n);
        (0..self.n_blocks).map(|b| self.trapezoid_l2(r.clone(), |i| self.blocks[i][b])).collect()
    }

    /// `‖f‖_{L^2(n, n+1; L^2)}`.
    pub fn window_l2(&self, n: usize) -> f64 {
        self.trapezoid_l2(self.window_range(n), |i| self.totals[i])
    }

    /// Window `L^2` norms for every window.
    pub fn window_norms(&self) -> Vec<f64> {
        (0..self.window_count()).map(|n| self.window_l2(n)).collect()
    }

    fn weight(&self, t: f64) -> f64 {
        (t + 1.0).powf(0.5 * (1.0 - self.epsilon))
    }

    /// Per block: `sup_t w(t) ‖Δ_q f(t)‖`, with `w = (t+1)^{(1-ε)/2}` when
    /// `weighted`, else 1.
    pub fn block_sup(&self, weighted: bool) -> Vec<f64> {
        let mut out = vec![0.0f64; self.n_blocks];
        for (i, &t) in self.times.iter().enumerate() {
            let w = if weighted { self.weight(t) } else { 1.0 };
            for (o, v) in out.iter_mut().zip(&self.blocks[i]) {
                *o = o.max(w * v);
            }
        }
        out
    }

    /// Per block: `sup_n (n+1)^{(1-ε)/2} ‖Δ_q f‖_{L^2(n, n+1)}`.
    pub fn block_window_sup(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.n_blocks];
        for n in 0..self.window_count() {
            let w = self.weight(n as f64);
            for (o, v) in out.iter_mut().zip(self.window_block_l2(n)) {
                *o = o.max(w * v);
            }
        }
        out
    }
}

/// Weighted-decay norms of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    /// velocity: weighted pointwise sup in the `(3/2-ε, 1/2)` hybrid plus
    /// weighted window `L^2` in `Ḃ^{3/2}_{2,(∞,1)}`
    X1,
    /// electric field: weighted sup in `H^{1/2}`
    X2,
    /// magnetic field: weighted sup in `Ḣ^{1,1/2}`
    X3,
    /// velocity forcing: weighted window `L^2` in the `(-1/2-ε, -1/2)` hybrid
    Y1,
    /// electromagnetic forcing: weighted window `L^2` in `H^{1/2}`
    Y2,
    /// `X1` plus `LinftyB`
    Xfull,
    /// unweighted sup in `Ḃ^{1/2}_{2,(∞,1)}`
    LinftyB,
}

impl NormKind {
    pub const ALL: [NormKind; 7] =
        [NormKind::X1, NormKind::X2, NormKind::X3, NormKind::Y1, NormKind::Y2, NormKind::Xfull, NormKind::LinftyB];
}

/// Evaluates one of the weighted-decay norms on a trace.
pub fn solution_norms(trace: &DecayTrace, which: NormKind) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Empty("decay trace has no samples".into()));
    }
    let eps = trace.epsilon;
    let q0 = trace.q_min;
    let inf1 = |s1: f64, s2: f64| HybridBesovSpec::new(s1, s2, SumExp::Infinity, SumExp::One);
    let linfty_b = || inf1(0.5, 0.5).combine(q0, &trace.block_sup(false));
    let x1 = || {
        inf1(1.5 - eps, 0.5).combine(q0, &trace.block_sup(true))
            + inf1(1.5, 1.5).combine(q0, &trace.block_window_sup())
    };
    Ok(match which {
        NormKind::X1 => x1(),
        NormKind::X2 => HybridBesovSpec::sobolev(0.0, 0.5).combine(q0, &trace.block_sup(true)),
        NormKind::X3 => HybridBesovSpec::sobolev(1.0, 0.5).combine(q0, &trace.block_sup(true)),
        NormKind::Y1 => inf1(-0.5 - eps, -0.5).combine(q0, &trace.block_window_sup()),
        NormKind::Y2 => HybridBesovSpec::sobolev(0.0, 0.5).combine(q0, &trace.block_window_sup()),
        NormKind::Xfull => x1() + linfty_b(),
        NormKind::LinftyB => linfty_b(),
    })
}

/// Power-law fit of window norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Least-squares slope of `log(norm)` against `log(n+1)`; `None` when
    /// every window norm vanishes.
    pub rate: Option<f64>,
    /// `sup_n (n+1)^{(1-ε)/2} norm_n`.
    pub weighted_sup: f64,
    /// Number of windows used in the fit.
    pub windows: usize,
}

/// Minimum number of windows accepted by [`decay_fit`].
pub const MIN_FIT_WINDOWS: usize = 8;

/// Fits `norm_n ≈ c (n+1)^{rate}` to window norms indexed from `n = 0`.
/// Vanishing windows are left out of the regression.
pub fn decay_fit(window_norms: &[f64], epsilon: f64) -> Result<DecayFit> {
    decay_fit_from(window_norms, 0, epsilon)
}

/// Like [`decay_fit`] for windows starting at index `first`.
pub fn decay_fit_from(window_norms: &[f64], first: usize, epsilon: f64) -> Result<DecayFit> {
    if window_norms.len() < MIN_FIT_WINDOWS {
        return Err(Error::RejectedInput(format!(
            "decay fit needs at least {MIN_FIT_WINDOWS} windows, got {}",
            window_norms.len()
        )));
    }
    let weighted_sup = window_norms
        .iter()
        .enumerate()
        .map(|(i, v)| ((first + i) as f64 + 1.0).powf(0.5 * (1.0 - epsilon)) * v)
        .fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = window_norms
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(i, v)| (((first + i) as f64 + 1.0).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(DecayFit { rate: None, weighted_sup, windows: window_norms.len() });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(DecayFit { rate: Some(sxy / sxx), weighted_sup, windows: window_norms.len() })
}
