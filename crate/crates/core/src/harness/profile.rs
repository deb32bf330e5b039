use serde::{Deserialize, Serialize};

use crate::dyadic::{block_l2_norms, DecayTrace, DyadicPartition, HybridBesovSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SpectralField;

/// Scalar time profile `θ(t)` of a separable trajectory `θ(t) W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeProfile {
    Constant,
    /// `(t+1)^{-1/2}`
    InverseSqrt,
    /// `sin²(π(t - start)/width)` on `[start, start + width]`, zero elsewhere.
    Bump { start: f64, width: f64 },
    /// `1 + cos(2πt)/2`
    Periodic,
}

impl TimeProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::InverseSqrt => (t + 1.0).powf(-0.5),
            TimeProfile::Bump { start, width } => {
                let s = (t - start) / width;
                if (0.0..=1.0).contains(&s) {
                    (std::f64::consts::PI * s).sin().powi(2)
                } else {
                    0.0
                }
            }
            TimeProfile::Periodic => 1.0 + 0.5 * (std::f64::consts::TAU * t).cos(),
        }
    }
}

/// Uniform sample times `j / per_unit` on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub horizon: f64,
    pub per_unit: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon >= 1.0 && self.horizon.is_finite()) || self.per_unit == 0 {
            return Err(Error::Config(format!(
                "time grid needs horizon >= 1 and per_unit >= 1, got {} and {}",
                self.horizon, self.per_unit
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon * self.per_unit as f64).round() as usize
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps()).map(move |j| j as f64 * self.dt())
    }
}

/// Trace of `θ(t) W` for a product of profiles `θ`.
pub fn separable_trace<T: Real>(
    part: &DyadicPartition,
    shape: &SpectralField<T>,
    profiles: &[TimeProfile],
    grid: &TimeGrid,
    epsilon: f64,
) -> Result<DecayTrace> {
    let blocks = block_l2_norms(part, shape);
    let total = shape.norm_l2().as_f64();
    let mut tr = DecayTrace::new(part, epsilon)?;
    for t in grid.times() {
        let a: f64 = profiles.iter().map(|p| p.at(t).abs()).product();
        tr.push(t, blocks.iter().map(|b| a * b).collect(), a * total)?;
    }
    Ok(tr)
}

/// `‖f‖_{L̃^∞_t X}`: per-block sup over time, then the hybrid sum.
pub fn tilde_sup(trace: &DecayTrace, spec: &HybridBesovSpec) -> f64 {
    spec.combine(trace.q_min(), &trace.block_sup(false))
}

/// `sup_t ‖f(t)‖_X`.
pub fn sup_norm(trace: &DecayTrace, spec: &HybridBesovSpec) -> f64 {
    trace.block_samples().iter().map(|b| spec.combine(trace.q_min(), b)).fold(0.0, f64::max)
}

/// `‖f‖_{L̃^2(0,1; X)}` on the first unit window.
pub fn tilde_l2_first(trace: &DecayTrace, spec: &HybridBesovSpec) -> f64 {
    spec.combine(trace.q_min(), &trace.window_block_l2(0))
}
