use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{solution_norms, DecayTrace, DyadicPartition, NormKind};
use crate::error::{Error, Result};
use crate::evolution::{Integrator, IntegratorConfig, Scheme};
use crate::maxwell::PhiKind;
use crate::physics::{EMState, Physics};
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::{random_field, Band, LatticeRef, SpectralField};
use crate::stability::nonlinearity::error_rhs;
use crate::stability::run::{perturbation, PeriodicOrbit};

/// Discretisation of the contraction probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub horizon: f64,
    pub dt: f64,
    pub epsilon: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { horizon: 8.0, dt: 1.0 / 32.0, epsilon: 0.1 }
    }
}

impl ProbeConfig {
    fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            scheme: Scheme::Etd2rk,
            band: Band::Half,
            horizon: self.horizon,
            cadence: self.dt,
            nonlinear: true,
        }
    }
}

/// Candidate error trajectory `Γ(t) = θ(t) W` with
/// `θ(t) = (1 - e^{-t}) (1+t)^{-1/2}` and a fixed spatial shape `W`.
#[derive(Debug, Clone)]
pub struct Candidate<T: Real> {
    pub shape: [SpectralField<T>; 3],
}

impl<T: Real> Candidate<T> {
    pub fn profile(t: f64) -> f64 {
        (1.0 - (-t).exp()) / (1.0 + t).sqrt()
    }

    /// Seeded shape with divergence-free `u` and `B`, spectral slope 3.
    pub fn seeded(lattice: &LatticeRef<T>, seed: u64) -> Result<Self> {
        let base = seed.wrapping_mul(3).wrapping_add(0x5eed);
        let mut shape = [
            random_field(lattice, 3.0, base, true, Band::Half)?,
            random_field(lattice, 3.0, base + 1, false, Band::Half)?,
            random_field(lattice, 3.0, base + 2, true, Band::Half)?,
        ];
        for f in shape.iter_mut() {
            f.clear_zero_mode();
        }
        Ok(Self { shape })
    }

    pub fn at(&self, t: f64) -> [SpectralField<T>; 3] {
        let a = T::lit(Self::profile(t));
        self.shape.clone().map(|f| f.scaled(a))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { shape: self.shape.clone().map(|f| f.scaled(T::lit(a))) }
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        let mut shape = self.shape.clone();
        for (s, o) in shape.iter_mut().zip(&other.shape) {
            *s = s.sub(o)?;
        }
        Ok(Self { shape })
    }

    /// Discrete `𝒳`-norm over the probe horizon.
    pub fn x_norm(&self, config: &ProbeConfig) -> Result<f64> {
        let part = DyadicPartition::build(self.shape[0].lattice())?;
        let mut traces = new_traces(&part, config.epsilon)?;
        let steps = config.integrator().steps();
        for j in 0..=steps {
            let t = j as f64 * config.dt;
            for (tr, f) in traces.iter_mut().zip(self.at(t).iter()) {
                tr.record(&part, t, f)?;
            }
        }
        x_norm(&traces)
    }

    /// Rescales to `𝒳`-norm `radius`.
    pub fn with_radius(&self, radius: f64, config: &ProbeConfig) -> Result<Self> {
        let n = self.x_norm(config)?;
        if n == 0.0 {
            return Err(Error::Degenerate { xi_norm: 0.0 });
        }
        Ok(self.scaled(radius / n))
    }
}

fn new_traces(part: &DyadicPartition, eps: f64) -> Result<[DecayTrace; 3]> {
    Ok([DecayTrace::new(part, eps)?, DecayTrace::new(part, eps)?, DecayTrace::new(part, eps)?])
}

/// `‖u‖_{X1 ∩ L∞B} + ‖E‖_{X2} + ‖B‖_{X3}` of recorded traces.
pub fn x_norm(traces: &[DecayTrace; 3]) -> Result<f64> {
    Ok(solution_norms(&traces[0], NormKind::Xfull)?
        + solution_norms(&traces[1], NormKind::X2)?
        + solution_norms(&traces[2], NormKind::X3)?)
}

/// Outcome of one contraction probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResult {
    /// `‖Φ(Γ1) - Φ(Γ2)‖_𝒳 / ‖Γ1 - Γ2‖_𝒳`, 0 when the candidates coincide.
    pub ratio: f64,
    pub input_distance: f64,
    pub output_distance: f64,
    pub radius: [f64; 2],
    pub image_norm: [f64; 2],
}

/// Evaluates `Φ(Γ1)` and `Φ(Γ2)` by exponential quadrature with exact
/// propagators (exact for integrands linear between steps) and returns the
/// contraction ratio in the discrete `𝒳`-norm.
pub fn contraction_probe<T: Real>(
    g1: &Candidate<T>,
    g2: &Candidate<T>,
    orbit: Option<&PeriodicOrbit<T>>,
    err0: &EMState<T>,
    config: &ProbeConfig,
) -> Result<ProbeResult> {
    let lat = err0.lattice();
    for f in g1.shape.iter().chain(&g2.shape) {
        check_same(lat, f.lattice())?;
    }
    let physics = err0.physics;
    let ic = config.integrator();
    let part = DyadicPartition::build(lat)?;
    let diff = g1.difference(g2)?;
    let input_distance = diff.x_norm(config)?;
    let radius = [g1.x_norm(config)?, g2.x_norm(config)?];
    if input_distance == 0.0 {
        return Ok(ProbeResult { ratio: 0.0, input_distance, output_distance: 0.0, radius, image_norm: [0.0; 2] });
    }
    let integ = Integrator::new(lat, physics, ic)?;
    let mut free = [err0.u.truncated(Band::Half), err0.e.truncated(Band::Half), err0.b.truncated(Band::Half)];
    for f in free.iter_mut() {
        f.clear_zero_mode();
    }
    let nl = |g: &Candidate<T>, free: &[SpectralField<T>; 3], t: f64| -> Result<[SpectralField<T>; 3]> {
        let mut y = g.at(t);
        for (a, b) in y.iter_mut().zip(free) {
            a.axpy(T::one(), b);
        }
        let per = orbit.map(|o| o.state_at(t));
        error_rhs(&y[0], &y[1], &y[2], per.as_ref(), physics.sigma, Band::Half)
    };
    let zeros = || [SpectralField::zeros(lat), SpectralField::zeros(lat), SpectralField::zeros(lat)];
    let mut phi = [zeros(), zeros()];
    let mut n_prev = [nl(g1, &free, 0.0)?, nl(g2, &free, 0.0)?];
    let mut tr_out = new_traces(&part, config.epsilon)?;
    let mut tr_img = [new_traces(&part, config.epsilon)?, new_traces(&part, config.epsilon)?];
    let record = |tr: &mut [DecayTrace; 3], t: f64, y: &[SpectralField<T>; 3]| -> Result<()> {
        for (a, f) in tr.iter_mut().zip(y) {
            a.record(&part, t, f)?;
        }
        Ok(())
    };
    let record_all = |tr_out: &mut [DecayTrace; 3], tr_img: &mut [[DecayTrace; 3]; 2], t: f64, phi: &[[SpectralField<T>; 3]; 2]| -> Result<()> {
        let d = [phi[0][0].sub(&phi[1][0])?, phi[0][1].sub(&phi[1][1])?, phi[0][2].sub(&phi[1][2])?];
        record(tr_out, t, &d)?;
        record(&mut tr_img[0], t, &phi[0])?;
        record(&mut tr_img[1], t, &phi[1])
    };
    record_all(&mut tr_out, &mut tr_img, 0.0, &phi)?;
    for j in 0..ic.steps() {
        let t1 = (j + 1) as f64 * config.dt;
        let next_free = integ.propagate(PhiKind::Exp, &free[0], &free[1], &free[2])?;
        let n_next = [nl(g1, &next_free, t1)?, nl(g2, &next_free, t1)?];
        for i in 0..2 {
            phi[i] = integ.duhamel_step(&phi[i], &n_prev[i], Some(&n_next[i]))?;
        }
        if !phi.iter().flatten().all(|f| f.is_finite()) {
            return Err(Error::BlowUp { time: t1 });
        }
        record_all(&mut tr_out, &mut tr_img, t1, &phi)?;
        free = next_free;
        n_prev = n_next;
    }
    let output_distance = x_norm(&tr_out)?;
    Ok(ProbeResult {
        ratio: output_distance / input_distance,
        input_distance,
        output_distance,
        radius,
        image_norm: [x_norm(&tr_img[0])?, x_norm(&tr_img[1])?],
    })
}

/// Candidate pair and initial error for one seed: `Γ⁰_err` of data norm
/// `amplitude`, candidates of `𝒳`-radius `radius`.
pub fn seeded_probe<T: Real>(
    lattice: &LatticeRef<T>,
    physics: Physics,
    orbit: Option<&PeriodicOrbit<T>>,
    seed: u64,
    amplitude: f64,
    radius: f64,
    config: &ProbeConfig,
) -> Result<ProbeResult> {
    let err0 = perturbation(lattice, physics, seed, 3.0, amplitude)?;
    let g1 = Candidate::seeded(lattice, 2 * seed)?.with_radius(radius, config)?;
    let g2 = Candidate::seeded(lattice, 2 * seed + 1)?.with_radius(radius, config)?;
    contraction_probe(&g1, &g2, orbit, &err0, config)
}

/// Ratios along a descending amplitude scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScan {
    /// `(amplitude, max ratio over seeds)` in scan order.
    pub points: Vec<(f64, f64)>,
    /// Largest scanned amplitude whose max ratio is below 1/2.
    pub threshold: Option<f64>,
}

/// Halves the amplitude from `start` (at most `levels` times) until every
/// seed contracts with ratio below 1/2. Initial error and candidate radius
/// both equal the amplitude.
pub fn contraction_threshold<T: Real>(
    lattice: &LatticeRef<T>,
    physics: Physics,
    orbit: Option<&PeriodicOrbit<T>>,
    seeds: &[u64],
    start: f64,
    levels: usize,
    config: &ProbeConfig,
) -> Result<ThresholdScan> {
    let mut points = Vec::new();
    let mut a = start;
    for _ in 0..levels {
        let ratios: Vec<f64> = seeds
            .par_iter()
            .map(|&s| match seeded_probe(lattice, physics, orbit, s, a, a, config) {
                Ok(r) => Ok(r.ratio),
                Err(Error::BlowUp { .. }) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        points.push((a, worst));
        if worst < 0.5 {
            return Ok(ThresholdScan { points, threshold: Some(a) });
        }
        a *= 0.5;
    }
    Ok(ThresholdScan { points, threshold: None })
}
