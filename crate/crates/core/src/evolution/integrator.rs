use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxwell::expm::phi_scalar;
use crate::maxwell::{PhiKind, SemigroupCache};
use crate::periodic::PeriodicTriple;
use crate::physics::{nonlinear_terms, EMState, Physics};
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::ops::project_solenoidal_in_place;
use crate::spectral::{Band, LatticeRef, SpectralField};

/// Exponential time-differencing scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Etd1,
    Etd2rk,
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Spatial band the state is kept on.
    pub band: Band,
    pub horizon: f64,
    /// Time between recorded snapshots and decay-trace samples.
    pub cadence: f64,
    /// When false only the forcing enters the quadrature.
    pub nonlinear: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1.0 / 64.0, scheme: Scheme::Etd2rk, band: Band::Half, horizon: 1.0, cadence: 0.125, nonlinear: true }
    }
}

fn whole_multiple(total: f64, dt: f64) -> Option<usize> {
    let n = (total / dt).round();
    (n >= 1.0 && (n * dt - total).abs() <= 1e-9 * total.max(dt)).then_some(n as usize)
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if whole_multiple(self.horizon, self.dt).is_none() {
            return Err(Error::Config(format!("horizon {} is not a positive multiple of dt {}", self.horizon, self.dt)));
        }
        if whole_multiple(self.cadence, self.dt).is_none() {
            return Err(Error::Config(format!("cadence {} is not a positive multiple of dt {}", self.cadence, self.dt)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        whole_multiple(self.horizon, self.dt).unwrap_or(0)
    }

    /// Steps between recorded samples.
    pub fn stride(&self) -> usize {
        whole_multiple(self.cadence, self.dt).unwrap_or(1)
    }
}

/// External forces `(F, G, H)` at one instant.
#[derive(Debug, Clone)]
pub struct ForceFields<T: Real> {
    pub f: SpectralField<T>,
    pub g: SpectralField<T>,
    pub h: SpectralField<T>,
}

/// Time dependence of the external forces.
#[derive(Debug, Clone)]
pub enum Forcing<T: Real> {
    None,
    Steady(ForceFields<T>),
    /// Evaluated by exact time-Fourier summation.
    Periodic(PeriodicTriple<T>),
}

impl<T: Real> Forcing<T> {
    pub fn at(&self, t: f64) -> Option<ForceFields<T>> {
        match self {
            Forcing::None => None,
            Forcing::Steady(f) => Some(f.clone()),
            Forcing::Periodic(p) => Some(ForceFields { f: p.u.sample(t), g: p.e.sample(t), h: p.b.sample(t) }),
        }
    }
}

/// `(N_u, N_E, N_B)` with `N_u = ℙ(-div(u⊗u) + J×B + F)`,
/// `N_E = -(J - σE) + G`, `N_B = H`, all on `band`.
pub fn rhs_on<T: Real>(
    u: &SpectralField<T>,
    e: &SpectralField<T>,
    b: &SpectralField<T>,
    sigma: f64,
    forces: Option<&ForceFields<T>>,
    band: Band,
    nonlinear: bool,
) -> Result<[SpectralField<T>; 3]> {
    let lat = u.lattice();
    let (mut nu, mut ne) = if nonlinear {
        let n = nonlinear_terms(u, e, b, sigma, band)?;
        (n.n_u, n.n_e)
    } else {
        (SpectralField::zeros(lat), SpectralField::zeros(lat))
    };
    let mut nb = SpectralField::zeros(lat);
    if let Some(fr) = forces {
        check_same(lat, fr.f.lattice())?;
        check_same(lat, fr.g.lattice())?;
        check_same(lat, fr.h.lattice())?;
        let mut f = fr.f.truncated(band);
        f.clear_zero_mode();
        project_solenoidal_in_place(&mut f);
        nu.axpy(T::one(), &f);
        let mut g = fr.g.truncated(band);
        g.clear_zero_mode();
        ne.axpy(T::one(), &g);
        nb = fr.h.truncated(band);
        nb.clear_zero_mode();
    }
    Ok([nu, ne, nb])
}

/// Non-stiff right-hand side of a state on the solver band.
pub fn rhs_nonlinear<T: Real>(state: &EMState<T>, forces: Option<&ForceFields<T>>) -> Result<[SpectralField<T>; 3]> {
    rhs_on(&state.u, &state.e, &state.b, state.physics.sigma, forces, Band::Half, true)
}

/// Exact linear propagators for a fixed step and the ETD stepper.
#[derive(Debug, Clone)]
pub struct Integrator<T: Real> {
    lattice: LatticeRef<T>,
    config: IntegratorConfig,
    physics: Physics,
    heat: Vec<[f64; 3]>,
    maxwell: SemigroupCache<T>,
}

impl<T: Real> Integrator<T> {
    pub fn new(lattice: &LatticeRef<T>, physics: Physics, config: IntegratorConfig) -> Result<Self> {
        physics.validate()?;
        config.validate()?;
        let max = lattice.max_shell() as usize;
        let heat = (0..=max)
            .into_par_iter()
            .map(|s| {
                let z = -physics.nu * lattice.shell_xi2(s as u32).as_f64() * config.dt;
                let (a, b, c) = phi_scalar(z);
                [a, b, c]
            })
            .collect();
        let maxwell = SemigroupCache::new(lattice, config.dt, physics.sigma);
        Ok(Self { lattice: lattice.clone(), config, physics, heat, maxwell })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn physics(&self) -> Physics {
        self.physics
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        &self.lattice
    }

    /// Applies `f(hA)` to `(u, E, B)`, with `A` the heat and damped Maxwell
    /// generators.
    pub fn propagate(
        &self,
        kind: PhiKind,
        u: &SpectralField<T>,
        e: &SpectralField<T>,
        b: &SpectralField<T>,
    ) -> Result<[SpectralField<T>; 3]> {
        let k = kind as usize;
        let mut uo = u.clone();
        for idx in 0..self.lattice.len() {
            let w = T::lit(self.heat[self.lattice.shell(idx) as usize][k]);
            let v = uo.at(idx);
            uo.set(idx, v.map(|z| z * w));
        }
        let (eo, bo) = self.maxwell.apply(kind, e, b)?;
        Ok([uo, eo, bo])
    }

    fn rhs(&self, s: &[SpectralField<T>; 3], forcing: &Forcing<T>, t: f64) -> Result<[SpectralField<T>; 3]> {
        let fr = forcing.at(t);
        rhs_on(&s[0], &s[1], &s[2], self.physics.sigma, fr.as_ref(), self.config.band, self.config.nonlinear)
    }

    /// `e^{hA}y + hφ1(hA)n0`, plus `hφ2(hA)(n1 - n0)` when `n1` is given.
    /// Exact for a source that is linear in time between `n0` and `n1`.
    pub fn duhamel_step(
        &self,
        y: &[SpectralField<T>; 3],
        n0: &[SpectralField<T>; 3],
        n1: Option<&[SpectralField<T>; 3]>,
    ) -> Result<[SpectralField<T>; 3]> {
        let h = T::lit(self.config.dt);
        let mut a = self.propagate(PhiKind::Exp, &y[0], &y[1], &y[2])?;
        let p1 = self.propagate(PhiKind::Phi1, &n0[0], &n0[1], &n0[2])?;
        for c in 0..3 {
            a[c].axpy(h, &p1[c]);
        }
        if let Some(n1) = n1 {
            let d: Vec<SpectralField<T>> = (0..3).map(|c| n1[c].sub(&n0[c])).collect::<Result<_>>()?;
            let p2 = self.propagate(PhiKind::Phi2, &d[0], &d[1], &d[2])?;
            for c in 0..3 {
                a[c].axpy(h, &p2[c]);
            }
        }
        Ok(a)
    }

    /// One ETD step of `y' = Ay + N(y, t)` from time `t0`, with the
    /// result truncated to the band. Fails with [`Error::BlowUp`] on a
    /// non-finite result.
    pub fn step_with<R>(&self, y0: &[SpectralField<T>; 3], t0: f64, mut rhs: R) -> Result<[SpectralField<T>; 3]>
    where
        R: FnMut(&[SpectralField<T>; 3], f64) -> Result<[SpectralField<T>; 3]>,
    {
        let t1 = t0 + self.config.dt;
        let n0 = rhs(y0, t0)?;
        let mut a = self.duhamel_step(y0, &n0, None)?;
        if self.config.scheme == Scheme::Etd2rk {
            let n1 = rhs(&a, t1)?;
            let h = T::lit(self.config.dt);
            let d: Vec<SpectralField<T>> = (0..3).map(|c| n1[c].sub(&n0[c])).collect::<Result<_>>()?;
            let p2 = self.propagate(PhiKind::Phi2, &d[0], &d[1], &d[2])?;
            for c in 0..3 {
                a[c].axpy(h, &p2[c]);
            }
        }
        for f in a.iter_mut() {
            f.truncate(self.config.band);
            f.clear_zero_mode();
        }
        if !a.iter().all(|f| f.is_finite()) {
            return Err(Error::BlowUp { time: t1 });
        }
        Ok(a)
    }

    /// One ETD step of the full system from `state`.
    pub fn step(&self, state: &EMState<T>, forcing: &Forcing<T>) -> Result<EMState<T>> {
        let y0 = [state.u.clone(), state.e.clone(), state.b.clone()];
        let [u, e, b] = self.step_with(&y0, state.time, |y, t| self.rhs(y, forcing, t))?;
        Ok(EMState { u, e, b, physics: state.physics, time: state.time + self.config.dt })
    }
}

/// Single ETD step with freshly built propagators.
pub fn etd_step<T: Real>(state: &EMState<T>, config: &IntegratorConfig, forcing: &Forcing<T>) -> Result<EMState<T>> {
    Integrator::new(state.lattice(), state.physics, *config)?.step(state, forcing)
}
