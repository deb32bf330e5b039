//! Physical parameters, the state triple and the quadratic/cubic
//! nonlinearity shared by the periodic and initial-value solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::product::{analyze, phys_cross, tensor_divergence_phys};
use crate::spectral::transform::to_physical_many;
use crate::spectral::ops::project_solenoidal_in_place;
use crate::spectral::{Band, LatticeRef, PhysicalField, SpectralField};

/// Viscosity `ν` and conductivity `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub nu: f64,
    pub sigma: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self { nu: 1.0, sigma: 1.0 }
    }
}

impl Physics {
    pub fn new(nu: f64, sigma: f64) -> Result<Self> {
        let p = Self { nu, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Config(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Velocity, electric and magnetic fields at one instant.
#[derive(Debug, Clone)]
pub struct EMState<T: Real> {
    pub u: SpectralField<T>,
    pub e: SpectralField<T>,
    pub b: SpectralField<T>,
    pub physics: Physics,
    pub time: f64,
}

impl<T: Real> EMState<T> {
    pub fn zeros(lattice: &LatticeRef<T>, physics: Physics) -> Self {
        Self {
            u: SpectralField::zeros(lattice),
            e: SpectralField::zeros(lattice),
            b: SpectralField::zeros(lattice),
            physics,
            time: 0.0,
        }
    }

    pub fn new(u: SpectralField<T>, e: SpectralField<T>, b: SpectralField<T>, physics: Physics) -> Result<Self> {
        check_same(u.lattice(), e.lattice())?;
        check_same(u.lattice(), b.lattice())?;
        physics.validate()?;
        Ok(Self { u, e, b, physics, time: 0.0 })
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        self.u.lattice()
    }

    /// `‖u‖² + ‖E‖² + ‖B‖²`.
    pub fn energy(&self) -> f64 {
        (self.u.norm_l2_sq() + self.e.norm_l2_sq() + self.b.norm_l2_sq()).as_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.e.is_finite() && self.b.is_finite()
    }

    pub fn truncate(&mut self, band: Band) {
        self.u.truncate(band);
        self.e.truncate(band);
        self.b.truncate(band);
    }

    /// Componentwise difference `self - other`, keeping `self`'s time.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.sub(&other.u)?,
            e: self.e.sub(&other.e)?,
            b: self.b.sub(&other.b)?,
            physics: self.physics,
            time: self.time,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.add(&other.u)?,
            e: self.e.add(&other.e)?,
            b: self.b.add(&other.b)?,
            physics: self.physics,
            time: self.time,
        })
    }

    /// Largest `|ξ·û|` and `|ξ·B̂|` over modes.
    pub fn divergence_defect(&self) -> f64 {
        self.u.divergence_defect().as_f64().max(self.b.divergence_defect().as_f64())
    }

    pub fn hermitian_defect(&self) -> f64 {
        [&self.u, &self.e, &self.b].iter().map(|f| f.hermitian_defect().as_f64()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference over the three fields.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.u
            .max_diff(&other.u)
            .as_f64()
            .max(self.e.max_diff(&other.e).as_f64())
            .max(self.b.max_diff(&other.b).as_f64())
    }

    /// `(‖u‖² + ‖E‖² + ‖B‖²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }
}

/// Non-stiff right-hand sides before forcing: `n_u = ℙ(-div(u⊗u) + J×B)`
/// and `n_e = -(J - σE) = -σ u×B`.
#[derive(Debug, Clone)]
pub struct Nonlinear<T: Real> {
    pub n_u: SpectralField<T>,
    pub n_e: SpectralField<T>,
}

/// Physical samples of `(u, E, B)` after truncation to `band`.
pub(crate) fn sample_state<T: Real>(
    u: &SpectralField<T>,
    e: &SpectralField<T>,
    b: &SpectralField<T>,
    band: Band,
) -> Vec<PhysicalField<T>> {
    let (ut, et, bt) = (u.truncated(band), e.truncated(band), b.truncated(band));
    to_physical_many(&[&ut, &et, &bt])
}

/// Ohm current `J = σ(E + u×B)` on sampled fields.
pub(crate) fn ohm_phys<T: Real>(
    pu: &PhysicalField<T>,
    pe: &PhysicalField<T>,
    pb: &PhysicalField<T>,
    sigma: f64,
) -> (PhysicalField<T>, PhysicalField<T>) {
    let uxb = phys_cross(pu, pb);
    let s = T::lit(sigma);
    let mut j = pe.clone();
    j.axpy(T::one(), &uxb);
    for c in j.comps_mut() {
        for x in c.iter_mut() {
            *x = *x * s;
        }
    }
    (j, uxb)
}

/// `J = σ(E + u×B)` with inputs and output on `band`, zero mode discarded.
pub fn ohm_current_on<T: Real>(
    u: &SpectralField<T>,
    e: &SpectralField<T>,
    b: &SpectralField<T>,
    sigma: f64,
    band: Band,
) -> Result<SpectralField<T>> {
    check_same(u.lattice(), e.lattice())?;
    check_same(u.lattice(), b.lattice())?;
    let p = sample_state(u, e, b, band);
    let (j, _) = ohm_phys(&p[0], &p[1], &p[2], sigma);
    Ok(analyze(&j, band))
}

/// Ohm current of a state on the solver band.
pub fn ohm_current<T: Real>(state: &EMState<T>) -> Result<SpectralField<T>> {
    ohm_current_on(&state.u, &state.e, &state.b, state.physics.sigma, Band::Half)
}

/// Unforced nonlinearity with inputs and output on `band`.
pub fn nonlinear_terms<T: Real>(
    u: &SpectralField<T>,
    e: &SpectralField<T>,
    b: &SpectralField<T>,
    sigma: f64,
    band: Band,
) -> Result<Nonlinear<T>> {
    check_same(u.lattice(), e.lattice())?;
    check_same(u.lattice(), b.lattice())?;
    let p = sample_state(u, e, b, band);
    let (j, uxb) = ohm_phys(&p[0], &p[1], &p[2], sigma);
    let lorentz = phys_cross(&j, &p[2]);
    let mut n_u = analyze(&lorentz, band);
    n_u.axpy(-T::one(), &tensor_divergence_phys(&p[0], &p[0], band));
    project_solenoidal_in_place(&mut n_u);
    let mut n_e = analyze(&uxb, band);
    n_e.scale(T::lit(-sigma));
    Ok(Nonlinear { n_u, n_e })
}
