use serde::Serialize;

use crate::error::Result;
use crate::physics::{sample_state, EMState};
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::ops::project_solenoidal_in_place;
use crate::spectral::product::{analyze, phys_cross, tensor_divergence_phys};
use crate::spectral::{Band, PhysicalField, SpectralField};

/// Equation an error-nonlinearity term enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Velocity,
    Electric,
}

/// One term of the error nonlinearity.
#[derive(Debug, Clone)]
pub struct ErrorTerm<T: Real> {
    pub name: &'static str,
    pub target: Target,
    /// Polynomial degree in the error fields.
    pub degree: u8,
    pub field: SpectralField<T>,
}

/// Nonlinearity of the error equation around a reference state, with the
/// term-by-term breakdown. `n3` is identically zero.
#[derive(Debug, Clone)]
pub struct ErrorNonlinearity<T: Real> {
    pub n1: SpectralField<T>,
    pub n2: SpectralField<T>,
    pub n3: SpectralField<T>,
    pub terms: Vec<ErrorTerm<T>>,
}

impl<T: Real> ErrorNonlinearity<T> {
    pub fn term(&self, name: &str) -> Option<&ErrorTerm<T>> {
        self.terms.iter().find(|t| t.name == name)
    }
}

fn scaled<T: Real>(mut f: SpectralField<T>, a: f64) -> SpectralField<T> {
    f.scale(T::lit(a));
    f
}

/// `N(Γ_per + Γ_err) - N(Γ_per)` for the full quadratic and cubic
/// nonlinearity, split into its 16 monomials. Both states are sampled on
/// `band`; every term is truncated to `band` and the velocity terms are
/// Leray-projected.
pub fn error_nonlinearity<T: Real>(
    err: &EMState<T>,
    per: &EMState<T>,
    band: Band,
) -> Result<ErrorNonlinearity<T>> {
    check_same(err.lattice(), per.lattice())?;
    let sigma = err.physics.sigma;
    let pe = sample_state(&err.u, &err.e, &err.b, band);
    let pp = sample_state(&per.u, &per.e, &per.b, band);
    let (u, e, b) = (&pe[0], &pe[1], &pe[2]);
    let (up, ep, bp) = (&pp[0], &pp[1], &pp[2]);
    let x = |a: &PhysicalField<T>, c: &PhysicalField<T>| phys_cross(a, c);
    let an = |p: &PhysicalField<T>| analyze(p, band);
    let uxb = x(u, b);
    let uxbp = x(u, bp);
    let upxb = x(up, b);
    let upxbp = x(up, bp);
    let mut terms = Vec::with_capacity(16);
    let mut push = |name, target, degree, field| terms.push(ErrorTerm { name, target, degree, field });
    push("-div(u*u)", Target::Velocity, 2, scaled(tensor_divergence_phys(u, u, band), -1.0));
    push("-div(uper*u)", Target::Velocity, 1, scaled(tensor_divergence_phys(up, u, band), -1.0));
    push("-div(u*uper)", Target::Velocity, 1, scaled(tensor_divergence_phys(u, up, band), -1.0));
    push("E^B", Target::Velocity, 2, scaled(an(&x(e, b)), sigma));
    push("E^Bper", Target::Velocity, 1, scaled(an(&x(e, bp)), sigma));
    push("Eper^B", Target::Velocity, 1, scaled(an(&x(ep, b)), sigma));
    push("(u^B)^B", Target::Velocity, 3, scaled(an(&x(&uxb, b)), sigma));
    push("(u^B)^Bper", Target::Velocity, 2, scaled(an(&x(&uxb, bp)), sigma));
    push("(u^Bper)^B", Target::Velocity, 2, scaled(an(&x(&uxbp, b)), sigma));
    push("(u^Bper)^Bper", Target::Velocity, 1, scaled(an(&x(&uxbp, bp)), sigma));
    push("(uper^B)^B", Target::Velocity, 2, scaled(an(&x(&upxb, b)), sigma));
    push("(uper^B)^Bper", Target::Velocity, 1, scaled(an(&x(&upxb, bp)), sigma));
    push("(uper^Bper)^B", Target::Velocity, 1, scaled(an(&x(&upxbp, b)), sigma));
    push("-u^B", Target::Electric, 2, scaled(an(&uxb), -sigma));
    push("-u^Bper", Target::Electric, 1, scaled(an(&uxbp), -sigma));
    push("-uper^B", Target::Electric, 1, scaled(an(&upxb), -sigma));
    let lat = err.lattice();
    let mut n1 = SpectralField::zeros(lat);
    let mut n2 = SpectralField::zeros(lat);
    for t in terms.iter_mut() {
        match t.target {
            Target::Velocity => {
                project_solenoidal_in_place(&mut t.field);
                n1.axpy(T::one(), &t.field);
            }
            Target::Electric => n2.axpy(T::one(), &t.field),
        }
    }
    Ok(ErrorNonlinearity { n1, n2, n3: SpectralField::zeros(lat), terms })
}

/// `(N1, N2, N3)` of [`error_nonlinearity`] assembled in factored form
/// with one transform per output.
pub fn error_rhs<T: Real>(
    u: &SpectralField<T>,
    e: &SpectralField<T>,
    b: &SpectralField<T>,
    per: Option<&EMState<T>>,
    sigma: f64,
    band: Band,
) -> Result<[SpectralField<T>; 3]> {
    let lat = u.lattice();
    let pe = sample_state(u, e, b, band);
    let (pu, pel, pb) = (&pe[0], &pe[1], &pe[2]);
    let (mut n1, mut w) = match per {
        None => {
            let uxb = phys_cross(pu, pb);
            let mut f = pel.clone();
            f.axpy(T::one(), &uxb);
            let mut n1 = analyze(&phys_cross(&f, pb), band);
            n1.scale(T::lit(sigma));
            n1.axpy(-T::one(), &tensor_divergence_phys(pu, pu, band));
            (n1, uxb)
        }
        Some(per) => {
            check_same(lat, per.lattice())?;
            let pp = sample_state(&per.u, &per.e, &per.b, band);
            let (qu, qe, qb) = (&pp[0], &pp[1], &pp[2]);
            let mut bbar = pb.clone();
            bbar.axpy(T::one(), qb);
            let mut ubar = pu.clone();
            ubar.axpy(T::one(), qu);
            // w = u×B̄ + u_per×B
            let mut w = phys_cross(pu, &bbar);
            w.axpy(T::one(), &phys_cross(qu, pb));
            // σ[(E + w)×B̄ + (E_per + u_per×B_per)×B]
            let mut f = pel.clone();
            f.axpy(T::one(), &w);
            let mut g = qe.clone();
            g.axpy(T::one(), &phys_cross(qu, qb));
            let mut lor = phys_cross(&f, &bbar);
            lor.axpy(T::one(), &phys_cross(&g, pb));
            let mut n1 = analyze(&lor, band);
            n1.scale(T::lit(sigma));
            n1.axpy(-T::one(), &tensor_divergence_phys(pu, &ubar, band));
            n1.axpy(-T::one(), &tensor_divergence_phys(qu, pu, band));
            (n1, w)
        }
    };
    project_solenoidal_in_place(&mut n1);
    for c in w.comps_mut() {
        for v in c.iter_mut() {
            *v = *v * T::lit(-sigma);
        }
    }
    let n2 = analyze(&w, band);
    Ok([n1, n2, SpectralField::zeros(lat)])
}
