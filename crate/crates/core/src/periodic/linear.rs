use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maxwell::mode::{add, scale, sub, xi_cross, xi_dot, C64, Vec3};
use crate::periodic::profile::PeriodicProfile;
use crate::physics::Physics;
use crate::scalar::Real;
use crate::spectral::SpectralField;

/// Periodic velocity, electric and magnetic profiles (also used for the
/// forcing triple `(F, G, H)`).
#[derive(Debug, Clone)]
pub struct PeriodicTriple<T: Real> {
    pub u: PeriodicProfile<T>,
    pub e: PeriodicProfile<T>,
    pub b: PeriodicProfile<T>,
}

impl<T: Real> PeriodicTriple<T> {
    pub fn zeros(lattice: &crate::spectral::LatticeRef<T>, period: f64, k_max: usize) -> Result<Self> {
        let z = PeriodicProfile::zeros(lattice, period, k_max)?;
        Ok(Self { u: z.clone(), e: z.clone(), b: z })
    }

    pub fn new(u: PeriodicProfile<T>, e: PeriodicProfile<T>, b: PeriodicProfile<T>) -> Result<Self> {
        u.check_compatible(&e)?;
        u.check_compatible(&b)?;
        Ok(Self { u, e, b })
    }

    pub fn period(&self) -> f64 {
        self.u.period()
    }

    pub fn k_max(&self) -> usize {
        self.u.k_max()
    }

    pub fn parts(&self) -> [&PeriodicProfile<T>; 3] {
        [&self.u, &self.e, &self.b]
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { u: self.u.sub(&other.u)?, e: self.e.sub(&other.e)?, b: self.b.sub(&other.b)? })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { u: self.u.add(&other.u)?, e: self.e.add(&other.e)?, b: self.b.add(&other.b)? })
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { u: self.u.scaled(a), e: self.e.scaled(a), b: self.b.scaled(a) }
    }

    /// `(‖u‖² + ‖E‖² + ‖B‖²)^{1/2}` in `L^2(0, T; L^2)`.
    pub fn norm_l2(&self) -> f64 {
        self.parts().iter().map(|p| p.norm_l2().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.u.max_diff(&other.u).max(self.e.max_diff(&other.e)).max(self.b.max_diff(&other.b))
    }

    pub fn is_finite(&self) -> bool {
        self.parts().iter().all(|p| p.is_finite())
    }
}

fn c64<T: Real>(v: [crate::scalar::Cplx<T>; 3]) -> Vec3 {
    v.map(|z| C64::new(z.re.as_f64(), z.im.as_f64()))
}

fn back<T: Real>(v: Vec3) -> [crate::scalar::Cplx<T>; 3] {
    v.map(|z| crate::scalar::Cplx::new(T::lit(z.re), T::lit(z.im)))
}

fn leray(xi: [f64; 3], xi2: f64, v: Vec3) -> Vec3 {
    let d = xi_dot(xi, v) / xi2;
    sub(v, [0, 1, 2].map(|i| d * xi[i]))
}

/// Per-mode solution of the time-harmonic linear system at frequency `ωk`.
#[derive(Debug, Clone, Copy)]
pub struct ModeSolve {
    pub u: Vec3,
    pub e: Vec3,
    pub b: Vec3,
}

/// Solves
/// `iωk U + ν|ξ|²U = ℙF`, `(iωk + σ)E - iξ×B = G`, `iωk B + iξ×E = H`
/// at one `(k, ξ)`, with `ξ·H = 0` assumed.
pub fn solve_mode(xi: [f64; 3], wk: f64, physics: Physics, f: Vec3, g: Vec3, h: Vec3) -> ModeSolve {
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let iw = C64::new(0.0, wk);
    let pf = leray(xi, xi2, f);
    let u = scale(pf, (C64::new(physics.nu * xi2, 0.0) + iw).inv());
    let damp = C64::new(physics.sigma, 0.0) + iw;
    let den = C64::new(xi2 - wk * wk, physics.sigma * wk);
    let ixg = scale(xi_cross(xi, g), C64::i());
    let b = scale(sub(scale(h, damp), ixg), den.inv());
    let b = leray(xi, xi2, b);
    let grad = sub(g, leray(xi, xi2, g));
    let e_sol = add(leray(xi, xi2, g), scale(xi_cross(xi, b), C64::i()));
    let e = scale(add(e_sol, grad), damp.inv());
    ModeSolve { u, e, b }
}

/// Smallest `|(|ξ|² - ω²k²) + iσωk| / (σω|k|)` over `1 ≤ |k| ≤ K` and
/// lattice shells; never below 1.
pub fn resonance_margin<T: Real>(lattice: &crate::spectral::LatticeRef<T>, period: f64, k_max: usize, sigma: f64) -> f64 {
    let w = std::f64::consts::TAU / period;
    let mut worst = f64::INFINITY;
    for s in lattice.shells() {
        if s == 0 {
            continue;
        }
        let xi2 = lattice.shell_xi2(s).as_f64();
        for k in 1..=k_max {
            let wk = w * k as f64;
            let den = C64::new(xi2 - wk * wk, sigma * wk).norm();
            worst = worst.min(den / (sigma * wk));
        }
    }
    worst
}

fn check_forces<T: Real>(f: &PeriodicProfile<T>, g: &PeriodicProfile<T>, h: &PeriodicProfile<T>) -> Result<()> {
    f.check_compatible(g)?;
    f.check_compatible(h)?;
    let lat = h.lattice();
    let xi_max = lat.xi_range().1.as_f64();
    let tol = 1e-12 * (1.0 + h.max_abs() * xi_max);
    let d = h.divergence_defect();
    if d > tol {
        return Err(Error::RejectedInput(format!("magnetic forcing is not divergence-free: max |xi.H| = {d:e}")));
    }
    Ok(())
}

/// Exact time-periodic solution of the linearized system for forcing
/// `(F, G, H)`, mode by mode. The spatial mean of every time mode is
/// dropped and `F` enters through its Leray projection.
pub fn linear_periodic_solve<T: Real>(
    f: &PeriodicProfile<T>,
    g: &PeriodicProfile<T>,
    h: &PeriodicProfile<T>,
    physics: Physics,
) -> Result<PeriodicTriple<T>> {
    physics.validate()?;
    check_forces(f, g, h)?;
    let lat = f.lattice().clone();
    let w = f.omega();
    let k0 = f.k_max() as i64;
    let solved: Vec<[SpectralField<T>; 3]> = (0..f.modes().len())
        .into_par_iter()
        .map(|i| {
            let k = i as i64 - k0;
            let (fk, gk, hk) = (&f.modes()[i], &g.modes()[i], &h.modes()[i]);
            let mut out = [SpectralField::zeros(&lat), SpectralField::zeros(&lat), SpectralField::zeros(&lat)];
            for idx in 1..lat.len() {
                let (fv, gv, hv) = (c64(fk.at(idx)), c64(gk.at(idx)), c64(hk.at(idx)));
                if fv.iter().chain(&gv).chain(&hv).all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                let xi = lat.wavevector(idx).map(|v| v.as_f64());
                let m = solve_mode(xi, w * k as f64, physics, fv, gv, hv);
                out[0].set(idx, back(m.u));
                out[1].set(idx, back(m.e));
                out[2].set(idx, back(m.b));
            }
            out
        })
        .collect();
    let mut us = Vec::with_capacity(solved.len());
    let mut es = Vec::with_capacity(solved.len());
    let mut bs = Vec::with_capacity(solved.len());
    for [u, e, b] in solved {
        us.push(u);
        es.push(e);
        bs.push(b);
    }
    let p = f.period();
    PeriodicTriple::new(
        PeriodicProfile::from_modes(p, us)?.with_collocation(f.collocation()),
        PeriodicProfile::from_modes(p, es)?.with_collocation(f.collocation()),
        PeriodicProfile::from_modes(p, bs)?.with_collocation(f.collocation()),
    )
}

/// `L^2(0, T; L^2)` residuals of the three linear equations, each divided
/// by the norm of the full forcing triple (absolute when that is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicResidual {
    pub u: f64,
    pub e: f64,
    pub b: f64,
    pub forcing_norm: f64,
}

impl PeriodicResidual {
    pub fn max(&self) -> f64 {
        self.u.max(self.e).max(self.b)
    }
}

/// Residual of `sol` in the linear system driven by `forces`.
pub fn periodic_residual<T: Real>(
    sol: &PeriodicTriple<T>,
    forces: &PeriodicTriple<T>,
    physics: Physics,
) -> Result<PeriodicResidual> {
    sol.u.check_compatible(&forces.u)?;
    let lat = sol.u.lattice().clone();
    let w = sol.u.omega();
    let k0 = sol.k_max() as i64;
    let sums: Vec<[f64; 3]> = (0..sol.u.modes().len())
        .into_par_iter()
        .map(|i| {
            let iw = C64::new(0.0, w * (i as i64 - k0) as f64);
            let mut acc = [0.0f64; 3];
            for idx in 1..lat.len() {
                let xi = lat.wavevector(idx).map(|v| v.as_f64());
                let xi2 = lat.xi2(idx).as_f64();
                let u = c64(sol.u.modes()[i].at(idx));
                let e = c64(sol.e.modes()[i].at(idx));
                let b = c64(sol.b.modes()[i].at(idx));
                let f = leray(xi, xi2, c64(forces.u.modes()[i].at(idx)));
                let g = c64(forces.e.modes()[i].at(idx));
                let h = c64(forces.b.modes()[i].at(idx));
                let ru = sub(scale(u, iw + physics.nu * xi2), f);
                let re = sub(sub(scale(e, iw + physics.sigma), scale(xi_cross(xi, b), C64::i())), g);
                let rb = sub(add(scale(b, iw), scale(xi_cross(xi, e), C64::i())), h);
                for (a, r) in acc.iter_mut().zip([ru, re, rb]) {
                    *a += r.iter().map(|z| z.norm_sqr()).sum::<f64>();
                }
            }
            acc
        })
        .collect();
    let t = sol.period();
    let mut tot = [0.0f64; 3];
    for s in &sums {
        for c in 0..3 {
            tot[c] += s[c];
        }
    }
    let fnorm = forces.norm_l2();
    let denom = if fnorm > 0.0 { fnorm } else { 1.0 };
    let r = tot.map(|x| (t * x).sqrt() / denom);
    Ok(PeriodicResidual { u: r[0], e: r[1], b: r[2], forcing_norm: fnorm })
}
