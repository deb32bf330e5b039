use rayon::prelude::*;

use crate::error::Result;
use crate::maxwell::expm::{phi_2x2, phi_scalar};
use crate::maxwell::mode::{apply_block_function, is_degenerate, semigroup_apply_sigma, transverse_block, C64, Vec3};
use crate::scalar::{Cplx, Real};
use crate::spectral::field::check_same;
use crate::spectral::{LatticeRef, SpectralField};

/// Which matrix function of `hL̂` to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    /// `e^{hL̂}`
    Exp,
    /// `φ1(hL̂) = (hL̂)^{-1}(e^{hL̂} - I)`
    Phi1,
    /// `φ2(hL̂) = (hL̂)^{-2}(e^{hL̂} - I - hL̂)`
    Phi2,
}

#[derive(Debug, Clone, Copy)]
struct ShellEntry {
    transverse: [[f64; 4]; 3],
    degenerate: bool,
}

/// Damped Maxwell propagator and its `φ`-functions for a fixed step,
/// tabulated per lattice shell `|m|^2`.
#[derive(Debug, Clone)]
pub struct SemigroupCache<T: Real> {
    lattice: LatticeRef<T>,
    step: f64,
    sigma: f64,
    shells: Vec<Option<ShellEntry>>,
    /// `(e^z, φ1(z), φ2(z))` at `z = -σh` (electric gradient part)
    grad_e: [f64; 3],
}

impl<T: Real> SemigroupCache<T> {
    pub fn new(lattice: &LatticeRef<T>, step: f64, sigma: f64) -> Self {
        let shells_present = lattice.shells();
        let max = lattice.max_shell() as usize;
        let base = lattice.base().as_f64();
        let entries: Vec<(u32, ShellEntry)> = shells_present
            .par_iter()
            .map(|&s| {
                let r = base * (s as f64).sqrt();
                let m = transverse_block(r, sigma).map(|v| v * step);
                let (e, p1, p2) = phi_2x2(m);
                (s, ShellEntry { transverse: [e, p1, p2], degenerate: is_degenerate(r, sigma) })
            })
            .collect();
        let mut shells = vec![None; max + 1];
        for (s, e) in entries {
            shells[s as usize] = Some(e);
        }
        let (a, b, c) = phi_scalar(-sigma * step);
        Self { lattice: lattice.clone(), step, sigma, shells, grad_e: [a, b, c] }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Shells flagged as lying in the degeneracy band around `|ξ| = σ/2`.
    pub fn degenerate_shells(&self) -> Vec<u32> {
        self.shells
            .iter()
            .enumerate()
            .filter_map(|(s, e)| e.filter(|e| e.degenerate).map(|_| s as u32))
            .collect()
    }

    /// Applies the chosen function of `hL̂` to a single mode.
    pub fn apply_mode(&self, idx: usize, kind: PhiKind, e: Vec3, b: Vec3) -> (Vec3, Vec3) {
        let lat = &self.lattice;
        let Some(entry) = self.shells[lat.shell(idx) as usize] else {
            return (e, b);
        };
        let k = kind as usize;
        let fb = [1.0, 1.0, 0.5][k];
        let xi = lat.wavevector(idx).map(|v| v.as_f64());
        apply_block_function(xi, entry.transverse[k], self.grad_e[k], fb, e, b)
    }

    /// Applies the chosen function of `hL̂` to a field pair.
    pub fn apply(
        &self,
        kind: PhiKind,
        e: &SpectralField<T>,
        b: &SpectralField<T>,
    ) -> Result<(SpectralField<T>, SpectralField<T>)> {
        check_same(&self.lattice, e.lattice())?;
        check_same(&self.lattice, b.lattice())?;
        let mut eo = SpectralField::zeros(&self.lattice);
        let mut bo = SpectralField::zeros(&self.lattice);
        for idx in 1..self.lattice.len() {
            let ev = to_c64(e.at(idx));
            let bv = to_c64(b.at(idx));
            if ev.iter().chain(&bv).all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            let (e1, b1) = self.apply_mode(idx, kind, ev, bv);
            eo.set(idx, from_c64(e1));
            bo.set(idx, from_c64(b1));
        }
        Ok((eo, bo))
    }
}

pub(crate) fn to_c64<T: Real>(v: [Cplx<T>; 3]) -> Vec3 {
    v.map(|z| C64::new(z.re.as_f64(), z.im.as_f64()))
}

pub(crate) fn from_c64<T: Real>(v: Vec3) -> [Cplx<T>; 3] {
    v.map(|z| Cplx::new(T::lit(z.re), T::lit(z.im)))
}

/// Exact damped Maxwell evolution of a field pair by time `t`.
pub fn semigroup_apply_fields<T: Real>(
    e: &SpectralField<T>,
    b: &SpectralField<T>,
    t: f64,
    sigma: f64,
) -> Result<(SpectralField<T>, SpectralField<T>)> {
    check_same(e.lattice(), b.lattice())?;
    let lat = e.lattice().clone();
    let mut eo = SpectralField::zeros(&lat);
    let mut bo = SpectralField::zeros(&lat);
    for idx in 1..lat.len() {
        let xi = lat.wavevector(idx).map(|v| v.as_f64());
        let (e1, b1) = semigroup_apply_sigma(to_c64(e.at(idx)), to_c64(b.at(idx)), xi, t, sigma);
        eo.set(idx, from_c64(e1));
        bo.set(idx, from_c64(b1));
    }
    Ok((eo, bo))
}
