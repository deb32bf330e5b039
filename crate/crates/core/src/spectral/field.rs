use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::lattice::{Band, FrequencyLattice};

/// Shared handle to a lattice.
pub type LatticeRef<T> = Arc<FrequencyLattice<T>>;

pub(crate) fn check_same<T: Real>(a: &FrequencyLattice<T>, b: &FrequencyLattice<T>) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::LatticeMismatch(format!(
            "n = {} / L = {} against n = {} / L = {}",
            a.n(),
            a.length(),
            b.n(),
            b.length()
        )))
    }
}

/// Scalar periodic field stored by its Fourier coefficients.
#[derive(Debug, Clone)]
pub struct ScalarField<T: Real> {
    lattice: LatticeRef<T>,
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(lattice: &LatticeRef<T>) -> Self {
        Self { lattice: lattice.clone(), coeffs: vec![Cplx::default(); lattice.len()] }
    }

    pub fn from_coeffs(lattice: &LatticeRef<T>, coeffs: Vec<Cplx<T>>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::LatticeMismatch(format!(
                "{} coefficients for a lattice of {} modes",
                coeffs.len(),
                lattice.len()
            )));
        }
        Ok(Self { lattice: lattice.clone(), coeffs })
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cplx<T>> {
        self.coeffs
    }

    /// `L^2` norm with respect to the normalized measure on the box.
    pub fn norm_l2(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }
}

/// Real three-component periodic field stored by its Fourier coefficients.
///
/// Coefficients obey `c_{-m} = conj(c_m)` and the zero mode is kept at zero.
#[derive(Debug, Clone)]
pub struct SpectralField<T: Real> {
    lattice: LatticeRef<T>,
    comps: [Vec<Cplx<T>>; 3],
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(lattice: &LatticeRef<T>) -> Self {
        let z = vec![Cplx::default(); lattice.len()];
        Self { lattice: lattice.clone(), comps: [z.clone(), z.clone(), z] }
    }

    pub fn from_components(lattice: &LatticeRef<T>, comps: [Vec<Cplx<T>>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != lattice.len() {
                return Err(Error::LatticeMismatch(format!(
                    "{} coefficients for a lattice of {} modes",
                    c.len(),
                    lattice.len()
                )));
            }
        }
        Ok(Self { lattice: lattice.clone(), comps })
    }

    /// Builds a field mode by mode. The closure sees the integer mode and the
    /// wavevector; the result is symmetrized so that the field is real.
    pub fn from_fn<F>(lattice: &LatticeRef<T>, mut f: F) -> Self
    where
        F: FnMut([i64; 3], [T; 3]) -> [Cplx<T>; 3],
    {
        let mut out = Self::zeros(lattice);
        for idx in 1..lattice.len() {
            let v = f(lattice.mode(idx), lattice.wavevector(idx));
            for c in 0..3 {
                out.comps[c][idx] = v[c];
            }
        }
        out.symmetrize();
        out
    }

    /// Field `a e^{iξ·x} + conj(a) e^{-iξ·x}` for the single mode `m`.
    pub fn single_mode(lattice: &LatticeRef<T>, m: [i64; 3], a: [Cplx<T>; 3]) -> Result<Self> {
        let idx = lattice
            .index_of(m)
            .ok_or_else(|| Error::RejectedInput(format!("mode {m:?} is not on the lattice")))?;
        if idx == 0 {
            return Err(Error::RejectedInput("the zero mode is not admissible".into()));
        }
        let mut out = Self::zeros(lattice);
        let mi = lattice.mirror(idx);
        for c in 0..3 {
            out.comps[c][idx] = a[c];
            out.comps[c][mi] = a[c].conj();
        }
        if mi == idx {
            for c in 0..3 {
                out.comps[c][idx] = Cplx::new(a[c].re, T::zero());
            }
        }
        Ok(out)
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        &self.lattice
    }

    pub fn comps(&self) -> &[Vec<Cplx<T>>; 3] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [Vec<Cplx<T>>; 3] {
        &mut self.comps
    }

    pub fn comp(&self, c: usize) -> &[Cplx<T>] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Cplx<T>] {
        &mut self.comps[c]
    }

    /// Coefficient vector at a flat index.
    #[inline]
    pub fn at(&self, idx: usize) -> [Cplx<T>; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [Cplx<T>; 3]) {
        for (c, vc) in v.into_iter().enumerate() {
            self.comps[c][idx] = vc;
        }
    }

    pub fn check_lattice(&self, other: &Self) -> Result<()> {
        check_same(&self.lattice, &other.lattice)
    }

    /// `L^2` norm with respect to the normalized measure on the box.
    pub fn norm_l2(&self) -> T {
        self.norm_l2_sq().sqrt()
    }

    pub fn norm_l2_sq(&self) -> T {
        self.comps.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum()
    }

    /// Homogeneous `Ḣ^s` norm, `(Σ |ξ|^{2s} |c_m|^2)^{1/2}`.
    pub fn norm_hdot(&self, s: T) -> T {
        let mut acc = T::zero();
        for idx in 1..self.lattice.len() {
            let w = self.lattice.xi2(idx).powf(s);
            let a = self.at(idx);
            acc = acc + w * (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr());
        }
        acc.sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flat_map(|c| c.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, a: T) {
        for z in self.comps.iter_mut().flat_map(|c| c.iter_mut()) {
            *z = *z * a;
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: T, x: &Self) {
        debug_assert!(self.lattice.same_as(&x.lattice));
        for c in 0..3 {
            for (s, xv) in self.comps[c].iter_mut().zip(&x.comps[c]) {
                *s = *s + *xv * a;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let mut out = self.clone();
        out.axpy(T::one(), other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        Ok(out)
    }

    /// Zeroes every mode outside `band`.
    pub fn truncate(&mut self, band: Band) {
        if band == Band::Full {
            return;
        }
        for idx in 0..self.lattice.len() {
            if !self.lattice.in_band(idx, band) {
                for c in 0..3 {
                    self.comps[c][idx] = Cplx::default();
                }
            }
        }
    }

    pub fn truncated(&self, band: Band) -> Self {
        let mut out = self.clone();
        out.truncate(band);
        out
    }

    /// Whether every mode outside `band` is exactly zero.
    pub fn is_in_band(&self, band: Band) -> bool {
        (0..self.lattice.len()).all(|idx| {
            self.lattice.in_band(idx, band) || self.at(idx).iter().all(|z| *z == Cplx::default())
        })
    }

    pub fn zero_mode(&self) -> [Cplx<T>; 3] {
        self.at(0)
    }

    pub fn clear_zero_mode(&mut self) {
        self.set(0, [Cplx::default(); 3]);
    }

    /// Makes the coefficient array Hermitian, `c_{-m} = conj(c_m)`, by
    /// averaging mirrored pairs. Nyquist-plane modes whose mirror lands on a
    /// different lattice point are treated the same way.
    pub fn symmetrize(&mut self) {
        let half = T::lit(0.5);
        for idx in 0..self.lattice.len() {
            let mi = self.lattice.mirror(idx);
            if mi < idx {
                continue;
            }
            for c in 0..3 {
                let a = self.comps[c][idx];
                let b = self.comps[c][mi];
                let v = (a + b.conj()) * half;
                self.comps[c][idx] = v;
                self.comps[c][mi] = v.conj();
            }
        }
    }

    /// Largest violation of `c_{-m} = conj(c_m)`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for idx in 0..self.lattice.len() {
            let mi = self.lattice.mirror(idx);
            for c in 0..3 {
                worst = worst.max((self.comps[c][idx] - self.comps[c][mi].conj()).norm());
            }
        }
        worst
    }

    /// Largest `|ξ·c_m|` over the lattice, i.e. the sup of the divergence
    /// symbol.
    pub fn divergence_defect(&self) -> T {
        let mut worst = T::zero();
        for idx in 1..self.lattice.len() {
            let xi = self.lattice.wavevector(idx);
            let a = self.at(idx);
            let d = a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2];
            worst = worst.max(d.norm());
        }
        worst
    }

    /// Energy per integer shell `|m|^2`, indexed by shell.
    pub fn shell_energy(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.lattice.max_shell() as usize + 1];
        for idx in 0..self.lattice.len() {
            let a = self.at(idx);
            let s = self.lattice.shell(idx) as usize;
            out[s] = out[s] + a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr();
        }
        out
    }

    /// Largest coefficient difference against `other`.
    pub fn max_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for c in 0..3 {
            for (a, b) in self.comps[c].iter().zip(&other.comps[c]) {
                worst = worst.max((*a - *b).norm());
            }
        }
        worst
    }

    /// Converts the coefficients to another precision.
    pub fn cast<U: Real>(&self, lattice: &LatticeRef<U>) -> Result<SpectralField<U>> {
        if lattice.n() != self.lattice.n() {
            return Err(Error::LatticeMismatch("grid size differs".into()));
        }
        let conv = |v: &Vec<Cplx<T>>| -> Vec<Cplx<U>> {
            v.iter().map(|z| Cplx::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))).collect()
        };
        SpectralField::from_components(lattice, [conv(&self.comps[0]), conv(&self.comps[1]), conv(&self.comps[2])])
    }
}

/// Real three-component field sampled on the physical grid.
#[derive(Debug, Clone)]
pub struct PhysicalField<T: Real> {
    lattice: LatticeRef<T>,
    comps: [Vec<T>; 3],
}

impl<T: Real> PhysicalField<T> {
    pub fn zeros(lattice: &LatticeRef<T>) -> Self {
        let z = vec![T::zero(); lattice.len()];
        Self { lattice: lattice.clone(), comps: [z.clone(), z.clone(), z] }
    }

    pub fn from_components(lattice: &LatticeRef<T>, comps: [Vec<T>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != lattice.len() {
                return Err(Error::LatticeMismatch(format!(
                    "{} samples for a grid of {} points",
                    c.len(),
                    lattice.len()
                )));
            }
        }
        Ok(Self { lattice: lattice.clone(), comps })
    }

    /// Samples a closure at the grid points `x_j = j L / n`.
    pub fn from_fn<F: FnMut([T; 3]) -> [T; 3]>(lattice: &LatticeRef<T>, mut f: F) -> Self {
        let n = lattice.n();
        let h = lattice.length() / T::of_usize(n);
        let mut out = Self::zeros(lattice);
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    let x = [T::of_usize(i0) * h, T::of_usize(i1) * h, T::of_usize(i2) * h];
                    let v = f(x);
                    let idx = (i0 * n + i1) * n + i2;
                    for c in 0..3 {
                        out.comps[c][idx] = v[c];
                    }
                }
            }
        }
        out
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        &self.lattice
    }

    pub fn comps(&self) -> &[Vec<T>; 3] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [Vec<T>; 3] {
        &mut self.comps
    }

    pub fn comp(&self, c: usize) -> &[T] {
        &self.comps[c]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [T; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// Root mean square over the grid, which equals the normalized `L^2` norm
    /// of the trigonometric interpolant.
    pub fn norm_l2(&self) -> T {
        let s: T = self.comps.iter().flat_map(|c| c.iter()).map(|x| *x * *x).sum();
        (s / T::of_usize(self.lattice.len())).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().flat_map(|c| c.iter()).map(|x| x.abs()).fold(T::zero(), T::max)
    }

    pub fn axpy(&mut self, a: T, x: &Self) {
        for c in 0..3 {
            for (s, xv) in self.comps[c].iter_mut().zip(&x.comps[c]) {
                *s = *s + a * *xv;
            }
        }
    }
}
