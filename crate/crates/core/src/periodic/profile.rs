use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::field::check_same;
use crate::spectral::ops::project_solenoidal_in_place;
use crate::spectral::{random_field, Band, LatticeRef, SpectralField};

/// Truncated time-Fourier series `Σ_{|k| ≤ K} c_k e^{iωkt}`, `ω = 2π/T`,
/// with spatial coefficient fields `c_k`.
///
/// Real trajectories satisfy `c_{-k}(-m) = conj(c_k(m))`; individual
/// `c_k` with `k ≠ 0` are not Hermitian in space.
#[derive(Debug, Clone)]
pub struct PeriodicProfile<T: Real> {
    period: f64,
    k_max: usize,
    collocation: usize,
    modes: Vec<SpectralField<T>>,
}

fn check_period(period: f64) -> Result<()> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Config(format!("period must be positive, got {period}")));
    }
    Ok(())
}

impl<T: Real> PeriodicProfile<T> {
    pub fn zeros(lattice: &LatticeRef<T>, period: f64, k_max: usize) -> Result<Self> {
        check_period(period)?;
        let modes = (0..2 * k_max + 1).map(|_| SpectralField::zeros(lattice)).collect();
        Ok(Self { period, k_max, collocation: 4 * k_max + 1, modes })
    }

    /// Profile from the coefficient list `[c_{-K}, …, c_K]`.
    pub fn from_modes(period: f64, modes: Vec<SpectralField<T>>) -> Result<Self> {
        check_period(period)?;
        if modes.len() % 2 == 0 {
            return Err(Error::RejectedInput(format!("expected an odd number of time modes, got {}", modes.len())));
        }
        for m in &modes[1..] {
            check_same(modes[0].lattice(), m.lattice())?;
        }
        let k_max = modes.len() / 2;
        Ok(Self { period, k_max, collocation: 4 * k_max + 1, modes })
    }

    /// Time-independent profile.
    pub fn constant(field: &SpectralField<T>, period: f64, k_max: usize) -> Result<Self> {
        let mut p = Self::zeros(field.lattice(), period, k_max)?;
        p.modes[k_max] = field.clone();
        Ok(p)
    }

    /// Overrides the collocation count used for nonlinear terms.
    pub fn with_collocation(mut self, n_t: usize) -> Self {
        self.collocation = n_t;
        self
    }

    pub fn lattice(&self) -> &LatticeRef<T> {
        self.modes[0].lattice()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn omega(&self) -> f64 {
        std::f64::consts::TAU / self.period
    }

    pub fn collocation(&self) -> usize {
        self.collocation
    }

    pub fn modes(&self) -> &[SpectralField<T>] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [SpectralField<T>] {
        &mut self.modes
    }

    /// Time modes paired with their index `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &SpectralField<T>)> {
        let k0 = self.k_max as i64;
        self.modes.iter().enumerate().map(move |(i, f)| (i as i64 - k0, f))
    }

    pub fn mode(&self, k: i64) -> Option<&SpectralField<T>> {
        let i = k + self.k_max as i64;
        (0..self.modes.len() as i64).contains(&i).then(|| &self.modes[i as usize])
    }

    pub fn mode_mut(&mut self, k: i64) -> Option<&mut SpectralField<T>> {
        let i = k + self.k_max as i64;
        (0..self.modes.len() as i64).contains(&i).then(move || &mut self.modes[i as usize])
    }

    /// Time mean, `c_0`.
    pub fn mean(&self) -> &SpectralField<T> {
        &self.modes[self.k_max]
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        check_same(self.lattice(), other.lattice())?;
        if self.k_max != other.k_max || (self.period - other.period).abs() > 1e-14 * self.period {
            return Err(Error::RejectedInput(format!(
                "profiles differ: (T = {}, K = {}) vs (T = {}, K = {})",
                self.period, self.k_max, other.period, other.k_max
            )));
        }
        Ok(())
    }

    /// Evaluates the real field at time `t` by exact summation.
    pub fn sample(&self, t: f64) -> SpectralField<T> {
        let lat = self.lattice();
        let mut out = SpectralField::zeros(lat);
        let w = self.omega();
        for (k, f) in self.iter() {
            let (s, c) = (w * k as f64 * t).sin_cos();
            let ph = Cplx::new(T::lit(c), T::lit(s));
            for comp in 0..3 {
                for (o, x) in out.comp_mut(comp).iter_mut().zip(f.comp(comp)) {
                    *o = *o + *x * ph;
                }
            }
        }
        out
    }

    /// Equispaced times `jT/N_t`, `j = 0..N_t`.
    pub fn collocation_times(&self) -> Vec<f64> {
        let n = self.collocation;
        (0..n).map(|j| self.period * j as f64 / n as f64).collect()
    }

    /// Fields at the collocation times.
    pub fn samples(&self) -> Vec<SpectralField<T>> {
        self.collocation_times().par_iter().map(|&t| self.sample(t)).collect()
    }

    /// Discrete time-Fourier analysis of `N_t` equispaced samples over one
    /// period, keeping `|k| ≤ K`.
    pub fn from_samples(period: f64, k_max: usize, samples: &[SpectralField<T>]) -> Result<Self> {
        check_period(period)?;
        let n = samples.len();
        if n == 0 {
            return Err(Error::Empty("time samples".into()));
        }
        if n < 2 * k_max + 1 {
            return Err(Error::Aliasing(format!("{n} time samples cannot resolve K = {k_max}")));
        }
        for s in &samples[1..] {
            check_same(samples[0].lattice(), s.lattice())?;
        }
        let lat = samples[0].lattice().clone();
        let inv = T::one() / T::of_usize(n);
        let modes: Vec<SpectralField<T>> = (0..2 * k_max + 1)
            .into_par_iter()
            .map(|i| {
                let k = i as i64 - k_max as i64;
                let mut acc = SpectralField::zeros(&lat);
                for (j, s) in samples.iter().enumerate() {
                    let ang = -std::f64::consts::TAU * ((k * j as i64).rem_euclid(n as i64)) as f64 / n as f64;
                    let ph = Cplx::new(T::lit(ang.cos()), T::lit(ang.sin())) * inv;
                    for comp in 0..3 {
                        for (o, x) in acc.comp_mut(comp).iter_mut().zip(s.comp(comp)) {
                            *o = *o + *x * ph;
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(Self { period, k_max, collocation: 4 * k_max + 1, modes })
    }

    /// Largest violation of `c_{-k}(-m) = conj(c_k(m))`.
    pub fn reality_defect(&self) -> f64 {
        let lat = self.lattice();
        let k0 = self.k_max;
        let mut worst = 0.0f64;
        for i in 0..self.modes.len() {
            let j = 2 * k0 - i;
            for idx in 0..lat.len() {
                let mi = lat.mirror(idx);
                let a = self.modes[i].at(idx);
                let b = self.modes[j].at(mi);
                for c in 0..3 {
                    worst = worst.max((a[c] - b[c].conj()).norm().as_f64());
                }
            }
        }
        worst
    }

    /// Projects onto real trajectories by averaging mirrored coefficients.
    pub fn enforce_reality(&mut self) {
        let lat = self.lattice().clone();
        let k0 = self.k_max;
        let half = T::lit(0.5);
        for i in 0..=k0 {
            let j = 2 * k0 - i;
            for idx in 0..lat.len() {
                let mi = lat.mirror(idx);
                if i == j && mi < idx {
                    continue;
                }
                let a = self.modes[i].at(idx);
                let b = self.modes[j].at(mi);
                let v = [0, 1, 2].map(|c| (a[c] + b[c].conj()) * half);
                self.modes[i].set(idx, v);
                self.modes[j].set(mi, v.map(|z| z.conj()));
            }
        }
    }

    /// `(∫_0^T ‖f(t)‖² dt)^{1/2} = (T Σ_k ‖c_k‖²)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.modes.iter().map(|f| f.norm_l2_sq().as_f64()).sum();
        (self.period * s).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.iter().map(|f| f.max_abs().as_f64()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.modes.iter().all(|f| f.is_finite())
    }

    pub fn scale(&mut self, a: T) {
        for f in &mut self.modes {
            f.scale(a);
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: T, x: &Self) -> Result<()> {
        self.check_compatible(x)?;
        for (f, g) in self.modes.iter_mut().zip(&x.modes) {
            f.axpy(a, g);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(T::one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-T::one(), other)?;
        Ok(out)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.modes.iter().zip(&other.modes).map(|(a, b)| a.max_diff(b).as_f64()).fold(0.0, f64::max)
    }

    pub fn truncate(&mut self, band: Band) {
        for f in &mut self.modes {
            f.truncate(band);
        }
    }

    pub fn truncated(&self, band: Band) -> Self {
        let mut out = self.clone();
        out.truncate(band);
        out
    }

    /// Removes the spatial mean of every time mode.
    pub fn clear_zero_mode(&mut self) {
        for f in &mut self.modes {
            f.clear_zero_mode();
        }
    }

    pub fn project_solenoidal(&mut self) {
        for f in &mut self.modes {
            project_solenoidal_in_place(f);
        }
    }

    /// Largest `|ξ·c_k(ξ)|` over time modes and wavevectors.
    pub fn divergence_defect(&self) -> f64 {
        self.modes.iter().map(|f| f.divergence_defect().as_f64()).fold(0.0, f64::max)
    }

    /// Exact time derivative, `c_k ↦ iωk c_k`.
    pub fn time_derivative(&self) -> Self {
        let mut out = self.clone();
        let w = self.omega();
        for (i, f) in out.modes.iter_mut().enumerate() {
            let k = i as i64 - self.k_max as i64;
            let z = Cplx::new(T::zero(), T::lit(w * k as f64));
            for comp in 0..3 {
                for x in f.comp_mut(comp) {
                    *x = *x * z;
                }
            }
        }
        out
    }

    /// Same coefficients with the time cutoff changed to `k_new`, padding
    /// with zeros or dropping `|k| > k_new`.
    pub fn resized(&self, k_new: usize) -> Self {
        let lat = self.lattice();
        let modes = (0..2 * k_new + 1)
            .map(|i| {
                let k = i as i64 - k_new as i64;
                self.mode(k).cloned().unwrap_or_else(|| SpectralField::zeros(lat))
            })
            .collect();
        Self { period: self.period, k_max: k_new, collocation: 4 * k_new + 1, modes }
    }
}

/// Seeded random real profile: `c_0` and `c_{±k} = w_k (a_k ± i b_k)` with
/// independent random real fields `a_k`, `b_k` of the given slope and
/// weights `w_k = (1 + k)^{-2}`, scaled to `L^2(0, T)` norm `amplitude`.
#[allow(clippy::too_many_arguments)]
pub fn random_profile<T: Real>(
    lattice: &LatticeRef<T>,
    period: f64,
    k_max: usize,
    slope: f64,
    seed: u64,
    divergence_free: bool,
    band: Band,
    amplitude: f64,
) -> Result<PeriodicProfile<T>> {
    let mut p = PeriodicProfile::zeros(lattice, period, k_max)?;
    let k0 = k_max as i64;
    let sub = |j: u64| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(j);
    p.modes[k_max] = random_field(lattice, slope, sub(0), divergence_free, band)?;
    for k in 1..=k0 {
        let w = T::lit((1.0 + k as f64).powi(-2));
        let a = random_field(lattice, slope, sub(2 * k as u64 - 1), divergence_free, band)?;
        let b = random_field(lattice, slope, sub(2 * k as u64), divergence_free, band)?;
        let mut plus = SpectralField::zeros(lattice);
        let mut minus = SpectralField::zeros(lattice);
        for comp in 0..3 {
            let (ac, bc) = (a.comp(comp), b.comp(comp));
            for (idx, (x, y)) in ac.iter().zip(bc).enumerate() {
                let iy = Cplx::new(-y.im, y.re);
                plus.comp_mut(comp)[idx] = (*x + iy) * w;
                minus.comp_mut(comp)[idx] = (*x - iy) * w;
            }
        }
        p.modes[(k0 + k) as usize] = plus;
        p.modes[(k0 - k) as usize] = minus;
    }
    let n = p.norm_l2();
    if n > 0.0 {
        p.scale(T::lit(amplitude / n));
    }
    Ok(p)
}
