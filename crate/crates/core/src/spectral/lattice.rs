use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest supported number of grid points per axis.
pub const MIN_POINTS: usize = 8;
/// Largest supported number of grid points per axis.
pub const MAX_POINTS: usize = 512;

/// Spectral truncation band, expressed as a per-axis cutoff on |m_i|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// Every lattice mode.
    Full,
    /// 2/3-rule: quadratic products are alias-free on this band.
    TwoThirds,
    /// 1/2-rule: cubic products are alias-free on this band.
    Half,
}

impl Band {
    /// Largest retained |m_i| on an `n`-point axis.
    pub fn cutoff(self, n: usize) -> usize {
        match self {
            Band::Full => n / 2,
            // largest K with 3K < n
            Band::TwoThirds => (n - 1) / 3,
            // largest K with 4K < n
            Band::Half => (n - 1) / 4,
        }
    }
}

/// Periodic box `[0, L)^3` sampled on `n^3` points, together with its dual
/// lattice of integer modes `m ∈ (-n/2, n/2]^3` and wavevectors `ξ = (2π/L) m`.
///
/// The zero mode is part of the lattice but every field produced by this
/// crate keeps it at exactly zero.
pub struct FrequencyLattice<T: Real> {
    n: usize,
    length: T,
    base: T,
    /// signed mode number per axis index
    modes: Vec<i64>,
    /// |m|^2 per flat index
    shell: Vec<u32>,
    /// max_i |m_i| per flat index
    linf: Vec<u32>,
    /// flat index of -m per flat index
    mirror: Vec<u32>,
    pub(crate) fft_forward: Arc<dyn Fft<T>>,
    pub(crate) fft_inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for FrequencyLattice<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyLattice")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl<T: Real> FrequencyLattice<T> {
    /// Builds the lattice for `n` points per axis on a box of side `length`.
    pub fn new(n: usize, length: T) -> Result<Arc<Self>> {
        if n < MIN_POINTS || n % 2 != 0 || n > MAX_POINTS {
            return Err(Error::Config(format!(
                "grid size n = {n} unsupported: need an even value in [{MIN_POINTS}, {MAX_POINTS}]"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::Config(format!("box length must be positive, got {length}")));
        }
        let modes: Vec<i64> = (0..n)
            .map(|i| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 })
            .collect();
        let total = n * n * n;
        let mut shell = Vec::with_capacity(total);
        let mut linf = Vec::with_capacity(total);
        let mut mirror = Vec::with_capacity(total);
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    let m = [modes[i0], modes[i1], modes[i2]];
                    shell.push((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as u32);
                    linf.push(m.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u32);
                    let j0 = (n - i0) % n;
                    let j1 = (n - i1) % n;
                    let j2 = (n - i2) % n;
                    mirror.push(((j0 * n + j1) * n + j2) as u32);
                }
            }
        }
        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(n);
        let fft_inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Self {
            n,
            length,
            base: T::lit(2.0) * T::PI() / length,
            modes,
            shell,
            linf,
            mirror,
            fft_forward,
            fft_inverse,
        }))
    }

    /// Grid points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Box side length `L`.
    pub fn length(&self) -> T {
        self.length
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn base(&self) -> T {
        self.base
    }

    /// Number of lattice modes, `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Two lattices are compatible when they describe the same grid and box.
    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }

    pub fn index_of(&self, m: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        let half = n / 2;
        let mut idx = 0usize;
        for &mi in &m {
            if mi <= -half || mi > half {
                return None;
            }
            let i = if mi >= 0 { mi } else { mi + n };
            idx = idx * self.n + i as usize;
        }
        Some(idx)
    }

    /// Integer mode triple at a flat index.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [self.modes[idx / (n * n)], self.modes[(idx / n) % n], self.modes[idx % n]]
    }

    /// Wavevector `ξ = (2π/L) m` at a flat index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [T; 3] {
        let m = self.mode(idx);
        [
            self.base * T::of_i64(m[0]),
            self.base * T::of_i64(m[1]),
            self.base * T::of_i64(m[2]),
        ]
    }

    /// Integer shell `|m|^2` at a flat index.
    #[inline]
    pub fn shell(&self, idx: usize) -> u32 {
        self.shell[idx]
    }

    /// Largest shell index present on the lattice.
    pub fn max_shell(&self) -> u32 {
        self.shell.iter().copied().max().unwrap_or(0)
    }

    /// `|ξ|^2` for an integer shell.
    #[inline]
    pub fn shell_xi2(&self, shell: u32) -> T {
        self.base * self.base * T::of_usize(shell as usize)
    }

    /// `|ξ|^2` at a flat index.
    #[inline]
    pub fn xi2(&self, idx: usize) -> T {
        self.shell_xi2(self.shell[idx])
    }

    #[inline]
    pub fn xi_norm(&self, idx: usize) -> T {
        self.xi2(idx).sqrt()
    }

    /// Flat index of the mirrored mode `-m`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        self.mirror[idx] as usize
    }

    #[inline]
    pub fn is_zero_mode(&self, idx: usize) -> bool {
        idx == 0
    }

    /// Whether the mode at `idx` survives truncation to `band`.
    #[inline]
    pub fn in_band(&self, idx: usize, band: Band) -> bool {
        match band {
            Band::Full => true,
            _ => self.linf[idx] as usize <= band.cutoff(self.n),
        }
    }

    /// Whether the mode sits on a Nyquist plane (`m_i = n/2` on some axis).
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.linf[idx] as usize == self.n / 2 && {
            let m = self.mode(idx);
            m.iter().any(|&x| x == (self.n / 2) as i64)
        }
    }

    /// Distinct nonzero shells present on the lattice, ascending.
    pub fn shells(&self) -> Vec<u32> {
        let mut seen = vec![false; self.max_shell() as usize + 1];
        for &s in &self.shell {
            seen[s as usize] = true;
        }
        seen.iter()
            .enumerate()
            .filter(|(s, &p)| *s > 0 && p)
            .map(|(s, _)| s as u32)
            .collect()
    }

    /// Distinct nonzero shells within a band, ascending.
    pub fn shells_in_band(&self, band: Band) -> Vec<u32> {
        let mut seen = vec![false; self.max_shell() as usize + 1];
        for idx in 0..self.len() {
            if self.in_band(idx, band) {
                seen[self.shell[idx] as usize] = true;
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(s, &p)| *s > 0 && p)
            .map(|(s, _)| s as u32)
            .collect()
    }

    /// Smallest and largest nonzero `|ξ|` on the lattice.
    pub fn xi_range(&self) -> (T, T) {
        let max = self.shell_xi2(self.max_shell()).sqrt();
        (self.base, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_grids() {
        assert!(FrequencyLattice::<f64>::new(7, 1.0).is_err());
        assert!(FrequencyLattice::<f64>::new(6, 1.0).is_err());
        assert!(FrequencyLattice::<f64>::new(8, -1.0).is_err());
        assert!(FrequencyLattice::<f64>::new(8, 1.0).is_ok());
    }

    #[test]
    fn index_mode_roundtrip_and_mirror() {
        let lat = FrequencyLattice::<f64>::new(8, 2.0 * std::f64::consts::PI).unwrap();
        for idx in 0..lat.len() {
            let m = lat.mode(idx);
            assert_eq!(lat.index_of(m), Some(idx));
            let mi = lat.mirror(idx);
            let mm = lat.mode(mi);
            if !lat.is_nyquist(idx) {
                assert_eq!(mm, [-m[0], -m[1], -m[2]]);
            }
            assert_eq!(lat.mirror(mi), idx);
        }
    }

    #[test]
    fn wavevector_span() {
        let lat = FrequencyLattice::<f64>::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let (lo, hi) = lat.xi_range();
        assert!((lo - 1.0).abs() < 1e-15);
        assert!((hi - 8.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn band_cutoffs() {
        assert_eq!(Band::TwoThirds.cutoff(32), 10);
        assert_eq!(Band::Half.cutoff(32), 7);
        assert_eq!(Band::TwoThirds.cutoff(48), 15);
        assert_eq!(Band::Half.cutoff(48), 11);
        assert_eq!(Band::TwoThirds.cutoff(8), 2);
        assert_eq!(Band::Half.cutoff(8), 1);
    }
}
