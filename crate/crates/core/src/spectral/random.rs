use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::field::{LatticeRef, SpectralField};
use crate::spectral::lattice::Band;
use crate::spectral::ops::project_solenoidal_in_place;

/// Seeded random real field with `|c_m| ∝ |ξ|^{-slope}` and uniform phases,
/// restricted to `band` minus the Nyquist planes and normalized to unit `L^2` norm.
pub fn random_field<T: Real>(
    lattice: &LatticeRef<T>,
    slope: f64,
    seed: u64,
    divergence_free: bool,
    band: Band,
) -> Result<SpectralField<T>> {
    if !(1.0..=5.0).contains(&slope) {
        return Err(Error::RejectedInput(format!("spectral slope {slope} outside [1, 5]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(lattice);
    let tau = std::f64::consts::TAU;
    for idx in 1..lattice.len() {
        let mi = lattice.mirror(idx);
        if mi < idx || !lattice.in_band(idx, band) || lattice.is_nyquist(idx) {
            continue;
        }
        let amp = lattice.xi2(idx).as_f64().powf(-0.5 * slope);
        let mut v = [Cplx::default(); 3];
        for z in v.iter_mut() {
            let phase: f64 = rng.gen::<f64>() * tau;
            *z = Cplx::new(T::lit(amp * phase.cos()), T::lit(amp * phase.sin()));
        }
        f.set(idx, v);
        f.set(mi, [v[0].conj(), v[1].conj(), v[2].conj()]);
    }
    if divergence_free {
        project_solenoidal_in_place(&mut f);
    }
    let norm = f.norm_l2();
    if norm > T::zero() {
        f.scale(T::one() / norm);
    }
    Ok(f)
}

fn mode_seed(seed: u64, m: [i64; 3]) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for c in m {
        h = (h ^ c as u64).wrapping_mul(0xff51_afd7_ed55_8ccd);
        h ^= h >> 33;
    }
    h
}

/// Like [`random_field`], but each mode draws its phases from a generator
/// keyed by `(seed, m)` and the result is not normalized, so lattices of
/// different size share identical coefficients on their common modes.
pub fn random_field_nested<T: Real>(
    lattice: &LatticeRef<T>,
    slope: f64,
    seed: u64,
    divergence_free: bool,
    band: Band,
) -> Result<SpectralField<T>> {
    if !(1.0..=5.0).contains(&slope) {
        return Err(Error::RejectedInput(format!("spectral slope {slope} outside [1, 5]")));
    }
    let mut f = SpectralField::zeros(lattice);
    let tau = std::f64::consts::TAU;
    for idx in 1..lattice.len() {
        if !lattice.in_band(idx, band) || lattice.is_nyquist(idx) {
            continue;
        }
        let m = lattice.mode(idx);
        let neg = m.map(|c| -c);
        if m < neg {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, m));
        let amp = lattice.xi2(idx).as_f64().powf(-0.5 * slope);
        let mut v = [Cplx::default(); 3];
        for z in v.iter_mut() {
            let phase: f64 = rng.gen::<f64>() * tau;
            *z = Cplx::new(T::lit(amp * phase.cos()), T::lit(amp * phase.sin()));
        }
        f.set(idx, v);
        f.set(lattice.mirror(idx), [v[0].conj(), v[1].conj(), v[2].conj()]);
    }
    if divergence_free {
        project_solenoidal_in_place(&mut f);
    }
    Ok(f)
}
