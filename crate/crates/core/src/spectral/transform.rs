use rayon::prelude::*;

use crate::error::Result;
use crate::scalar::{imag_unit, Cplx, Real};
use crate::spectral::field::{check_same, LatticeRef, PhysicalField, ScalarField, SpectralField};
use crate::spectral::lattice::FrequencyLattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized 3D FFT over an `n^3` row-major buffer.
fn fft3<T: Real>(lat: &FrequencyLattice<T>, data: &mut [Cplx<T>], dir: Direction) {
    let n = lat.n();
    let plan = match dir {
        Direction::Forward => lat.fft_forward.clone(),
        Direction::Inverse => lat.fft_inverse.clone(),
    };
    let slab = n * n;

    // last axis: contiguous lines; middle axis: gathered per slab
    data.par_chunks_mut(slab).for_each(|s| {
        plan.process(s);
        let mut buf = vec![Cplx::default(); slab];
        for i1 in 0..n {
            for i2 in 0..n {
                buf[i2 * n + i1] = s[i1 * n + i2];
            }
        }
        plan.process(&mut buf);
        for i1 in 0..n {
            for i2 in 0..n {
                s[i1 * n + i2] = buf[i2 * n + i1];
            }
        }
    });

    // first axis: gather each i1 plane into lines along i0
    let planes: Vec<Vec<Cplx<T>>> = (0..n)
        .into_par_iter()
        .map(|i1| {
            let mut buf = vec![Cplx::default(); slab];
            for i0 in 0..n {
                let row = &data[(i0 * n + i1) * n..(i0 * n + i1 + 1) * n];
                for i2 in 0..n {
                    buf[i2 * n + i0] = row[i2];
                }
            }
            plan.process(&mut buf);
            buf
        })
        .collect();
    for (i1, buf) in planes.iter().enumerate() {
        for i0 in 0..n {
            let row = &mut data[(i0 * n + i1) * n..(i0 * n + i1 + 1) * n];
            for i2 in 0..n {
                row[i2] = buf[i2 * n + i0];
            }
        }
    }
}

/// Synthesis: samples `Σ c_m e^{iξ·x}` of one complex coefficient array.
pub fn inverse_complex<T: Real>(lat: &FrequencyLattice<T>, coeffs: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let mut buf = coeffs.to_vec();
    fft3(lat, &mut buf, Direction::Inverse);
    buf
}

/// Analysis: coefficients `n^{-3} Σ_x f(x) e^{-iξ·x}` of complex samples.
pub fn forward_complex<T: Real>(lat: &FrequencyLattice<T>, samples: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let mut buf = samples.to_vec();
    fft3(lat, &mut buf, Direction::Forward);
    let w = T::one() / T::of_usize(lat.len());
    for z in buf.iter_mut() {
        *z = *z * w;
    }
    buf
}

/// Synthesizes a list of Hermitian coefficient arrays into real samples,
/// two arrays per complex transform.
pub fn inverse_real<T: Real>(lat: &FrequencyLattice<T>, specs: &[&[Cplx<T>]]) -> Vec<Vec<T>> {
    let i = imag_unit::<T>();
    let mut out = Vec::with_capacity(specs.len());
    for pair in specs.chunks(2) {
        let packed: Vec<Cplx<T>> = if pair.len() == 2 {
            pair[0].iter().zip(pair[1]).map(|(a, b)| *a + i * *b).collect()
        } else {
            pair[0].to_vec()
        };
        let mut buf = packed;
        fft3(lat, &mut buf, Direction::Inverse);
        out.push(buf.iter().map(|z| z.re).collect());
        if pair.len() == 2 {
            out.push(buf.iter().map(|z| z.im).collect());
        }
    }
    out
}

/// Analyzes a list of real sample arrays, two per complex transform.
pub fn forward_real<T: Real>(lat: &FrequencyLattice<T>, reals: &[&[T]]) -> Vec<Vec<Cplx<T>>> {
    let w = T::one() / T::of_usize(lat.len());
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(reals.len());
    for pair in reals.chunks(2) {
        let mut buf: Vec<Cplx<T>> = if pair.len() == 2 {
            pair[0].iter().zip(pair[1]).map(|(a, b)| Cplx::new(*a, *b)).collect()
        } else {
            pair[0].iter().map(|a| Cplx::new(*a, T::zero())).collect()
        };
        fft3(lat, &mut buf, Direction::Forward);
        if pair.len() == 2 {
            let mut a = vec![Cplx::default(); buf.len()];
            let mut b = vec![Cplx::default(); buf.len()];
            for idx in 0..buf.len() {
                let z = buf[idx] * w;
                let zm = buf[lat.mirror(idx)].conj() * w;
                a[idx] = (z + zm) * half;
                // (z - zm) / (2i)
                let d = (z - zm) * half;
                b[idx] = Cplx::new(d.im, -d.re);
            }
            out.push(a);
            out.push(b);
        } else {
            out.push(buf.into_iter().map(|z| z * w).collect());
        }
    }
    out
}

/// Samples a vector field on the physical grid.
pub fn to_physical<T: Real>(field: &SpectralField<T>) -> PhysicalField<T> {
    let lat = field.lattice();
    let c = field.comps();
    let mut v = inverse_real(lat, &[&c[0], &c[1], &c[2]]).into_iter();
    let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
    PhysicalField::from_components(lat, comps).expect("sizes agree by construction")
}

/// Samples several vector fields at once, sharing transforms across fields.
pub fn to_physical_many<T: Real>(fields: &[&SpectralField<T>]) -> Vec<PhysicalField<T>> {
    if fields.is_empty() {
        return Vec::new();
    }
    let lat = fields[0].lattice();
    let specs: Vec<&[Cplx<T>]> =
        fields.iter().flat_map(|f| f.comps().iter().map(|c| c.as_slice())).collect();
    let mut v = inverse_real(lat, &specs).into_iter();
    fields
        .iter()
        .map(|_| {
            let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
            PhysicalField::from_components(lat, comps).expect("sizes agree by construction")
        })
        .collect()
}

/// Recovers the coefficients of a sampled vector field. The zero mode is
/// returned as computed; callers that need a mean-free result clear it.
pub fn from_physical<T: Real>(field: &PhysicalField<T>) -> SpectralField<T> {
    let lat = field.lattice();
    let c = field.comps();
    let mut v = forward_real(lat, &[&c[0], &c[1], &c[2]]).into_iter();
    let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
    SpectralField::from_components(lat, comps).expect("sizes agree by construction")
}

/// Analyzes several physical fields at once.
pub fn from_physical_many<T: Real>(fields: &[&PhysicalField<T>]) -> Vec<SpectralField<T>> {
    if fields.is_empty() {
        return Vec::new();
    }
    let lat = fields[0].lattice();
    let reals: Vec<&[T]> = fields.iter().flat_map(|f| f.comps().iter().map(|c| c.as_slice())).collect();
    let mut v = forward_real(lat, &reals).into_iter();
    fields
        .iter()
        .map(|_| {
            let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
            SpectralField::from_components(lat, comps).expect("sizes agree by construction")
        })
        .collect()
}

pub fn scalar_to_physical<T: Real>(field: &ScalarField<T>) -> Vec<T> {
    inverse_real(field.lattice(), &[field.coeffs()]).pop().unwrap()
}

pub fn scalar_from_physical<T: Real>(lat: &LatticeRef<T>, samples: &[T]) -> ScalarField<T> {
    let c = forward_real(lat, &[samples]).pop().unwrap();
    ScalarField::from_coeffs(lat, c).expect("sizes agree by construction")
}

/// Outcome of a spectral → physical → spectral round trip.
#[derive(Debug, Clone, Copy)]
pub struct RoundTrip<T> {
    /// Largest coefficient error after the round trip.
    pub max_coeff_error: T,
    /// Largest imaginary part seen among the physical samples.
    pub max_imag: T,
}

/// Transforms a field to the grid and back, reporting the coefficient error
/// and how far the samples are from real.
pub fn transform_roundtrip<T: Real>(field: &SpectralField<T>) -> Result<RoundTrip<T>> {
    let lat = field.lattice();
    let mut max_imag = T::zero();
    for c in field.comps() {
        let s = inverse_complex(lat, c);
        for z in &s {
            max_imag = max_imag.max(z.im.abs());
        }
    }
    let back = from_physical(&to_physical(field));
    check_same(lat, back.lattice())?;
    Ok(RoundTrip { max_coeff_error: back.max_diff(field), max_imag })
}
