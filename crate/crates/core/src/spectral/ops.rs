use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::field::{ScalarField, SpectralField};

/// `a × b` for complex 3-vectors.
#[inline]
pub fn cross3<T: Real>(a: [Cplx<T>; 3], b: [Cplx<T>; 3]) -> [Cplx<T>; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `ξ × a` with real `ξ`.
#[inline]
pub fn xi_cross<T: Real>(xi: [T; 3], a: [Cplx<T>; 3]) -> [Cplx<T>; 3] {
    [
        a[2] * xi[1] - a[1] * xi[2],
        a[0] * xi[2] - a[2] * xi[0],
        a[1] * xi[0] - a[0] * xi[1],
    ]
}

/// `iξ × a`.
#[inline]
pub fn i_xi_cross<T: Real>(xi: [T; 3], a: [Cplx<T>; 3]) -> [Cplx<T>; 3] {
    let v = xi_cross(xi, a);
    [mul_i(v[0]), mul_i(v[1]), mul_i(v[2])]
}

#[inline]
pub fn xi_dot<T: Real>(xi: [T; 3], a: [Cplx<T>; 3]) -> Cplx<T> {
    a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2]
}

#[inline]
pub fn mul_i<T: Real>(z: Cplx<T>) -> Cplx<T> {
    Cplx::new(-z.im, z.re)
}

/// Curl, `iξ × c_m`.
pub fn curl<T: Real>(f: &SpectralField<T>) -> SpectralField<T> {
    let lat = f.lattice().clone();
    let mut out = SpectralField::zeros(&lat);
    for idx in 1..lat.len() {
        if lat.is_nyquist(idx) {
            continue;
        }
        out.set(idx, i_xi_cross(lat.wavevector(idx), f.at(idx)));
    }
    out
}

/// Divergence, `iξ · c_m`.
pub fn divergence<T: Real>(f: &SpectralField<T>) -> ScalarField<T> {
    let lat = f.lattice().clone();
    let mut out = ScalarField::zeros(&lat);
    for idx in 1..lat.len() {
        if lat.is_nyquist(idx) {
            continue;
        }
        out.coeffs_mut()[idx] = mul_i(xi_dot(lat.wavevector(idx), f.at(idx)));
    }
    out
}

/// Gradient of a scalar, `iξ c_m`.
pub fn gradient<T: Real>(s: &ScalarField<T>) -> SpectralField<T> {
    let lat = s.lattice().clone();
    let mut out = SpectralField::zeros(&lat);
    for idx in 1..lat.len() {
        if lat.is_nyquist(idx) {
            continue;
        }
        let xi = lat.wavevector(idx);
        let z = mul_i(s.coeffs()[idx]);
        out.set(idx, [z * xi[0], z * xi[1], z * xi[2]]);
    }
    out
}

/// Vector Laplacian, `-|ξ|^2 c_m`.
pub fn laplacian<T: Real>(f: &SpectralField<T>) -> SpectralField<T> {
    let lat = f.lattice().clone();
    let mut out = f.clone();
    for idx in 0..lat.len() {
        let w = -lat.xi2(idx);
        let a = f.at(idx);
        out.set(idx, [a[0] * w, a[1] * w, a[2] * w]);
    }
    out
}

/// Solenoidal part of `c` at wavevector `ξ`, `c - ξ(ξ·c)/|ξ|^2`.
#[inline]
pub fn project_mode<T: Real>(xi: [T; 3], xi2: T, c: [Cplx<T>; 3]) -> [Cplx<T>; 3] {
    let d = xi_dot(xi, c) / xi2;
    [c[0] - d * xi[0], c[1] - d * xi[1], c[2] - d * xi[2]]
}

/// Applies the Leray projector, dropping the zero mode.
///
/// Like every odd-order operator here, it drops the Nyquist planes, where
/// `ξ` has no consistent sign.
pub fn project_solenoidal<T: Real>(f: &SpectralField<T>) -> SpectralField<T> {
    let lat = f.lattice().clone();
    let mut out = SpectralField::zeros(&lat);
    for idx in 1..lat.len() {
        if lat.is_nyquist(idx) {
            continue;
        }
        out.set(idx, project_mode(lat.wavevector(idx), lat.xi2(idx), f.at(idx)));
    }
    out
}

/// In-place variant of [`project_solenoidal`].
pub fn project_solenoidal_in_place<T: Real>(f: &mut SpectralField<T>) {
    let lat = f.lattice().clone();
    f.clear_zero_mode();
    for idx in 1..lat.len() {
        let v = if lat.is_nyquist(idx) {
            [Cplx::default(); 3]
        } else {
            project_mode(lat.wavevector(idx), lat.xi2(idx), f.at(idx))
        };
        f.set(idx, v);
    }
}

/// Helmholtz split of a mean-free field.
#[derive(Debug, Clone)]
pub struct LerayParts<T: Real> {
    pub solenoidal: SpectralField<T>,
    pub gradient: SpectralField<T>,
}

/// Splits `f = P f + (I - P) f`. Fields with a nonzero mean are rejected.
pub fn leray_project<T: Real>(f: &SpectralField<T>) -> Result<LerayParts<T>> {
    let z = f.zero_mode();
    let tol = T::lit(1e3) * T::epsilon() * (T::one() + f.max_abs());
    if z.iter().any(|c| c.norm() > tol) {
        return Err(Error::RejectedInput("field has a nonzero mean".into()));
    }
    let solenoidal = project_solenoidal(f);
    let mut gradient = f.sub(&solenoidal)?;
    gradient.clear_zero_mode();
    Ok(LerayParts { solenoidal, gradient })
}
