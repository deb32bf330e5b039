//! Per-frequency algebra of the damped Maxwell generator
//! `L̂(ξ)(e, b) = (-σ e + iξ × b, -iξ × e)`.

use crate::error::{Error, Result};
use crate::maxwell::expm::expm;
use crate::scalar::Cplx;

pub type C64 = Cplx<f64>;
pub type Vec3 = [C64; 3];

/// Modes with `|1 - 4|ξ|^2/σ^2|` below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn xi_cross(xi: [f64; 3], a: Vec3) -> Vec3 {
    [
        a[2] * xi[1] - a[1] * xi[2],
        a[0] * xi[2] - a[2] * xi[0],
        a[1] * xi[0] - a[0] * xi[1],
    ]
}

#[inline]
pub fn xi_dot(xi: [f64; 3], a: Vec3) -> C64 {
    a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2]
}

#[inline]
pub fn scale(a: Vec3, s: C64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn vnorm(a: Vec3) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt()
}

fn norm3(xi: [f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

/// Roots of `λ^2 + σλ + |ξ|^2 = 0`, `λ₊` first: the larger one when real,
/// the one with positive imaginary part otherwise.
pub fn eigen_pair_sigma(xi_norm: f64, sigma: f64) -> (C64, C64) {
    let disc = sigma * sigma - 4.0 * xi_norm * xi_norm;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // stable root pair: λ₋ by direct formula, λ₊ = |ξ|^2 / λ₋
        let lm = -(sigma + s) / 2.0;
        let lp = if lm != 0.0 { xi_norm * xi_norm / lm } else { 0.0 };
        (C64::new(lp, 0.0), C64::new(lm, 0.0))
    } else {
        let w = (-disc).sqrt() / 2.0;
        (C64::new(-sigma / 2.0, w), C64::new(-sigma / 2.0, -w))
    }
}

/// Eigenvalues of the normalized operator (`σ = 1`).
pub fn eigen_pair(xi_norm: f64) -> (C64, C64) {
    eigen_pair_sigma(xi_norm, 1.0)
}

/// Whether the mode is too close to the Jordan point for the eigenbasis.
pub fn is_degenerate(xi_norm: f64, sigma: f64) -> bool {
    (1.0 - 4.0 * xi_norm * xi_norm / (sigma * sigma)).abs() < DEGENERACY_TOL
}

/// Splitting of `(Ê, B̂)` into the gradient part and the two transverse
/// eigencomponents: `(Ê, B̂) = (g, 0) + (e0, -(i/λ₋) ξ×e0) + (-(i/λ₋) ξ×b0, b0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDecomposition {
    pub xi: [f64; 3],
    pub sigma: f64,
    pub grad_part: Vec3,
    pub e0: Vec3,
    pub b0: Vec3,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
}

impl ModeDecomposition {
    /// Sum of the three components.
    pub fn recompose(&self) -> (Vec3, Vec3) {
        let k = I / self.lambda_minus;
        let e = add(add(self.grad_part, self.e0), scale(xi_cross(self.xi, self.b0), -k));
        let b = sub(self.b0, scale(xi_cross(self.xi, self.e0), k));
        (e, b)
    }

    /// Evolution of the decomposed data by time `t`.
    pub fn evolve(&self, t: f64) -> (Vec3, Vec3) {
        let k = I / self.lambda_minus;
        let ep = (self.lambda_plus * t).exp();
        let em = (self.lambda_minus * t).exp();
        let eg = (-self.sigma * t).exp();
        let e = add(
            add(scale(self.grad_part, C64::new(eg, 0.0)), scale(self.e0, em)),
            scale(xi_cross(self.xi, self.b0), -k * ep),
        );
        let b = sub(scale(self.b0, ep), scale(xi_cross(self.xi, self.e0), k * em));
        (e, b)
    }
}

/// Eigen-decomposition of one mode with `σ = 1`.
pub fn mode_decompose(e: Vec3, b: Vec3, xi: [f64; 3]) -> Result<ModeDecomposition> {
    mode_decompose_sigma(e, b, xi, 1.0)
}

/// Eigen-decomposition of one mode in closed form.
pub fn mode_decompose_sigma(e: Vec3, b: Vec3, xi: [f64; 3], sigma: f64) -> Result<ModeDecomposition> {
    let r = norm3(xi);
    if r == 0.0 {
        return Err(Error::RejectedInput("zero wavevector".into()));
    }
    if is_degenerate(r, sigma) {
        return Err(Error::Degenerate { xi_norm: r });
    }
    let tol = 1e-10 * (1.0 + vnorm(b)) * r;
    if xi_dot(xi, b).norm() > tol {
        return Err(Error::RejectedInput("magnetic mode is not divergence-free".into()));
    }
    let (lp, lm) = eigen_pair_sigma(r, sigma);
    let r2 = r * r;
    let grad = scale(xi.map(|x| C64::new(x, 0.0)), xi_dot(xi, e) / r2);
    let et = sub(e, grad);
    let k = I / lm;
    let b0 = scale(add(b, scale(xi_cross(xi, et), k)), lm / (lm - lp));
    let e0 = add(et, scale(xi_cross(xi, b0), k));
    Ok(ModeDecomposition { xi, sigma, grad_part: grad, e0, b0, lambda_plus: lp, lambda_minus: lm })
}

/// Real 2×2 transverse block `[[-σ, r], [-r, 0]]` of the generator, in the
/// basis where `iξ×` acts as multiplication by `r = |ξ|`.
pub fn transverse_block(r: f64, sigma: f64) -> [f64; 4] {
    [-sigma, r, -r, 0.0]
}

/// Applies a matrix function `f(L̂)` to `(e, b)`, given `f` evaluated on the
/// transverse block (`ft`), on the electric gradient eigenvalue `-σ` (`fe`)
/// and on the magnetic gradient eigenvalue `0` (`fb`).
pub fn apply_block_function(xi: [f64; 3], ft: [f64; 4], fe: f64, fb: f64, e: Vec3, b: Vec3) -> (Vec3, Vec3) {
    let r = norm3(xi);
    let r2 = r * r;
    let xr = xi.map(|x| C64::new(x, 0.0));
    let eg = scale(xr, xi_dot(xi, e) / r2);
    let bg = scale(xr, xi_dot(xi, b) / r2);
    let et = sub(e, eg);
    let bt = sub(b, bg);
    // C v = iξ × v, C^2 = r^2 on transverse vectors
    let ce = scale(xi_cross(xi, et), I);
    let cb = scale(xi_cross(xi, bt), I);
    let e_out = add(
        add(scale(eg, C64::new(fe, 0.0)), scale(et, C64::new(ft[0], 0.0))),
        scale(cb, C64::new(ft[1] / r, 0.0)),
    );
    let b_out = add(
        add(scale(bg, C64::new(fb, 0.0)), scale(ce, C64::new(ft[2] / r, 0.0))),
        scale(bt, C64::new(ft[3], 0.0)),
    );
    (e_out, b_out)
}

/// Exact evolution of one damped Maxwell mode by time `t >= 0`.
///
/// Uses the eigenbasis away from the Jordan point and the direct
/// exponential of the transverse block near it.
pub fn semigroup_apply_sigma(e: Vec3, b: Vec3, xi: [f64; 3], t: f64, sigma: f64) -> (Vec3, Vec3) {
    let r = norm3(xi);
    if r == 0.0 {
        return (scale(e, C64::new((-sigma * t).exp(), 0.0)), b);
    }
    if !is_degenerate(r, sigma) {
        // the eigenbasis path needs a solenoidal B̂; its gradient part is
        // stationary and carried separately
        let xr = xi.map(|x| C64::new(x, 0.0));
        let bg = scale(xr, xi_dot(xi, b) / (r * r));
        if let Ok(d) = mode_decompose_sigma(e, sub(b, bg), xi, sigma) {
            let (e1, b1) = d.evolve(t);
            return (e1, add(b1, bg));
        }
    }
    let m = transverse_block(r, sigma);
    let ft = expm(&m.map(|v| v * t), 2);
    apply_block_function(xi, [ft[0], ft[1], ft[2], ft[3]], (-sigma * t).exp(), 1.0, e, b)
}

/// [`semigroup_apply_sigma`] with `σ = 1`.
pub fn semigroup_apply(e: Vec3, b: Vec3, xi: [f64; 3], t: f64) -> (Vec3, Vec3) {
    semigroup_apply_sigma(e, b, xi, t, 1.0)
}

/// The 6×6 complex generator acting on `(ê, b̂)` in Cartesian components.
pub fn generator(xi: [f64; 3], sigma: f64) -> [[C64; 6]; 6] {
    let mut g = [[C64::new(0.0, 0.0); 6]; 6];
    // iξ× as a matrix: (iξ×v)_j = i Σ_k ε_{j..} ...
    let cross = [[0.0, -xi[2], xi[1]], [xi[2], 0.0, -xi[0]], [-xi[1], xi[0], 0.0]];
    for j in 0..3 {
        g[j][j] = C64::new(-sigma, 0.0);
        for k in 0..3 {
            g[j][3 + k] = I * cross[j][k];
            g[3 + j][k] = -I * cross[j][k];
        }
    }
    g
}
