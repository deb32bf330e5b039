use crate::error::{Error, Result};
use crate::maxwell::expm::phi_complex;
use crate::maxwell::mode::{
    add, eigen_pair_sigma, is_degenerate, scale, semigroup_apply_sigma, sub, xi_cross, xi_dot, C64, Vec3,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `∫_0^t e^{λ(t-τ)} g(τ) dτ` for `g` sampled at equispaced times on
/// `[0, t]`, integrating the exponential exactly against the piecewise
/// linear interpolant of the samples.
pub fn exp_convolution(lambda: C64, samples: &[Vec3], t: f64) -> Vec3 {
    let n = samples.len();
    let mut acc = [C64::new(0.0, 0.0); 3];
    if n < 2 || t == 0.0 {
        return acc;
    }
    let h = t / (n - 1) as f64;
    let (i0, i1) = {
        let (p1, p2) = phi_complex(-lambda * h);
        (p1, p1 - p2)
    };
    for j in 0..n - 1 {
        let w = (lambda * (t - j as f64 * h)).exp() * h;
        let a = w * (i0 - i1);
        let b = w * i1;
        acc = add(acc, add(scale(samples[j], a), scale(samples[j + 1], b)));
    }
    acc
}

/// Magnetic component of the damped Maxwell mode driven by an electric
/// source `Ĝ(τ)`:
///
/// `B̂(t) = e^{tλ₋} B̂⁰ + (e^{tλ₊} - e^{tλ₋}) b⁰
///        + (i/λ₋) ∫_0^t (e^{(t-τ)λ₊} - e^{(t-τ)λ₋}) ξ × e(τ) dτ`,
///
/// where `e(τ) = λ₋/(λ₋ - λ₊) Ĝ_σ(τ)` is the electric part of the `λ₋`
/// eigencomponent of the transverse source `Ĝ_σ`. `g_series` holds `Ĝ` at
/// equispaced times on `[0, t]`. Modes in the degeneracy band are refused;
/// use [`duhamel_magnetic_direct`] there.
pub fn duhamel_magnetic_sigma(
    b0: Vec3,
    b_init: Vec3,
    g_series: &[Vec3],
    xi: [f64; 3],
    t: f64,
    sigma: f64,
) -> Result<Vec3> {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if r2 == 0.0 {
        return Err(Error::RejectedInput("zero wavevector".into()));
    }
    if t < 0.0 {
        return Err(Error::RejectedInput(format!("negative time {t}")));
    }
    let r = r2.sqrt();
    if is_degenerate(r, sigma) {
        return Err(Error::Degenerate { xi_norm: r });
    }
    let (lp, lm) = eigen_pair_sigma(r, sigma);
    let ep = (lp * t).exp();
    let em = (lm * t).exp();
    let mut out = add(scale(b_init, em), scale(b0, ep - em));
    if g_series.len() >= 2 {
        let factor = lm / (lm - lp);
        let xr = xi.map(|x| C64::new(x, 0.0));
        let src: Vec<Vec3> = g_series
            .iter()
            .map(|g| {
                let gt = sub(*g, scale(xr, xi_dot(xi, *g) / r2));
                xi_cross(xi, scale(gt, factor))
            })
            .collect();
        let ip = exp_convolution(lp, &src, t);
        let im = exp_convolution(lm, &src, t);
        out = add(out, scale(sub(ip, im), I / lm));
    }
    Ok(out)
}

/// [`duhamel_magnetic_sigma`] with `σ = 1`.
pub fn duhamel_magnetic(b0: Vec3, b_init: Vec3, g_series: &[Vec3], xi: [f64; 3], t: f64) -> Result<Vec3> {
    duhamel_magnetic_sigma(b0, b_init, g_series, xi, t, 1.0)
}

/// Direct-propagator version of the magnetic Duhamel formula, valid at every
/// mode including the degeneracy band. Takes the full initial pair and
/// integrates `e^{(t-τ)L̂}(Ĝ(τ), 0)` by the trapezoid rule.
pub fn duhamel_magnetic_direct(
    e_init: Vec3,
    b_init: Vec3,
    g_series: &[Vec3],
    xi: [f64; 3],
    t: f64,
    sigma: f64,
) -> Vec3 {
    let zero = [C64::new(0.0, 0.0); 3];
    let (_, mut b) = semigroup_apply_sigma(e_init, b_init, xi, t, sigma);
    let n = g_series.len();
    if n >= 2 {
        let h = t / (n - 1) as f64;
        for (j, g) in g_series.iter().enumerate() {
            let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
            let (_, bj) = semigroup_apply_sigma(*g, zero, xi, t - j as f64 * h, sigma);
            b = add(b, scale(bj, C64::new(w, 0.0)));
        }
    }
    b
}
