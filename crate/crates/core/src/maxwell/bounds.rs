use serde::Serialize;

use crate::maxwell::mode::{eigen_pair, is_degenerate, C64};
use crate::scalar::Real;
use crate::spectral::FrequencyLattice;

/// Eigenvalue data and bound check for one lattice shell (normalized
/// operator, `σ = 1`).
#[derive(Debug, Clone, Serialize)]
pub struct ShellSpectrum {
    pub shell: u32,
    pub xi_norm: f64,
    pub lambda_plus_re: f64,
    pub lambda_plus_im: f64,
    pub lambda_minus_re: f64,
    pub lambda_minus_im: f64,
    /// Largest violation of the eigenvalue inequalities on this shell.
    pub violation: f64,
    /// 2-norm condition number of the transverse eigenbasis; `None` in the
    /// degeneracy band.
    pub eigenbasis_condition: Option<f64>,
}

/// Per-shell eigenvalue report.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaBoundsReport {
    pub max_violation: f64,
    pub shells: Vec<ShellSpectrum>,
}

/// Largest violation of the eigenvalue chain and ratio bounds at `|ξ| = r`.
pub fn lambda_bound_violation(r: f64) -> f64 {
    let (lp, lm) = eigen_pair(r);
    let mut worst = 0.0f64;
    if r <= 0.5 {
        let chain = [-1.0, lm.re, -0.5, -r, -2.0 * r * r, lp.re, -r * r];
        for w in chain.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
        worst = worst.max(lp.im.abs()).max(lm.im.abs());
        let s = (1.0 - 4.0 * r * r).max(0.0).sqrt();
        let rho = ((lm - lp) / lm).re;
        worst = worst.max(s - rho).max(rho - 2.0 * s);
    }
    if r >= 0.5 {
        worst = worst.max((lp.re + 0.5).abs()).max((lm.re + 0.5).abs());
        worst = worst.max((lp.norm() - r).abs()).max((lm.norm() - r).abs());
        let target = 2.0 * (1.0 - 1.0 / (4.0 * r * r)).max(0.0).sqrt();
        worst = worst.max((((lm - lp) / lm).norm() - target).abs());
    }
    worst.max(0.0)
}

fn eigenbasis_condition(r: f64) -> Option<f64> {
    if is_degenerate(r, 1.0) {
        return None;
    }
    let (lp, lm) = eigen_pair(r);
    let one = C64::new(1.0, 0.0);
    // columns (r, λ + 1) of the transverse block [[-1, r], [-r, 0]]
    let v = [C64::new(r, 0.0), C64::new(r, 0.0), lp + one, lm + one];
    let frob2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let det = (v[0] * v[3] - v[1] * v[2]).norm();
    if det == 0.0 {
        return None;
    }
    // σ_max^2 + σ_min^2 = ‖V‖_F^2, σ_max σ_min = |det V|
    let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((frob2 + disc) / 2.0).sqrt();
    let smin = det / smax;
    Some(smax / smin)
}

/// Checks the eigenvalue inequalities on every shell of the lattice.
pub fn verify_lambda_bounds<T: Real>(lattice: &FrequencyLattice<T>) -> LambdaBoundsReport {
    let mut shells = Vec::new();
    let mut max_violation = 0.0f64;
    for s in lattice.shells() {
        let r = lattice.shell_xi2(s).as_f64().sqrt();
        let (lp, lm) = eigen_pair(r);
        let violation = lambda_bound_violation(r);
        max_violation = max_violation.max(violation);
        shells.push(ShellSpectrum {
            shell: s,
            xi_norm: r,
            lambda_plus_re: lp.re,
            lambda_plus_im: lp.im,
            lambda_minus_re: lm.re,
            lambda_minus_im: lm.im,
            violation,
            eigenbasis_condition: eigenbasis_condition(r),
        });
    }
    LambdaBoundsReport { max_violation, shells }
}
