use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::periodic::linear::PeriodicTriple;
use crate::scalar::Real;
use crate::spectral::SpectralField;

/// Discrete check of the weighted electromagnetic energy balance
/// `½ d/dt (‖E‖² + ‖B‖²) = ⟨E, G⟩ - σ‖E‖² + ⟨B, H⟩` in `H^s`, and of the
/// resulting pointwise-in-time bound
/// `‖(E, B)(t)‖² ≤ (1/T)∫‖(E, B)‖² + 4∫‖E‖‖G‖ + 4∫‖B‖‖H‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCrossCheck {
    /// Largest balance defect over collocation times, relative to the
    /// largest term.
    pub identity_residual: f64,
    /// `sup_t ‖(E, B)(t)‖²_{H^s}`.
    pub lhs_sup: f64,
    /// Right-hand side of the bound, by collocation quadrature.
    pub rhs: f64,
}

impl EnergyCrossCheck {
    pub fn bound_holds(&self) -> bool {
        self.lhs_sup <= self.rhs * (1.0 + 1e-10)
    }
}

fn weighted_inner<T: Real>(a: &SpectralField<T>, b: &SpectralField<T>, s: f64) -> f64 {
    let lat = a.lattice();
    let mut acc = 0.0;
    for idx in 1..lat.len() {
        let w = (1.0 + lat.xi2(idx).as_f64()).powf(s);
        let (x, y) = (a.at(idx), b.at(idx));
        let mut d = 0.0;
        for c in 0..3 {
            d += (x[c].conj() * y[c]).re.as_f64();
        }
        acc += w * d;
    }
    acc
}

/// Evaluates the balance for the electromagnetic part of `sol` driven by
/// `forces.e`, `forces.b` with weight `(1 + |ξ|²)^s`.
pub fn energy_cross_check<T: Real>(
    sol: &PeriodicTriple<T>,
    forces: &PeriodicTriple<T>,
    sigma: f64,
    s: f64,
) -> Result<EnergyCrossCheck> {
    sol.e.check_compatible(&forces.e)?;
    let de = sol.e.time_derivative().samples();
    let db = sol.b.time_derivative().samples();
    let (e, b) = (sol.e.samples(), sol.b.samples());
    let n_t = sol.e.collocation();
    let g = forces.e.clone().with_collocation(n_t).samples();
    let h = forces.b.clone().with_collocation(n_t).samples();
    let n = e.len();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    let mut lhs_sup = 0.0f64;
    let (mut mean, mut cross) = (0.0, 0.0);
    for j in 0..n {
        let ee = weighted_inner(&e[j], &e[j], s);
        let bb = weighted_inner(&b[j], &b[j], s);
        let gg = weighted_inner(&g[j], &g[j], s);
        let hh = weighted_inner(&h[j], &h[j], s);
        let lhs = weighted_inner(&e[j], &de[j], s) + weighted_inner(&b[j], &db[j], s);
        let eg = weighted_inner(&e[j], &g[j], s);
        let bh = weighted_inner(&b[j], &h[j], s);
        let rhs = eg - sigma * ee + bh;
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs()).max(eg.abs()).max(sigma * ee).max(bh.abs());
        lhs_sup = lhs_sup.max(ee + bb);
        mean += ee + bb;
        cross += (ee * gg).sqrt() + (bb * hh).sqrt();
    }
    let t = sol.period();
    let dt = t / n as f64;
    let rhs = mean / n as f64 + 4.0 * dt * cross;
    let identity_residual = if scale > 0.0 { worst / scale } else { worst };
    Ok(EnergyCrossCheck { identity_residual, lhs_sup, rhs })
}
