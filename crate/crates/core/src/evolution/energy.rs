use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolution::integrator::ForceFields;
use crate::physics::{ohm_phys, sample_state, EMState};
use crate::scalar::Real;
use crate::spectral::ops::project_solenoidal_in_place;
use crate::spectral::{Band, SpectralField};

/// Energies and dissipation at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    pub u2: f64,
    pub e2: f64,
    pub b2: f64,
    /// `‖J‖²` with `J = σ(E + u×B)`.
    pub j2: f64,
    /// `‖∇u‖²`.
    pub grad_u2: f64,
    /// `⟨F, u⟩ + ⟨G, E⟩ + ⟨H, B⟩`.
    pub power: f64,
    /// `½ dE/dt + ν‖∇u‖² + ‖J‖²/σ - power` by central differences.
    pub residual: Option<f64>,
}

impl EnergyRow {
    pub fn total(&self) -> f64 {
        self.u2 + self.e2 + self.b2
    }
}

/// Per-step energy balance of a run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub nu: f64,
    pub sigma: f64,
    pub rows: Vec<EnergyRow>,
}

impl EnergyLedger {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.residual).map(f64::abs).fold(0.0, f64::max)
    }

    /// Largest step-to-step increase of the total energy (0 when
    /// nonincreasing).
    pub fn max_increase(&self) -> f64 {
        self.rows.windows(2).map(|w| (w[1].total() - w[0].total()).max(0.0)).fold(0.0, f64::max)
    }

    pub fn totals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.total()).collect()
    }
}

fn inner<T: Real>(a: &SpectralField<T>, b: &SpectralField<T>) -> f64 {
    let mut acc = 0.0;
    for c in 0..3 {
        for (x, y) in a.comp(c).iter().zip(b.comp(c)) {
            acc += (x.conj() * y).re.as_f64();
        }
    }
    acc
}

/// Energy quantities of `state` on `band`; `‖J‖²` is the grid mean of
/// `|J|²`, exact for band-limited factors.
pub fn energy_sample<T: Real>(state: &EMState<T>, forces: Option<&ForceFields<T>>, band: Band) -> EnergyRow {
    let p = sample_state(&state.u, &state.e, &state.b, band);
    let (j, _) = ohm_phys(&p[0], &p[1], &p[2], state.physics.sigma);
    let jn = j.norm_l2().as_f64();
    let power = forces.map_or(0.0, |fr| {
        let mut f = fr.f.truncated(band);
        f.clear_zero_mode();
        project_solenoidal_in_place(&mut f);
        inner(&f, &state.u) + inner(&fr.g.truncated(band), &state.e) + inner(&fr.h.truncated(band), &state.b)
    });
    EnergyRow {
        t: state.time,
        u2: state.u.norm_l2_sq().as_f64(),
        e2: state.e.norm_l2_sq().as_f64(),
        b2: state.b.norm_l2_sq().as_f64(),
        j2: jn * jn,
        grad_u2: state.u.norm_hdot(T::one()).as_f64().powi(2),
        power,
        residual: None,
    }
}

/// Fills in the balance residuals: central differences at interior rows,
/// and a one-sided difference when only two rows exist.
pub fn energy_report(rows: &[EnergyRow], nu: f64, sigma: f64) -> Result<EnergyLedger> {
    let mut out: Vec<EnergyRow> = rows.to_vec();
    let bal = |r: &EnergyRow, dedt: f64| 0.5 * dedt + nu * r.grad_u2 + r.j2 / sigma - r.power;
    match rows.len() {
        0 | 1 => {}
        2 => {
            let d = (rows[1].total() - rows[0].total()) / (rows[1].t - rows[0].t);
            for r in out.iter_mut() {
                r.residual = Some(bal(r, d));
            }
        }
        n => {
            for i in 1..n - 1 {
                let d = (rows[i + 1].total() - rows[i - 1].total()) / (rows[i + 1].t - rows[i - 1].t);
                out[i].residual = Some(bal(&rows[i], d));
            }
        }
    }
    Ok(EnergyLedger { nu, sigma, rows: out })
}
