use nsmx::evolution::{evolve, Forcing, IntegratorConfig};
use nsmx::physics::{EMState, Physics};
use nsmx::spectral::{random_field, Band};
use nsmx::Lattice;
use serde::Serialize;

use super::{lattice, seeded_forcing};
use crate::config::EvolveConfig;
use crate::error::CliError;
use crate::output::{num, read_snapshot, OutDir};

#[derive(Serialize)]
struct Summary {
    steps: usize,
    snapshots: usize,
    blow_up: Option<f64>,
    initial_energy: f64,
    final_energy: f64,
    max_energy_increase: f64,
    max_residual: f64,
    divergence_defect: f64,
    forced: bool,
    passed: bool,
}

/// Initial state and the lattice it lives on.
fn initial_state(cfg: &EvolveConfig, physics: Physics) -> Result<(Lattice, EMState<f64>), CliError> {
    if let Some(path) = &cfg.initial.file {
        let bad = |m: String| CliError::Config { path: "initial.file".into(), message: m };
        let (file_lat, mut fields) = read_snapshot(path)?;
        if file_lat.n() != cfg.grid.n || file_lat.length() != cfg.grid.length {
            return Err(bad(format!("lattice n = {}, L = {} does not match grid", file_lat.n(), file_lat.length())));
        }
        if fields.len() != 3 {
            return Err(bad(format!("expected fields u, E, B, found {}", fields.len())));
        }
        let (u, e, b) = (fields.remove(0), fields.remove(0), fields.remove(0));
        return Ok((file_lat, EMState::new(u, e, b, physics)?));
    }
    let lat = &lattice(&cfg.grid)?;
    let amp = cfg.initial.amplitude;
    let base = cfg.seed.wrapping_mul(3);
    let field = |s: u64, div_free: bool| -> Result<_, CliError> {
        Ok(random_field(lat, cfg.initial.slope, s, div_free, Band::Half)?.scaled(amp))
    };
    let s = EMState::new(field(base, true)?, field(base + 1, false)?, field(base + 2, true)?, physics)?;
    Ok((lat.clone(), s))
}

pub fn run(cfg: &EvolveConfig, out: &OutDir) -> Result<bool, CliError> {
    let physics = Physics::from(cfg.physics);
    physics.validate()?;
    let (lat, s0) = initial_state(cfg, physics)?;
    let forcing = match &cfg.force {
        Some(spec) => {
            Forcing::Periodic(seeded_forcing(&lat, physics, cfg.period, spec.k_max, spec, cfg.seed.wrapping_add(17))?)
        }
        None => Forcing::None,
    };
    let ic = IntegratorConfig {
        dt: cfg.dt,
        scheme: cfg.scheme,
        band: Band::Half,
        horizon: cfg.horizon,
        cadence: cfg.cadence,
        nonlinear: true,
    };
    let run = evolve(&s0, &forcing, &ic, cfg.epsilon)?;
    let opt = |x: Option<f64>| x.map_or(String::new(), num);
    out.write_csv(
        "ledger.csv",
        &["t", "kinetic", "electric", "magnetic", "total", "dissipation", "power", "residual"],
        run.ledger.rows.iter().map(|r| {
            let dissipation = physics.nu * r.grad_u2 + r.j2 / physics.sigma;
            [num(r.t), num(r.u2), num(r.e2), num(r.b2), num(r.total()), num(dissipation), num(r.power), opt(r.residual)]
        }),
    )?;
    for (i, s) in run.snapshots.iter().enumerate() {
        out.write_snapshot(&format!("snapshot_{i:04}.nsmx"), &[&s.u, &s.e, &s.b])?;
    }
    let totals = run.ledger.totals();
    let forced = cfg.force.is_some();
    let max_increase = run.ledger.max_increase();
    let passed = run.blow_up.is_none() && (forced || max_increase <= 0.0);
    out.write_json(
        "summary.json",
        "evolve",
        &Summary {
            steps: ic.steps(),
            snapshots: run.snapshots.len(),
            blow_up: run.blow_up,
            initial_energy: totals.first().copied().unwrap_or(0.0),
            final_energy: totals.last().copied().unwrap_or(0.0),
            max_energy_increase: max_increase,
            max_residual: run.ledger.max_residual(),
            divergence_defect: run.last.divergence_defect(),
            forced,
            passed,
        },
    )?;
    Ok(passed)
}
