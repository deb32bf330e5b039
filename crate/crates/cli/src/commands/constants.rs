use nsmx::periodic::{beta0_bound, resonance_constants, ResonanceConstants, ALPHA0_BOUND};
use serde::Serialize;

use super::lattice;
use crate::config::ConstantsConfig;
use crate::error::CliError;
use crate::output::OutDir;

#[derive(Serialize)]
struct Summary<'a> {
    constants: &'a ResonanceConstants,
    alpha0_bound: f64,
    beta0_bound: f64,
    passed: bool,
}

pub fn run(cfg: &ConstantsConfig, out: &OutDir) -> Result<bool, CliError> {
    let lat = lattice(&cfg.grid)?;
    let rc = resonance_constants(cfg.period, &lat, cfg.k_max);
    let finite = [rc.a_t, rc.b_t, rc.c_t, rc.d_t, rc.alpha0, rc.beta0].iter().all(|v| v.is_finite());
    let passed = finite && rc.alpha0 <= ALPHA0_BOUND && rc.beta0 <= beta0_bound();
    out.write_json(
        "constants.json",
        "constants",
        &Summary { constants: &rc, alpha0_bound: ALPHA0_BOUND, beta0_bound: beta0_bound(), passed },
    )?;
    Ok(passed)
}
