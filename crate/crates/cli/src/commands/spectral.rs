use nsmx::maxwell::verify_lambda_bounds;
use serde::Serialize;

use super::lattice;
use crate::config::SpectralReportConfig;
use crate::error::CliError;
use crate::output::{num, OutDir};

pub const TOLERANCE: f64 = 1e-12;

#[derive(Serialize)]
struct Summary {
    shells: usize,
    max_violation: f64,
    tolerance: f64,
    passed: bool,
}

pub fn run(cfg: &SpectralReportConfig, out: &OutDir) -> Result<bool, CliError> {
    let lat = lattice(&cfg.grid)?;
    let rep = verify_lambda_bounds(&lat);
    out.write_csv(
        "spectrum.csv",
        &["shell", "xi_norm", "re_lambda_plus", "im_lambda_plus", "re_lambda_minus", "im_lambda_minus", "violation"],
        rep.shells.iter().map(|s| {
            [
                s.shell.to_string(),
                num(s.xi_norm),
                num(s.lambda_plus_re),
                num(s.lambda_plus_im),
                num(s.lambda_minus_re),
                num(s.lambda_minus_im),
                num(s.violation),
            ]
        }),
    )?;
    let passed = rep.max_violation <= TOLERANCE;
    out.write_json(
        "summary.json",
        "spectral-report",
        &Summary { shells: rep.shells.len(), max_violation: rep.max_violation, tolerance: TOLERANCE, passed },
    )?;
    Ok(passed)
}
