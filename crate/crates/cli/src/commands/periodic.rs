use nsmx::dyadic::DyadicPartition;
use nsmx::periodic::{picard_fixed_point, PeriodicProfile, PeriodicTriple, PicardConfig, PicardReport};
use nsmx::physics::Physics;
use serde::Serialize;

use super::{lattice, seeded_forcing, write_triple};
use crate::config::PeriodicConfig;
use crate::error::CliError;
use crate::output::{num, read_snapshot, OutDir};

#[derive(Serialize)]
struct Summary<'a> {
    report: &'a PicardReport,
    max_contraction: f64,
    passed: bool,
}

fn load_forcing(cfg: &PeriodicConfig) -> Result<Option<PeriodicTriple<f64>>, CliError> {
    let Some(path) = &cfg.force_file else { return Ok(None) };
    let bad = |m: String| CliError::Config { path: "force_file".into(), message: m };
    let (lat, fields) = read_snapshot(path)?;
    if lat.n() != cfg.grid.n || lat.length() != cfg.grid.length {
        return Err(bad(format!("lattice n = {}, L = {} does not match grid", lat.n(), lat.length())));
    }
    if fields.len() % 3 != 0 || (fields.len() / 3) % 2 != 1 {
        return Err(bad(format!("expected 3 (2K+1) fields, found {}", fields.len())));
    }
    let per = fields.len() / 3;
    let mut it = fields.into_iter();
    let mut prof = || -> Result<PeriodicProfile<f64>, CliError> {
        let modes: Vec<_> = it.by_ref().take(per).collect();
        Ok(PeriodicProfile::from_modes(cfg.period, modes)?.resized(cfg.k_max))
    };
    Ok(Some(PeriodicTriple::new(prof()?, prof()?, prof()?)?))
}

pub fn run(cfg: &PeriodicConfig, out: &OutDir) -> Result<bool, CliError> {
    let lat = lattice(&cfg.grid)?;
    let physics = Physics::from(cfg.physics);
    physics.validate()?;
    let part = DyadicPartition::build(&lat)?;
    let forcing = match load_forcing(cfg)? {
        Some(f) => f,
        None => seeded_forcing(&lat, physics, cfg.period, cfg.k_max, &cfg.force, cfg.seed)?,
    };
    let picard = PicardConfig { tol: cfg.tol, max_iter: cfg.max_iter };
    let (sol, rep) = picard_fixed_point(&forcing, physics, picard, &part)?;
    write_triple(out, "forcing.nsmx", &forcing)?;
    write_triple(out, "solution.nsmx", &sol)?;
    out.write_csv(
        "picard.csv",
        &["iteration", "diff", "norm", "contraction"],
        (0..rep.diffs.len()).map(|i| {
            let c = if i == 0 { String::new() } else { rep.contraction.get(i - 1).map_or(String::new(), |&c| num(c)) };
            [(i + 1).to_string(), num(rep.diffs[i]), num(rep.norms[i]), c]
        }),
    )?;
    let max_contraction = rep.max_contraction();
    let passed = rep.converged && max_contraction < 0.5;
    out.write_json("picard_report.json", "periodic", &Summary { report: &rep, max_contraction, passed })?;
    Ok(passed)
}
