use nsmx::dyadic::DyadicPartition;
use nsmx::harness::{product_law_ratio_with, LawId, LawSpec, PartitionBuilder, Refinement};
use serde::Serialize;

use crate::config::VerifyConfig;
use crate::error::CliError;
use crate::output::{num, OutDir};

#[derive(Serialize)]
struct LawSummary {
    law: LawId,
    coarse: String,
    fine: String,
    coarse_max_ratio: f64,
    fine_max_ratio: f64,
    refinement_factor: f64,
    rule: Refinement,
    skipped: usize,
    passed: bool,
}

#[derive(Serialize)]
struct Summary {
    laws: Vec<LawSummary>,
    passed: bool,
}

pub fn law_spec(cfg: &VerifyConfig, law: LawId) -> LawSpec {
    let base = LawSpec::new(law);
    LawSpec {
        law,
        trials: cfg.trials,
        slopes: cfg.slopes.clone(),
        delta: cfg.delta,
        seed: cfg.seed,
        grids: cfg.grids,
        length: cfg.length,
        epsilon: cfg.epsilon,
        time: cfg.time.unwrap_or(base.time),
    }
}

pub fn run(cfg: &VerifyConfig, out: &OutDir) -> Result<bool, CliError> {
    run_with(cfg, out, &|lat| DyadicPartition::build(lat))
}

/// [`run`] with a caller-supplied partition for the product laws.
pub fn run_with(cfg: &VerifyConfig, out: &OutDir, build: &PartitionBuilder) -> Result<bool, CliError> {
    let mut laws = Vec::new();
    for &law in &cfg.laws {
        let rep = product_law_ratio_with(&law_spec(cfg, law), build)?;
        let rows = [&rep.coarse, &rep.fine].into_iter().flat_map(|g| {
            g.trials.iter().map(move |t| {
                [g.label.clone(), t.trial.to_string(), num(t.lhs), num(t.rhs), t.ratio.map_or(String::new(), num)]
            })
        });
        out.write_csv(&format!("{law}.csv"), &["level", "trial", "lhs", "rhs", "ratio"], rows)?;
        laws.push(LawSummary {
            law,
            coarse: rep.coarse.label.clone(),
            fine: rep.fine.label.clone(),
            coarse_max_ratio: rep.coarse.max_ratio,
            fine_max_ratio: rep.fine.max_ratio,
            refinement_factor: rep.refinement_factor(),
            rule: rep.rule,
            skipped: rep.skipped(),
            passed: rep.passed(),
        });
    }
    let passed = laws.iter().all(|l| l.passed);
    out.write_json("summary.json", "verify", &Summary { laws, passed })?;
    Ok(passed)
}
