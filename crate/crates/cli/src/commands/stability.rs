use nsmx::periodic::{PicardConfig, PicardReport};
use nsmx::physics::Physics;
use nsmx::stability::{perturb_and_run, ComponentDecay, PeriodicOrbit, StabilityConfig as RunSettings};
use serde::Serialize;

use super::{lattice, seeded_forcing};
use crate::config::{Reference, StabilityConfig};
use crate::error::CliError;
use crate::output::{num, OutDir};

/// Terminal window norm must fall below this fraction of the first.
pub const DECAY_FRACTION: f64 = 0.1;

#[derive(Serialize)]
struct Properties {
    finite_sups: bool,
    early_argmax: bool,
    decayed: bool,
}

#[derive(Serialize)]
struct Component<'a> {
    name: &'a str,
    x_norm: f64,
    weighted_sup: f64,
    argmax_window: usize,
    initial: f64,
    terminal: f64,
    rate: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    perturbation_norm: f64,
    windows: usize,
    blow_up: Option<f64>,
    orbit: Option<&'a PicardReport>,
    components: Vec<Component<'a>>,
    properties: Properties,
    passed: bool,
}

pub fn run(cfg: &StabilityConfig, out: &OutDir) -> Result<bool, CliError> {
    let lat = lattice(&cfg.grid)?;
    let physics = Physics::from(cfg.physics);
    physics.validate()?;
    let (orbit, report) = match cfg.reference {
        Reference::Zero => (None, None),
        Reference::Periodic => {
            let forcing = seeded_forcing(&lat, physics, cfg.period, cfg.k_max, &cfg.orbit, cfg.seed.wrapping_add(101))?;
            let (o, rep) = PeriodicOrbit::solve(forcing, physics, PicardConfig::default())?;
            (Some(o), Some(rep))
        }
    };
    let settings = RunSettings {
        seed: cfg.seed,
        amplitude: cfg.amplitude,
        horizon: cfg.horizon,
        epsilon: cfg.epsilon,
        dt: cfg.dt,
        ..Default::default()
    };
    let run = perturb_and_run(orbit.as_ref(), &lat, physics, &settings)?;
    let comps: Vec<ComponentDecay> = run.components()?;
    let time_weight = |n: usize| (n as f64 + 1.0).powf(0.5 * (1.0 - cfg.epsilon));
    let mut rows = Vec::new();
    for (cd, trace) in comps.iter().zip(&run.traces) {
        for n in 0..trace.window_count() {
            for (b, v) in trace.window_block_l2(n).into_iter().enumerate() {
                let q = trace.q_min() + b as i32;
                rows.push([n.to_string(), cd.component.to_string(), q.to_string(), num(v), num(time_weight(n) * v)]);
            }
        }
    }
    out.write_csv("norms.csv", &["window", "component", "block", "norm", "weighted"], rows)?;
    let windows = run.traces[0].window_count();
    let properties = Properties {
        finite_sups: comps.iter().all(|c| c.weighted_sup.is_finite()),
        early_argmax: comps.iter().all(|c| c.argmax_window < windows.div_ceil(2)),
        decayed: comps.iter().all(|c| c.terminal() <= DECAY_FRACTION * c.initial()),
    };
    let passed =
        run.blow_up.is_none() && properties.finite_sups && properties.early_argmax && properties.decayed;
    let components = comps
        .iter()
        .map(|c| Component {
            name: c.component,
            x_norm: c.x_norm,
            weighted_sup: c.weighted_sup,
            argmax_window: c.argmax_window,
            initial: c.initial(),
            terminal: c.terminal(),
            rate: c.fit.rate,
        })
        .collect();
    out.write_json(
        "summary.json",
        "stability",
        &Summary {
            perturbation_norm: run.perturbation_norm,
            windows,
            blow_up: run.blow_up,
            orbit: report.as_ref(),
            components,
            properties,
            passed,
        },
    )?;
    Ok(passed)
}
