//! Run configurations: one JSON object per run, keyed by `command`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::PathBuf;

use clap::Subcommand;
use nsmx::dyadic::trace::MIN_FIT_WINDOWS;
use nsmx::evolution::Scheme;
use nsmx::harness::{LawId, TimeGrid};
use nsmx::physics::Physics;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const MAX_LENGTH: f64 = 16.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Solve for the time-periodic solution of a periodic forcing.
    Periodic,
    /// Integrate an initial state forward in time.
    Evolve,
    /// Perturb a periodic orbit and record the decay of the error.
    Stability,
    /// Run the product and trajectory estimate laws on two grids.
    Verify,
    /// Compute the resonance constants of the periodic solve.
    Constants,
    /// Tabulate Maxwell eigenvalues over the lattice shells.
    SpectralReport,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Periodic => "periodic",
            Command::Evolve => "evolve",
            Command::Stability => "stability",
            Command::Verify => "verify",
            Command::Constants => "constants",
            Command::SpectralReport => "spectral-report",
        }
    }

    pub const ALL: [Command; 6] = [
        Command::Periodic,
        Command::Evolve,
        Command::Stability,
        Command::Verify,
        Command::Constants,
        Command::SpectralReport,
    ];

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 32, length: TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub nu: f64,
    pub sigma: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self { nu: 1.0, sigma: 1.0 }
    }
}

impl From<PhysicsConfig> for Physics {
    fn from(p: PhysicsConfig) -> Self {
        Physics { nu: p.nu, sigma: p.sigma }
    }
}

/// Seeded time-periodic forcing with `k_max` time modes on the solver band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForceSpec {
    pub k_max: usize,
    pub slope: f64,
    pub amplitude: f64,
    /// When set, the forcing is rescaled so that the first Picard iterate
    /// has this `X̃` norm; `amplitude` is then ignored.
    pub target: Option<f64>,
}

impl Default for ForceSpec {
    fn default() -> Self {
        Self { k_max: 2, slope: 2.5, amplitude: 1.0, target: Some(1e-2) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub grid: GridConfig,
    #[serde(rename = "T")]
    pub period: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self { grid: GridConfig::default(), period: TAU, k_max: 512, seed: 1, out: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralReportConfig {
    pub grid: GridConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    #[serde(rename = "T")]
    pub period: f64,
    /// Time modes kept in the solution.
    #[serde(rename = "K")]
    pub k_max: usize,
    pub force: ForceSpec,
    /// Snapshot of stacked forcing modes `F, G, H`, each ordered `-K..=K`.
    pub force_file: Option<PathBuf>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for PeriodicConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { n: 16, ..Default::default() },
            physics: PhysicsConfig::default(),
            period: TAU,
            k_max: 8,
            force: ForceSpec::default(),
            force_file: None,
            tol: 1e-10,
            max_iter: 100,
            seed: 1,
            out: None,
        }
    }
}

/// Initial data: a snapshot of `u, E, B` or a seeded random state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSpec {
    pub file: Option<PathBuf>,
    pub slope: f64,
    pub amplitude: f64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self { file: None, slope: 3.0, amplitude: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub dt: f64,
    pub horizon: f64,
    /// Time between snapshots.
    pub cadence: f64,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub initial: InitialSpec,
    /// Period of the forcing.
    #[serde(rename = "T")]
    pub period: f64,
    pub force: Option<ForceSpec>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { n: 16, ..Default::default() },
            physics: PhysicsConfig::default(),
            dt: 1.0 / 32.0,
            horizon: 2.0,
            cadence: 0.5,
            scheme: Scheme::Etd2rk,
            epsilon: 0.1,
            initial: InitialSpec::default(),
            period: TAU,
            force: None,
            seed: 1,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Zero,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub reference: Reference,
    /// Forcing of the reference orbit when `reference` is `periodic`.
    pub orbit: ForceSpec,
    #[serde(rename = "T")]
    pub period: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub epsilon: f64,
    pub horizon: f64,
    pub dt: f64,
    pub out: Option<PathBuf>,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { n: 16, ..Default::default() },
            physics: PhysicsConfig::default(),
            reference: Reference::Periodic,
            orbit: ForceSpec::default(),
            period: TAU,
            k_max: 8,
            seed: 1,
            amplitude: 0.25,
            epsilon: 0.1,
            horizon: 64.0,
            dt: 1.0 / 16.0,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub laws: Vec<LawId>,
    pub trials: usize,
    pub seed: u64,
    pub grids: [usize; 2],
    pub slopes: Vec<f64>,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub length: f64,
    /// Overrides the per-law default time grid.
    pub time: Option<TimeGrid>,
    pub out: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            laws: LawId::ALL.to_vec(),
            trials: 100,
            seed: 1,
            grids: [32, 48],
            slopes: vec![2.0, 2.5, 3.0],
            delta: 0.25,
            epsilon: 0.1,
            length: TAU,
            time: None,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Periodic(PeriodicConfig),
    Evolve(EvolveConfig),
    Stability(StabilityConfig),
    Verify(VerifyConfig),
    Constants(ConstantsConfig),
    SpectralReport(SpectralReportConfig),
}

fn invalid(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: message.into() }
}

fn positive(path: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, format!("must be positive and finite, got {x}")))
    }
}

fn check_grid(g: &GridConfig) -> Result<(), CliError> {
    if !(8..=256).contains(&g.n) || g.n % 2 != 0 {
        return Err(invalid("grid.n", format!("must be even and in [8, 256], got {}", g.n)));
    }
    if !(g.length > 0.0 && g.length <= MAX_LENGTH * (1.0 + 1e-12)) {
        return Err(invalid("grid.L", format!("must lie in (0, 16π], got {}", g.length)));
    }
    Ok(())
}

fn check_physics(p: &PhysicsConfig) -> Result<(), CliError> {
    positive("physics.nu", p.nu)?;
    positive("physics.sigma", p.sigma)
}

fn check_force(path: &str, f: &ForceSpec) -> Result<(), CliError> {
    if !(1.0..=5.0).contains(&f.slope) {
        return Err(invalid(&format!("{path}.slope"), format!("must lie in [1, 5], got {}", f.slope)));
    }
    positive(&format!("{path}.amplitude"), f.amplitude)?;
    if let Some(t) = f.target {
        positive(&format!("{path}.target"), t)?;
    }
    Ok(())
}

fn check_epsilon(path: &str, e: f64) -> Result<(), CliError> {
    if e > 0.0 && e < 1.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must lie in (0, 1), got {e}")))
    }
}

fn check_steps(dt: f64, horizon: f64) -> Result<(), CliError> {
    positive("dt", dt)?;
    positive("horizon", horizon)?;
    let steps = horizon / dt;
    if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
        return Err(invalid("dt", format!("must divide horizon {horizon}, got {dt}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn command(&self) -> Command {
        match self {
            RunConfig::Periodic(_) => Command::Periodic,
            RunConfig::Evolve(_) => Command::Evolve,
            RunConfig::Stability(_) => Command::Stability,
            RunConfig::Verify(_) => Command::Verify,
            RunConfig::Constants(_) => Command::Constants,
            RunConfig::SpectralReport(_) => Command::SpectralReport,
        }
    }

    /// Defaults for `command`.
    pub fn default_for(command: Command) -> Self {
        match command {
            Command::Periodic => RunConfig::Periodic(Default::default()),
            Command::Evolve => RunConfig::Evolve(Default::default()),
            Command::Stability => RunConfig::Stability(Default::default()),
            Command::Verify => RunConfig::Verify(Default::default()),
            Command::Constants => RunConfig::Constants(Default::default()),
            Command::SpectralReport => RunConfig::SpectralReport(Default::default()),
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            RunConfig::Periodic(c) => c.out.as_ref(),
            RunConfig::Evolve(c) => c.out.as_ref(),
            RunConfig::Stability(c) => c.out.as_ref(),
            RunConfig::Verify(c) => c.out.as_ref(),
            RunConfig::Constants(c) => c.out.as_ref(),
            RunConfig::SpectralReport(c) => c.out.as_ref(),
        }
    }

    pub fn set_out(&mut self, out: PathBuf) {
        let slot = match self {
            RunConfig::Periodic(c) => &mut c.out,
            RunConfig::Evolve(c) => &mut c.out,
            RunConfig::Stability(c) => &mut c.out,
            RunConfig::Verify(c) => &mut c.out,
            RunConfig::Constants(c) => &mut c.out,
            RunConfig::SpectralReport(c) => &mut c.out,
        };
        *slot = Some(out);
    }

    pub fn set_seed(&mut self, seed: u64) {
        let slot = match self {
            RunConfig::Periodic(c) => &mut c.seed,
            RunConfig::Evolve(c) => &mut c.seed,
            RunConfig::Stability(c) => &mut c.seed,
            RunConfig::Verify(c) => &mut c.seed,
            RunConfig::Constants(c) => &mut c.seed,
            RunConfig::SpectralReport(c) => &mut c.seed,
        };
        *slot = seed;
    }

    /// Range checks; errors name the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            RunConfig::Constants(c) => {
                check_grid(&c.grid)?;
                positive("T", c.period)?;
                if c.k_max == 0 {
                    return Err(invalid("K", "must be at least 1"));
                }
            }
            RunConfig::SpectralReport(c) => check_grid(&c.grid)?,
            RunConfig::Periodic(c) => {
                check_grid(&c.grid)?;
                check_physics(&c.physics)?;
                positive("T", c.period)?;
                if c.k_max == 0 || c.k_max > 64 {
                    return Err(invalid("K", format!("must lie in [1, 64], got {}", c.k_max)));
                }
                check_force("force", &c.force)?;
                if c.force.k_max > c.k_max {
                    return Err(invalid("force.k_max", format!("must not exceed K = {}, got {}", c.k_max, c.force.k_max)));
                }
                positive("tol", c.tol)?;
                if c.max_iter == 0 {
                    return Err(invalid("max_iter", "must be at least 1"));
                }
            }
            RunConfig::Evolve(c) => {
                check_grid(&c.grid)?;
                check_physics(&c.physics)?;
                check_steps(c.dt, c.horizon)?;
                positive("cadence", c.cadence)?;
                let ratio = c.cadence / c.dt;
                if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                    return Err(invalid("cadence", format!("must be a positive multiple of dt = {}, got {}", c.dt, c.cadence)));
                }
                check_epsilon("epsilon", c.epsilon)?;
                if !(1.0..=5.0).contains(&c.initial.slope) {
                    return Err(invalid("initial.slope", format!("must lie in [1, 5], got {}", c.initial.slope)));
                }
                if !(c.initial.amplitude >= 0.0 && c.initial.amplitude.is_finite()) {
                    return Err(invalid("initial.amplitude", format!("must be nonnegative, got {}", c.initial.amplitude)));
                }
                positive("T", c.period)?;
                if let Some(f) = &c.force {
                    check_force("force", f)?;
                }
            }
            RunConfig::Stability(c) => {
                check_grid(&c.grid)?;
                check_physics(&c.physics)?;
                positive("T", c.period)?;
                if c.k_max == 0 || c.k_max > 64 {
                    return Err(invalid("K", format!("must lie in [1, 64], got {}", c.k_max)));
                }
                check_force("orbit", &c.orbit)?;
                if !(c.amplitude >= 0.0 && c.amplitude.is_finite()) {
                    return Err(invalid("amplitude", format!("must be nonnegative, got {}", c.amplitude)));
                }
                check_epsilon("epsilon", c.epsilon)?;
                check_steps(c.dt, c.horizon)?;
                if c.horizon < MIN_FIT_WINDOWS as f64 {
                    return Err(invalid(
                        "horizon",
                        format!("must cover at least {MIN_FIT_WINDOWS} unit windows, got {}", c.horizon),
                    ));
                }
            }
            RunConfig::Verify(c) => {
                if c.laws.is_empty() {
                    return Err(invalid("laws", "must list at least one law"));
                }
                if c.trials == 0 {
                    return Err(invalid("trials", "must be at least 1"));
                }
                for (i, &n) in c.grids.iter().enumerate() {
                    if !(8..=128).contains(&n) || n % 2 != 0 {
                        return Err(invalid(&format!("grids[{i}]"), format!("must be even and in [8, 128], got {n}")));
                    }
                }
                if c.grids[0] >= c.grids[1] {
                    return Err(invalid("grids", format!("must be (coarse, fine) with coarse < fine, got {:?}", c.grids)));
                }
                for (i, s) in c.slopes.iter().enumerate() {
                    if !(1.0..=5.0).contains(s) {
                        return Err(invalid(&format!("slopes[{i}]"), format!("must lie in [1, 5], got {s}")));
                    }
                }
                if c.slopes.is_empty() {
                    return Err(invalid("slopes", "must not be empty"));
                }
                if !(c.delta > 0.0 && c.delta < 1.0) {
                    return Err(invalid("delta", format!("must lie in (0, 1), got {}", c.delta)));
                }
                check_epsilon("epsilon", c.epsilon)?;
                if !(c.length > 0.0 && c.length <= MAX_LENGTH * (1.0 + 1e-12)) {
                    return Err(invalid("L", format!("must lie in (0, 16π], got {}", c.length)));
                }
                if let Some(t) = &c.time {
                    t.validate().map_err(|e| invalid("time", e.to_string()))?;
                }
            }
        }
        Ok(())
    }
}

fn typed<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config { path, message: e.into_inner().to_string() }
    })
}

/// Parses and validates a configuration. `command` comes from the command
/// line; a `command` key in the text must agree with it.
pub fn parse_config(text: &str, command: Option<Command>) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))?;
    let Value::Object(mut map) = value else {
        return Err(invalid(".", "configuration must be a JSON object"));
    };
    let named = match map.remove("command") {
        None => None,
        Some(Value::String(s)) => {
            Some(Command::parse(&s).ok_or_else(|| invalid("command", format!("unknown command `{s}`")))?)
        }
        Some(other) => return Err(invalid("command", format!("must be a string, got {other}"))),
    };
    let command = match (command, named) {
        (Some(a), Some(b)) if a != b => {
            return Err(invalid("command", format!("config names `{b}` but `{a}` was requested")));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(invalid("command", "missing")),
    };
    let value = Value::Object(map);
    let cfg = match command {
        Command::Periodic => RunConfig::Periodic(typed(value)?),
        Command::Evolve => RunConfig::Evolve(typed(value)?),
        Command::Stability => RunConfig::Stability(typed(value)?),
        Command::Verify => RunConfig::Verify(typed(value)?),
        Command::Constants => RunConfig::Constants(typed(value)?),
        Command::SpectralReport => RunConfig::SpectralReport(typed(value)?),
    };
    cfg.validate()?;
    Ok(cfg)
}
