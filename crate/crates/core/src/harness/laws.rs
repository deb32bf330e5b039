use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{hybrid_norm_l2, solution_norms, DecayTrace, DyadicPartition, HybridBesovSpec, NormKind, SumExp};
use crate::error::{Error, Result};
use crate::harness::heat::{heat_maxreg_check, HeatCheckConfig};
use crate::harness::maxwell::{maxwell_decay_check, MaxwellCheckConfig};
use crate::harness::profile::{separable_trace, sup_norm, tilde_l2_first, tilde_sup, TimeGrid, TimeProfile};
use crate::harness::report::{GridReport, RatioReport, Refinement, TrialRecord};
use crate::scalar::Real;
use crate::spectral::product::{analyze, phys_cross, phys_dot, tensor_divergence_phys};
use crate::spectral::transform::to_physical_many;
use crate::spectral::{random_field_nested, Band, FrequencyLattice, LatticeRef, PhysicalField, SpectralField};

/// Product and linear estimates checked by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LawId {
    /// `‖u×v‖_{H^{1/2+δ}} ≲ ‖u‖_{Ḃ^{3/2}_{2,1}} ‖v‖_{H^{1/2+δ}}`
    #[serde(rename = "besov-sobolev-delta")]
    BesovSobolevDelta,
    /// `‖u×v‖_{Ḣ^{-1}} ≲ ‖u‖_{Ḃ^{1/2}_{2,∞}} ‖v‖_{L^2}`
    #[serde(rename = "besov-l2")]
    BesovL2,
    /// `‖u·v‖_{Ḃ^{-1/2}_{2,1}} ≲ ‖u‖_{H^{1/2}} ‖v‖_{H^{1/2}}`
    #[serde(rename = "sobolev-sobolev")]
    SobolevSobolev,
    /// `‖u×B‖_{H^{1/2}} ≲ ‖u‖_{Ḃ^{1/2}_{2,(∞,1)} ∩ Ḃ^{3/2}_{2,(∞,1)}} ‖B‖_{H^{1/2}}`
    #[serde(rename = "hybrid-sobolev")]
    HybridSobolev,
    /// `‖u×v‖_{Ḃ^{1/2}_{2,(∞,1)}} ≲ ‖u‖_∩ ‖v‖_∩`
    #[serde(rename = "hybrid-hybrid")]
    HybridHybrid,
    /// `‖u×B‖_{𝒴2} ≲ ‖u‖_𝒳 ‖B‖_{𝒳3}`
    #[serde(rename = "y2-u-b")]
    Y2UB,
    /// `‖u_per×B‖_{𝒴2} ≲ ‖u_per‖_{L̃^∞Ḃ^{1/2} ∩ L̃^2_per Ḃ^{3/2}} ‖B‖_{𝒳3}`
    #[serde(rename = "y2-uper-b")]
    Y2UperB,
    /// `‖u×B_per‖_{𝒴2} ≲ ‖u‖_𝒳 ‖B_per‖_{L̃^∞H^{1/2}}`
    #[serde(rename = "y2-u-bper")]
    Y2UBper,
    /// `‖div(u⊗v)‖_{𝒴1} ≲ ‖u‖_𝒳 ‖v‖_𝒳`
    #[serde(rename = "y1-div-u-u")]
    Y1DivUU,
    /// `‖div(u_per⊗v)‖_{𝒴1} ≲ ‖v‖_{𝒳1} ‖u_per‖_{L̃^∞Ḃ^{1/2}_{2,(∞,1)}}`
    #[serde(rename = "y1-div-uper-u")]
    Y1DivUperU,
    /// `‖E_per×B‖_{𝒴1} ≲ ‖E_per‖_{L̃^∞H^{1/2}} ‖B‖_{𝒳3}`
    #[serde(rename = "y1-eper-b")]
    Y1EperB,
    /// `‖E×B_per‖_{𝒴1} ≲ ‖E‖_{𝒳2} ‖B_per‖_{L̃^∞H^{1/2}}`
    #[serde(rename = "y1-e-bper")]
    Y1EBper,
    /// `‖E×B‖_{𝒴1} ≲ ‖E‖_{𝒳2} ‖B‖_{L̃^∞H^{1/2}}`
    #[serde(rename = "y1-e-b")]
    Y1EB,
    /// `‖(u×B_per)×B_per‖_{𝒴1} ≲ ‖u‖_𝒳 ‖B_per‖²_{L̃^∞H^{1/2}}`
    #[serde(rename = "y1-u-bper-bper")]
    Y1UBperBper,
    /// `‖(u×B)×B_per‖_{𝒴1} ≲ ‖u‖_𝒳 ‖B‖_{L^∞H^{1/2}} ‖B_per‖_{L̃^∞H^{1/2}}`
    #[serde(rename = "y1-u-b-bper")]
    Y1UBBper,
    /// `‖(u_per×B)×B‖_{𝒴1} ≲ ‖u_per‖_{L̃^∞Ḃ^{1/2}_{2,1}} ‖B‖²_{𝒳3}`
    #[serde(rename = "y1-uper-b-b")]
    Y1UperBB,
    /// `‖(u_per×B)×B_per‖_{𝒴1} ≲ ‖u_per‖_{L̃^∞Ḃ^{1/2} ∩ L̃^2_per Ḃ^{3/2}} ‖B_per‖_{L̃^∞H^{1/2}} ‖B‖_{𝒳3}`
    #[serde(rename = "y1-uper-b-bper")]
    Y1UperBBper,
    /// forced heat equation: `‖u‖_{𝒳1 ∩ L̃^∞Ḃ^{1/2}} ≲ ‖u⁰‖_{Ḃ^{1/2}_{2,(∞,1)}} + ‖f‖_{𝒴1}`
    #[serde(rename = "heat-maxreg")]
    HeatMaxreg,
    /// damped Maxwell: `‖E‖_{𝒳2} + ‖B‖_{𝒳3} ≲ ‖(E⁰,B⁰)‖_{H^{1/2}} + ‖G‖_{𝒴2}`
    #[serde(rename = "maxwell-decay")]
    MaxwellDecay,
}

/// Role of one law input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    U,
    V,
    E,
    B,
    Uper,
    Eper,
    Bper,
}

impl Slot {
    fn divergence_free(self) -> bool {
        !matches!(self, Slot::E | Slot::Eper)
    }

    fn periodic(self) -> bool {
        matches!(self, Slot::Uper | Slot::Eper | Slot::Bper)
    }
}

/// Product evaluated on the inputs, by input index.
#[derive(Debug, Clone, Copy)]
enum Shape {
    Cross(usize, usize),
    Dot(usize, usize),
    Div(usize, usize),
    Triple(usize, usize, usize),
}

impl Shape {
    fn factors(self) -> Vec<usize> {
        match self {
            Shape::Cross(a, b) | Shape::Dot(a, b) | Shape::Div(a, b) => vec![a, b],
            Shape::Triple(a, b, c) => vec![a, b, c],
        }
    }
}

impl LawId {
    pub const ALL: [LawId; 19] = [
        LawId::BesovSobolevDelta,
        LawId::BesovL2,
        LawId::SobolevSobolev,
        LawId::HybridSobolev,
        LawId::HybridHybrid,
        LawId::Y2UB,
        LawId::Y2UperB,
        LawId::Y2UBper,
        LawId::Y1DivUU,
        LawId::Y1DivUperU,
        LawId::Y1EperB,
        LawId::Y1EBper,
        LawId::Y1EB,
        LawId::Y1UBperBper,
        LawId::Y1UBBper,
        LawId::Y1UperBB,
        LawId::Y1UperBBper,
        LawId::HeatMaxreg,
        LawId::MaxwellDecay,
    ];

    /// Laws evaluated on products of random inputs.
    pub fn products() -> impl Iterator<Item = LawId> {
        Self::ALL.into_iter().filter(|l| l.is_product())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LawId::BesovSobolevDelta => "besov-sobolev-delta",
            LawId::BesovL2 => "besov-l2",
            LawId::SobolevSobolev => "sobolev-sobolev",
            LawId::HybridSobolev => "hybrid-sobolev",
            LawId::HybridHybrid => "hybrid-hybrid",
            LawId::Y2UB => "y2-u-b",
            LawId::Y2UperB => "y2-uper-b",
            LawId::Y2UBper => "y2-u-bper",
            LawId::Y1DivUU => "y1-div-u-u",
            LawId::Y1DivUperU => "y1-div-uper-u",
            LawId::Y1EperB => "y1-eper-b",
            LawId::Y1EBper => "y1-e-bper",
            LawId::Y1EB => "y1-e-b",
            LawId::Y1UBperBper => "y1-u-bper-bper",
            LawId::Y1UBBper => "y1-u-b-bper",
            LawId::Y1UperBB => "y1-uper-b-b",
            LawId::Y1UperBBper => "y1-uper-b-bper",
            LawId::HeatMaxreg => "heat-maxreg",
            LawId::MaxwellDecay => "maxwell-decay",
        }
    }

    pub fn is_product(self) -> bool {
        !matches!(self, LawId::HeatMaxreg | LawId::MaxwellDecay)
    }

    /// Whether inputs are trajectories measured in the weighted-decay norms.
    pub fn is_trajectory(self) -> bool {
        self.is_product() && !self.is_pointwise()
    }

    fn is_pointwise(self) -> bool {
        matches!(
            self,
            LawId::BesovSobolevDelta | LawId::BesovL2 | LawId::SobolevSobolev | LawId::HybridSobolev | LawId::HybridHybrid
        )
    }

    /// Whether every input enters the product exactly once.
    pub fn is_bilinear(self) -> bool {
        self.is_product() && !matches!(self.shape(), Some(Shape::Triple(..)))
    }

    fn slots(self) -> &'static [Slot] {
        use Slot::*;
        match self {
            LawId::BesovSobolevDelta
            | LawId::BesovL2
            | LawId::SobolevSobolev
            | LawId::HybridHybrid
            | LawId::Y1DivUU => &[U, V],
            LawId::HybridSobolev | LawId::Y2UB => &[U, B],
            LawId::Y2UperB | LawId::Y1UperBB => &[Uper, B],
            LawId::Y2UBper | LawId::Y1UBperBper => &[U, Bper],
            LawId::Y1DivUperU => &[Uper, V],
            LawId::Y1EperB => &[Eper, B],
            LawId::Y1EBper => &[E, Bper],
            LawId::Y1EB => &[E, B],
            LawId::Y1UBBper => &[U, B, Bper],
            LawId::Y1UperBBper => &[Uper, B, Bper],
            LawId::HeatMaxreg | LawId::MaxwellDecay => &[],
        }
    }

    fn shape(self) -> Option<Shape> {
        Some(match self {
            LawId::SobolevSobolev => Shape::Dot(0, 1),
            LawId::Y1DivUU | LawId::Y1DivUperU => Shape::Div(0, 1),
            LawId::Y1UBperBper | LawId::Y1UperBB => Shape::Triple(0, 1, 1),
            LawId::Y1UBBper | LawId::Y1UperBBper => Shape::Triple(0, 1, 2),
            LawId::HeatMaxreg | LawId::MaxwellDecay => return None,
            _ => Shape::Cross(0, 1),
        })
    }

    /// Number of inputs drawn per trial.
    pub fn arity(self) -> usize {
        self.slots().len()
    }

    /// Largest `|m_i|` of the inputs on an `n`-point axis, chosen so that the
    /// product is computed without aliasing on the full lattice.
    pub fn input_cutoff(self, n: usize) -> usize {
        let degree = self.shape().map_or(2, |s| s.factors().len());
        (n - 1) / (2 * degree)
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LawId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawId::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown law id `{s}`")))
    }
}

/// Trial set for one law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawSpec {
    pub law: LawId,
    pub trials: usize,
    /// Spectral slopes, cycled over trials and inputs.
    pub slopes: Vec<f64>,
    pub delta: f64,
    pub seed: u64,
    /// Coarse and fine points per axis.
    pub grids: [usize; 2],
    pub length: f64,
    pub epsilon: f64,
    pub time: TimeGrid,
}

impl Default for LawSpec {
    fn default() -> Self {
        Self::new(LawId::SobolevSobolev)
    }
}

impl LawSpec {
    pub fn new(law: LawId) -> Self {
        let per_unit = if law == LawId::HeatMaxreg { 32 } else { 16 };
        Self {
            law,
            trials: 100,
            slopes: vec![2.0, 2.5, 3.0],
            delta: 0.25,
            seed: 1,
            grids: [32, 48],
            length: std::f64::consts::TAU,
            epsilon: 0.1,
            time: TimeGrid { horizon: 8.0, per_unit },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("law spec needs at least one trial".into()));
        }
        if self.slopes.is_empty() || self.slopes.iter().any(|a| !(1.0..=5.0).contains(a)) {
            return Err(Error::Config(format!("slopes must be nonempty and lie in [1, 5], got {:?}", self.slopes)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("box length must be positive, got {}", self.length)));
        }
        if self.grids[0] >= self.grids[1] {
            return Err(Error::Config(format!("grids must be (coarse, fine) with coarse < fine, got {:?}", self.grids)));
        }
        self.time.validate()
    }

    fn params(&self) -> LawParams {
        LawParams { delta: self.delta, epsilon: self.epsilon, time: self.time }
    }
}

/// Norm parameters shared by every trial of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawParams {
    pub delta: f64,
    pub epsilon: f64,
    pub time: TimeGrid,
}

fn trial_seed(seed: u64, trial: usize, input: usize) -> u64 {
    seed.wrapping_mul(0x0100_0000_01b3) ^ ((trial as u64) << 8 | input as u64)
}

/// Seeded inputs and time profiles of trial `trial`. Inputs share their
/// coefficients on common modes across lattices of the same box length.
pub fn law_inputs<T: Real>(
    law: LawId,
    lattice: &LatticeRef<T>,
    seed: u64,
    trial: usize,
    slopes: &[f64],
) -> Result<(Vec<SpectralField<T>>, Vec<TimeProfile>)> {
    let k = law.input_cutoff(lattice.n()) as i64;
    let decaying = [
        TimeProfile::InverseSqrt,
        TimeProfile::Bump { start: (trial % 4) as f64, width: 2.0 },
        TimeProfile::Constant,
    ];
    let mut fields = Vec::new();
    let mut profiles = Vec::new();
    for (i, slot) in law.slots().iter().enumerate() {
        let slope = slopes[(trial + i) % slopes.len()];
        let mut f = random_field_nested(lattice, slope, trial_seed(seed, trial, i), slot.divergence_free(), Band::Half)?;
        truncate_linf(&mut f, k);
        fields.push(f);
        profiles.push(if slot.periodic() { TimeProfile::Periodic } else { decaying[(trial + i) % 3] });
    }
    Ok((fields, profiles))
}

/// Zeroes every mode with `max |m_i| > k`.
pub fn truncate_linf<T: Real>(f: &mut SpectralField<T>, k: i64) {
    let lat = f.lattice().clone();
    for idx in 0..lat.len() {
        if lat.mode(idx).iter().any(|c| c.abs() > k) {
            f.set(idx, Default::default());
        }
    }
}

fn product<T: Real>(shape: Shape, inputs: &[SpectralField<T>]) -> SpectralField<T> {
    let refs: Vec<&SpectralField<T>> = inputs.iter().collect();
    let ph = to_physical_many(&refs);
    match shape {
        Shape::Cross(a, b) => analyze(&phys_cross(&ph[a], &ph[b]), Band::Full),
        Shape::Dot(a, b) => {
            let lat = inputs[a].lattice();
            let zeros = vec![T::zero(); ph[a].comp(0).len()];
            let s = PhysicalField::from_components(lat, [phys_dot(&ph[a], &ph[b]), zeros.clone(), zeros])
                .expect("sizes agree by construction");
            analyze(&s, Band::Full)
        }
        Shape::Div(a, b) => tensor_divergence_phys(&ph[a], &ph[b], Band::Full),
        Shape::Triple(a, b, c) => analyze(&phys_cross(&phys_cross(&ph[a], &ph[b]), &ph[c]), Band::Full),
    }
}

fn inf1(s: f64) -> HybridBesovSpec {
    HybridBesovSpec::besov_inf1(s)
}

fn h(s: f64) -> HybridBesovSpec {
    HybridBesovSpec::sobolev(0.0, s)
}

fn uniform(s: f64, q: SumExp) -> HybridBesovSpec {
    HybridBesovSpec::new(s, s, q, q)
}

/// `(LHS, RHS)` of `law` on one set of inputs. Pointwise laws ignore the
/// profiles; trajectory laws use `θ_i(t) inputs[i]` on `params.time`.
pub fn evaluate_law<T: Real>(
    law: LawId,
    part: &DyadicPartition,
    inputs: &[SpectralField<T>],
    profiles: &[TimeProfile],
    params: &LawParams,
) -> Result<(f64, f64)> {
    let shape = law
        .shape()
        .ok_or_else(|| Error::Unsupported(format!("{law} is not a product law")))?;
    if inputs.len() != law.arity() || profiles.len() != law.arity() {
        return Err(Error::RejectedInput(format!(
            "{law} takes {} inputs and profiles, got {} and {}",
            law.arity(),
            inputs.len(),
            profiles.len()
        )));
    }
    for f in &inputs[1..] {
        inputs[0].check_lattice(f)?;
    }
    let p = product(shape, inputs);
    if law.is_pointwise() {
        let n = |f: &SpectralField<T>, s: HybridBesovSpec| hybrid_norm_l2(part, f, &s);
        let (u, v) = (&inputs[0], &inputs[1]);
        let d = params.delta;
        let inter = |f| n(f, inf1(0.5)) + n(f, inf1(1.5));
        return Ok(match law {
            LawId::BesovSobolevDelta => {
                (n(&p, h(0.5 + d)), n(u, uniform(1.5, SumExp::One)) * n(v, h(0.5 + d)))
            }
            LawId::BesovL2 => (
                n(&p, HybridBesovSpec::sobolev(-1.0, -1.0)),
                n(u, uniform(0.5, SumExp::Infinity)) * n(v, h(0.0)),
            ),
            LawId::SobolevSobolev => (n(&p, uniform(-0.5, SumExp::One)), n(u, h(0.5)) * n(v, h(0.5))),
            LawId::HybridSobolev => (n(&p, h(0.5)), inter(u) * n(v, h(0.5))),
            LawId::HybridHybrid => (n(&p, inf1(0.5)), inter(u) * inter(v)),
            _ => unreachable!("pointwise laws are matched above"),
        });
    }
    let eps = params.epsilon;
    let tr = |f: &SpectralField<T>, prof: &[TimeProfile]| separable_trace(part, f, prof, &params.time, eps);
    let traces: Vec<DecayTrace> =
        inputs.iter().zip(profiles).map(|(f, pr)| tr(f, std::slice::from_ref(pr))).collect::<Result<_>>()?;
    let out_profiles: Vec<TimeProfile> = shape.factors().into_iter().map(|i| profiles[i]).collect();
    let out = tr(&p, &out_profiles)?;
    let norm = |i: usize, k: NormKind| solution_norms(&traces[i], k);
    let ts = |i: usize, s: HybridBesovSpec| tilde_sup(&traces[i], &s);
    let per_inter = |i: usize| ts(i, inf1(0.5)) + tilde_l2_first(&traces[i], &inf1(1.5));
    let lhs_kind = if matches!(law, LawId::Y2UB | LawId::Y2UperB | LawId::Y2UBper) { NormKind::Y2 } else { NormKind::Y1 };
    let lhs = solution_norms(&out, lhs_kind)?;
    let rhs = match law {
        LawId::Y2UB => norm(0, NormKind::Xfull)? * norm(1, NormKind::X3)?,
        LawId::Y2UperB => per_inter(0) * norm(1, NormKind::X3)?,
        LawId::Y2UBper => norm(0, NormKind::Xfull)? * ts(1, h(0.5)),
        LawId::Y1DivUU => norm(0, NormKind::Xfull)? * norm(1, NormKind::Xfull)?,
        LawId::Y1DivUperU => norm(1, NormKind::X1)? * ts(0, inf1(0.5)),
        LawId::Y1EperB => ts(0, h(0.5)) * norm(1, NormKind::X3)?,
        LawId::Y1EBper => norm(0, NormKind::X2)? * ts(1, h(0.5)),
        LawId::Y1EB => norm(0, NormKind::X2)? * ts(1, h(0.5)),
        LawId::Y1UBperBper => norm(0, NormKind::Xfull)? * ts(1, h(0.5)).powi(2),
        LawId::Y1UBBper => norm(0, NormKind::Xfull)? * sup_norm(&traces[1], &h(0.5)) * ts(2, h(0.5)),
        LawId::Y1UperBB => ts(0, uniform(0.5, SumExp::One)) * norm(1, NormKind::X3)?.powi(2),
        LawId::Y1UperBBper => per_inter(0) * ts(2, h(0.5)) * norm(1, NormKind::X3)?,
        _ => unreachable!("trajectory laws are matched above"),
    };
    Ok((lhs, rhs))
}

/// Builds the dyadic partition used on each grid level.
pub type PartitionBuilder = dyn Fn(&FrequencyLattice<f64>) -> Result<DyadicPartition> + Sync;

fn run_level(spec: &LawSpec, n: usize, build: &PartitionBuilder) -> Result<GridReport> {
    let lat = FrequencyLattice::<f64>::new(n, spec.length)?;
    let part = build(&lat)?;
    let params = spec.params();
    let trials = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let (inputs, profiles) = law_inputs(spec.law, &lat, spec.seed, i, &spec.slopes)?;
            let (lhs, rhs) = evaluate_law(spec.law, &part, &inputs, &profiles, &params)?;
            Ok(TrialRecord::new(i, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport::from_trials(format!("n={n}"), trials))
}

/// Runs every trial of `spec` on the coarse and the fine grid. The heat and
/// Maxwell laws are delegated to [`heat_maxreg_check`] and
/// [`maxwell_decay_check`].
pub fn product_law_ratio(spec: &LawSpec) -> Result<RatioReport> {
    product_law_ratio_with(spec, &|lat| DyadicPartition::build(lat))
}

/// [`product_law_ratio`] with a caller-supplied partition for the product
/// laws.
pub fn product_law_ratio_with(spec: &LawSpec, build: &PartitionBuilder) -> Result<RatioReport> {
    spec.validate()?;
    match spec.law {
        LawId::HeatMaxreg => return heat_maxreg_check(&HeatCheckConfig::from(spec)),
        LawId::MaxwellDecay => return maxwell_decay_check(&MaxwellCheckConfig::from(spec)),
        _ => {}
    }
    let coarse = run_level(spec, spec.grids[0], build)?;
    let fine = run_level(spec, spec.grids[1], build)?;
    Ok(RatioReport { law: spec.law, coarse, fine, rule: Refinement::AtMost { factor: 2.0 } })
}
