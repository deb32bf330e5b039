use serde::{Deserialize, Serialize};

use crate::dyadic::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::transform::to_physical;
use crate::spectral::SpectralField;

/// Frequency blocks `Δ_q f` of a field with their `L^2` and `L^∞` norms.
#[derive(Debug, Clone)]
pub struct BlockDecomposition<T: Real> {
    q_min: i32,
    blocks: Vec<SpectralField<T>>,
    l2: Vec<f64>,
    linf: Vec<f64>,
}

/// Applies `φ(2^{-q}D)` for one block.
pub fn block_of<T: Real>(part: &DyadicPartition, f: &SpectralField<T>, q: i32) -> SpectralField<T> {
    let lat = f.lattice().clone();
    let mut out = SpectralField::zeros(&lat);
    for idx in 1..lat.len() {
        let w = part.weight(q, lat.shell(idx));
        if w != 0.0 {
            let w = T::lit(w);
            let a = f.at(idx);
            out.set(idx, [a[0] * w, a[1] * w, a[2] * w]);
        }
    }
    out
}

/// Per-block `L^2` norms only, indexed from `q_min`.
pub fn block_l2_norms<T: Real>(part: &DyadicPartition, f: &SpectralField<T>) -> Vec<f64> {
    let lat = f.lattice();
    let mut acc = vec![0.0f64; part.len()];
    for idx in 1..lat.len() {
        let a = f.at(idx);
        let e = (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).as_f64();
        if e == 0.0 {
            continue;
        }
        for &(q, w) in part.shell_weights(lat.shell(idx)) {
            acc[(q - part.q_min()) as usize] += w * w * e;
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// `L^∞` norm (max of the pointwise Euclidean length over grid samples).
pub fn linf_norm<T: Real>(f: &SpectralField<T>) -> f64 {
    let p = to_physical(f);
    let c = p.comps();
    (0..c[0].len())
        .map(|i| (c[0][i] * c[0][i] + c[1][i] * c[1][i] + c[2][i] * c[2][i]).as_f64())
        .fold(0.0, f64::max)
        .sqrt()
}

impl<T: Real> BlockDecomposition<T> {
    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_min + self.blocks.len() as i32 - 1
    }

    pub fn block(&self, q: i32) -> Option<&SpectralField<T>> {
        let i = q - self.q_min;
        if i < 0 {
            return None;
        }
        self.blocks.get(i as usize)
    }

    pub fn blocks(&self) -> &[SpectralField<T>] {
        &self.blocks
    }

    /// `‖Δ_q f‖_{L^2}` indexed from `q_min`.
    pub fn l2_norms(&self) -> &[f64] {
        &self.l2
    }

    /// `‖Δ_q f‖_{L^∞}` indexed from `q_min`.
    pub fn linf_norms(&self) -> &[f64] {
        &self.linf
    }

    /// Block norms for a given Lebesgue exponent.
    pub fn norms(&self, p: Lebesgue) -> &[f64] {
        match p {
            Lebesgue::Two => &self.l2,
            Lebesgue::Infinity => &self.linf,
        }
    }

    /// `Σ_q Δ_q f`.
    pub fn reconstruct(&self) -> SpectralField<T> {
        let mut out = SpectralField::zeros(self.blocks[0].lattice());
        for b in &self.blocks {
            out.axpy(T::one(), b);
        }
        out
    }
}

/// Splits a field into its dyadic blocks and fills their norms.
pub fn block_decompose<T: Real>(part: &DyadicPartition, f: &SpectralField<T>) -> BlockDecomposition<T> {
    use rayon::prelude::*;
    let blocks: Vec<SpectralField<T>> = part.blocks().map(|q| block_of(part, f, q)).collect();
    let l2 = blocks.iter().map(|b| b.norm_l2().as_f64()).collect();
    let linf = blocks.par_iter().map(linf_norm).collect();
    BlockDecomposition { q_min: part.q_min(), blocks, l2, linf }
}

/// Lebesgue exponent of the block norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lebesgue {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

/// Summation exponent over blocks: 1, 2 or ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumExp {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

/// Hybrid Besov norm parameters: regularity `s1` on blocks `q <= 0`, `s2`
/// on blocks `q > 0`, Lebesgue exponent `p`, and summation exponents
/// `q1`, `q2` on the two frequency ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridBesovSpec {
    pub s1: f64,
    pub s2: f64,
    pub p: Lebesgue,
    pub q1: SumExp,
    pub q2: SumExp,
}

impl HybridBesovSpec {
    pub const fn new(s1: f64, s2: f64, q1: SumExp, q2: SumExp) -> Self {
        Self { s1, s2, p: Lebesgue::Two, q1, q2 }
    }

    /// `Ḃ^s_{2,(∞,1)}`.
    pub const fn besov_inf1(s: f64) -> Self {
        Self::new(s, s, SumExp::Infinity, SumExp::One)
    }

    /// `Ḣ^{s1,s2}`; the inhomogeneous `H^s` is `(0, s)`.
    pub const fn sobolev(s1: f64, s2: f64) -> Self {
        Self::new(s1, s2, SumExp::Two, SumExp::Two)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s1.is_finite() || !self.s2.is_finite() {
            return Err(Error::Config("hybrid norm exponents must be finite".into()));
        }
        Ok(())
    }

    /// Combines per-block values `v[q - q_min]` into the hybrid norm.
    pub fn combine(&self, q_min: i32, v: &[f64]) -> f64 {
        let mut low = Vec::new();
        let mut high = Vec::new();
        for (i, &x) in v.iter().enumerate() {
            let q = q_min + i as i32;
            if q <= 0 {
                low.push((q as f64 * self.s1).exp2() * x);
            } else {
                high.push((q as f64 * self.s2).exp2() * x);
            }
        }
        sum_with(self.q1, &low) + sum_with(self.q2, &high)
    }
}

fn sum_with(e: SumExp, v: &[f64]) -> f64 {
    match e {
        SumExp::One => v.iter().sum(),
        SumExp::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        SumExp::Infinity => v.iter().copied().fold(0.0, f64::max),
    }
}

/// Hybrid Besov norm of a decomposed field.
pub fn hybrid_norm<T: Real>(d: &BlockDecomposition<T>, spec: &HybridBesovSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.combine(d.q_min, d.norms(spec.p)))
}

/// Hybrid norm with `p = 2`, computed from block `L^2` norms without
/// materializing the blocks.
pub fn hybrid_norm_l2<T: Real>(part: &DyadicPartition, f: &SpectralField<T>, spec: &HybridBesovSpec) -> f64 {
    spec.combine(part.q_min(), &block_l2_norms(part, f))
}

/// Mode-by-mode weighted `ℓ^2` norm `(Σ_m Σ_q 2^{2 q s(q)} φ_q^2 |c_m|^2)^{1/2}`
/// using the same block weights, for comparison with the `q1 = q2 = 2`
/// hybrid norm.
pub fn modewise_sobolev<T: Real>(part: &DyadicPartition, f: &SpectralField<T>, s1: f64, s2: f64) -> (f64, f64) {
    let lat = f.lattice();
    let (mut low, mut high) = (0.0f64, 0.0f64);
    for idx in 1..lat.len() {
        let a: [Cplx<T>; 3] = f.at(idx);
        let e = (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).as_f64();
        for &(q, w) in part.shell_weights(lat.shell(idx)) {
            if q <= 0 {
                low += (2.0 * q as f64 * s1).exp2() * w * w * e;
            } else {
                high += (2.0 * q as f64 * s2).exp2() * w * w * e;
            }
        }
    }
    (low.sqrt(), high.sqrt())
}

impl Lebesgue {
    /// Parses a numeric exponent; only 2 and ∞ are supported.
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == 2.0 {
            Ok(Lebesgue::Two)
        } else if p == f64::INFINITY {
            Ok(Lebesgue::Infinity)
        } else {
            Err(Error::Unsupported(format!("Lebesgue exponent p = {p}")))
        }
    }
}
