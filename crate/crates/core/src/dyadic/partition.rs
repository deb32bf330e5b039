use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::FrequencyLattice;

/// Inner edge of the cutoff transition, `χ(r) = 1` for `r <= 3/4`.
pub const CHI_INNER: f64 = 0.75;
/// Outer edge of the cutoff transition, `χ(r) = 0` for `r >= 4/3`.
pub const CHI_OUTER: f64 = 4.0 / 3.0;

fn bump_tail(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 (x <= 0) to 1 (x >= 1).
pub fn smoothstep(x: f64) -> f64 {
    let a = bump_tail(x);
    let b = bump_tail(1.0 - x);
    if a + b == 0.0 {
        return if x >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Radial low-pass cutoff, equal to 1 on `[0, 3/4]` and 0 on `[4/3, ∞)`.
pub fn chi(r: f64) -> f64 {
    smoothstep((CHI_OUTER - r) / (CHI_OUTER - CHI_INNER))
}

/// Dyadic profile `φ(ξ) = χ(|ξ|/2) - χ(|ξ|)`, supported in `3/4 < |ξ| < 8/3`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// `φ(2^{-q} ξ)` at radius `r`, written as a difference of cutoffs so that
/// consecutive blocks telescope.
pub fn phi_block(q: i32, r: f64) -> f64 {
    chi(r * (-(q + 1) as f64).exp2()) - chi(r * (-q as f64).exp2())
}

/// Littlewood–Paley partition evaluated on a lattice.
///
/// Every lattice shell lies in the support of at most two consecutive
/// blocks; `weights` lists the nonzero `(q, φ(2^{-q}ξ))` pairs per shell.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    q_min: i32,
    q_max: i32,
    /// `base^2`-free shell index `|m|^2` → nonzero block weights
    weights: Vec<Vec<(i32, f64)>>,
}

impl DyadicPartition {
    /// Builds the partition on `lattice`, keeping every block whose support
    /// meets a nonzero lattice wavevector.
    pub fn build<T: Real>(lattice: &FrequencyLattice<T>) -> Result<Self> {
        let max_shell = lattice.max_shell();
        let mut present = vec![false; max_shell as usize + 1];
        for idx in 1..lattice.len() {
            present[lattice.shell(idx) as usize] = true;
        }
        let mut weights = vec![Vec::new(); max_shell as usize + 1];
        let mut q_min = i32::MAX;
        let mut q_max = i32::MIN;
        for (s, w) in weights.iter_mut().enumerate() {
            if s == 0 || !present[s] {
                continue;
            }
            let r = lattice.shell_xi2(s as u32).as_f64().sqrt();
            // blocks with r 2^{-q} in (3/4, 8/3)
            let lo = (r * 3.0 / 8.0).log2().floor() as i32;
            let hi = (r * 4.0 / 3.0).log2().ceil() as i32;
            for q in lo..=hi {
                let v = phi_block(q, r);
                if v > 0.0 {
                    w.push((q, v));
                    q_min = q_min.min(q);
                    q_max = q_max.max(q);
                }
            }
        }
        if q_min > q_max || q_max - q_min + 1 < 3 {
            return Err(Error::Config(format!(
                "lattice n = {} with L = {} hosts fewer than 3 dyadic blocks",
                lattice.n(),
                lattice.length()
            )));
        }
        Ok(Self { q_min, q_max, weights })
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Number of retained blocks.
    pub fn len(&self) -> usize {
        (self.q_max - self.q_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Retained block indices, ascending.
    pub fn blocks(&self) -> impl Iterator<Item = i32> {
        self.q_min..=self.q_max
    }

    /// Nonzero `(q, weight)` pairs for the integer shell `|m|^2`.
    pub fn shell_weights(&self, shell: u32) -> &[(i32, f64)] {
        self.weights.get(shell as usize).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Weight of block `q` on a shell.
    pub fn weight(&self, q: i32, shell: u32) -> f64 {
        self.shell_weights(shell).iter().find(|(b, _)| *b == q).map(|(_, w)| *w).unwrap_or(0.0)
    }

    /// Applies `f(q, weight)` to every nonzero block weight. The result need
    /// not be a partition of unity.
    pub fn reweighted(&self, f: impl Fn(i32, f64) -> f64) -> Self {
        let weights = self.weights.iter().map(|w| w.iter().map(|&(q, v)| (q, f(q, v))).collect()).collect();
        Self { q_min: self.q_min, q_max: self.q_max, weights }
    }

    /// Largest deviation of `Σ_q φ(2^{-q}ξ)` from 1 over the lattice shells.
    pub fn unity_defect(&self) -> f64 {
        self.weights
            .iter()
            .filter(|w| !w.is_empty())
            .map(|w| (w.iter().map(|(_, v)| v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Extremes of `Σ_q φ(2^{-q}ξ)^2` over the lattice shells. Block `ℓ^2`
    /// sums sit between these multiples of the squared field norm.
    pub fn square_sum_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for w in self.weights.iter().filter(|w| !w.is_empty()) {
            let s: f64 = w.iter().map(|(_, v)| v * v).sum();
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_edges() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert!(chi(1.0) > 0.0 && chi(1.0) < 1.0);
        assert_eq!(phi(0.75), 0.0);
        assert_eq!(phi(8.0 / 3.0), 0.0);
        assert_eq!(phi(1.4), 1.0);
    }
}
