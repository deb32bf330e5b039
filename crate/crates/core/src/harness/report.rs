use serde::{Deserialize, Serialize};

use crate::harness::laws::LawId;

/// Both sides of one trial. `ratio` is `None` for a skipped trial (RHS = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

impl TrialRecord {
    pub fn new(trial: usize, lhs: f64, rhs: f64) -> Self {
        let ratio = (rhs > 0.0).then(|| lhs / rhs);
        Self { trial, lhs, rhs, ratio }
    }
}

/// Trials of one discretisation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    /// Discretisation label, e.g. `n=32` or `dt=1/16`.
    pub label: String,
    pub trials: Vec<TrialRecord>,
    pub skipped: usize,
    /// Largest ratio over non-skipped trials, 0 when all were skipped.
    pub max_ratio: f64,
}

impl GridReport {
    pub fn from_trials(label: impl Into<String>, mut trials: Vec<TrialRecord>) -> Self {
        trials.sort_by_key(|t| t.trial);
        let skipped = trials.iter().filter(|t| t.ratio.is_none()).count();
        let max_ratio = trials.iter().filter_map(|t| t.ratio).fold(0.0, f64::max);
        Self { label: label.into(), trials, skipped, max_ratio }
    }

    pub fn is_finite(&self) -> bool {
        self.max_ratio.is_finite() && self.trials.iter().all(|t| t.lhs.is_finite() && t.rhs.is_finite())
    }
}

/// Pass rule comparing the refined level against the coarse one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Refinement {
    /// `fine ≤ factor · coarse`
    AtMost { factor: f64 },
    /// `|fine - coarse| ≤ tol · coarse`
    Within { tol: f64 },
}

impl Refinement {
    pub fn holds(&self, coarse: f64, fine: f64) -> bool {
        match *self {
            Refinement::AtMost { factor } => fine <= factor * coarse,
            Refinement::Within { tol } => (fine - coarse).abs() <= tol * coarse,
        }
    }
}

/// Worst-case ratios of one law at a coarse and a refined discretisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub law: LawId,
    pub coarse: GridReport,
    pub fine: GridReport,
    pub rule: Refinement,
}

impl RatioReport {
    pub fn max_ratio(&self) -> f64 {
        self.coarse.max_ratio.max(self.fine.max_ratio)
    }

    /// `fine.max_ratio / coarse.max_ratio`.
    pub fn refinement_factor(&self) -> f64 {
        self.fine.max_ratio / self.coarse.max_ratio
    }

    pub fn skipped(&self) -> usize {
        self.coarse.skipped + self.fine.skipped
    }

    /// Finite ratios on both levels and the refinement rule satisfied.
    pub fn passed(&self) -> bool {
        self.coarse.is_finite()
            && self.fine.is_finite()
            && self.rule.holds(self.coarse.max_ratio, self.fine.max_ratio)
    }
}
