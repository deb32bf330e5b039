//! Randomized checks of the product laws and linear estimates: seeded
//! inputs, both sides of each inequality, worst-case ratios and their
//! stability under refinement.

pub mod heat;
pub mod laws;
pub mod maxwell;
pub mod profile;
pub mod report;

pub use heat::{heat_inputs, heat_maxreg_check, heat_sides, heat_trace, HeatCheckConfig};
pub use laws::{
    evaluate_law, law_inputs, product_law_ratio, product_law_ratio_with, truncate_linf, LawId, LawParams, LawSpec,
    PartitionBuilder,
};
pub use maxwell::{maxwell_decay_check, maxwell_inputs, maxwell_sides, maxwell_traces, MaxwellCheckConfig};
pub use profile::{separable_trace, sup_norm, tilde_l2_first, tilde_sup, TimeGrid, TimeProfile};
pub use report::{GridReport, RatioReport, Refinement, TrialRecord};
