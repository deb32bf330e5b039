//! Littlewood–Paley blocks, Bony paraproducts, hybrid Besov norms and the
//! time-windowed decay norms.

pub mod blocks;
pub mod bony;
pub mod partition;
pub mod trace;

pub use blocks::{
    block_decompose, block_l2_norms, hybrid_norm, hybrid_norm_l2, BlockDecomposition, HybridBesovSpec, Lebesgue,
    SumExp,
};
pub use bony::{bony_split, BonySplit};
pub use partition::DyadicPartition;
pub use trace::{decay_fit, solution_norms, DecayFit, DecayTrace, NormKind, DEFAULT_EPSILON};
