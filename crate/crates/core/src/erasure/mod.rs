//! Worst-case condition numbers of a frame over column subsets.
//!
//! For a frame matrix `F` (n × N) and a retained-set size K, the robustness to
//! `N − K` erasures is `R(F, N−K) = max_{|S|=K} σ₁(F_S) / σ_n(F_S)`. This module
//! evaluates it exactly by enumerating every K-subset, or estimates it from
//! below by sampling subsets, and counts subsets outside a certificate's
//! `[α, β]` window.

mod frame;
mod report;
mod subsets;

pub use frame::{frame_from_gaussian, submatrix, ErasurePattern, FrameMatrix};
pub use report::{
    nerf_check, worst_condition_exhaustive, worst_condition_sampled, CheckMode, ErasureMode,
    ErasureReport, Quantile, QUANTILE_LEVELS,
};
pub use subsets::{binomial, subset_at_rank, subsets_lex, LexSubsets, DEFAULT_ENUM_CAP};
