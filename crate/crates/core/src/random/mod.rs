//! Seeded Gaussian matrices, their extremal singular values, and Monte Carlo
//! estimators for the analytic tails.

mod matrix;
mod monte_carlo;
mod rng;
mod svd;

pub use matrix::{gaussian_matrix, DenseMatrix, DUMP_MAGIC, DUMP_VERSION};
pub use monte_carlo::{
    empirical_extremes, empirical_gamma_tail, sample_extremes, ExtremesSummary, Frequency,
    RunningStats,
};
pub use rng::RngStream;
pub use svd::{extremal_singular_values, SingularExtremes, SvMethod, RESIDUAL_TOLERANCE};
