use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{extremal_singular_values, gaussian_matrix, RngStream, SingularExtremes};
use crate::error::Result;
use crate::field::Field;

/// Trials per parallel task in [`empirical_gamma_tail`].
const GAMMA_CHUNK: u64 = 4096;

/// Observed frequency of an event over independent trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency {
    pub hits: u64,
    pub trials: u64,
}

impl Frequency {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    /// Binomial standard error of a proportion `p` over these trials.
    pub fn standard_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Whether the frequency is at most `bound` plus `k` standard errors,
    /// with the error evaluated at the bound.
    pub fn within(&self, bound: f64, k: f64) -> bool {
        let bound = bound.clamp(0.0, 1.0);
        self.frequency() <= bound + k * self.standard_error_at(bound)
    }
}

/// Frequency of `‖A*v‖ ≤ √(δn)`.
///
/// The law of `‖A*v‖` does not depend on the unit vector `v`, so each trial
/// draws only the first row of `A` (`v = e₁`).
pub fn empirical_gamma_tail(
    delta: f64,
    n: usize,
    n_cols: usize,
    field: Field,
    trials: u64,
    rng: &RngStream,
) -> Frequency {
    let threshold = delta * n as f64;
    let draws_per_row = n_cols * field.real_dim();
    let chunks = trials.div_ceil(GAMMA_CHUNK);
    let hits = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut r = rng.child(chunk).rng();
            let len = GAMMA_CHUNK.min(trials - chunk * GAMMA_CHUNK);
            (0..len)
                .filter(|_| {
                    let norm_sq: f64 = (0..draws_per_row)
                        .map(|_| {
                            let x: f64 = StandardNormal.sample(&mut r);
                            x * x
                        })
                        .sum();
                    norm_sq <= threshold
                })
                .count() as u64
        })
        .sum();
    Frequency { hits, trials }
}

/// Extremal singular values of `trials` independent Gaussian matrices; trial
/// `i` uses `rng.child(i)`.
pub fn sample_extremes(
    n: usize,
    n_cols: usize,
    field: Field,
    trials: u64,
    rng: &RngStream,
) -> Result<Vec<SingularExtremes>> {
    (0..trials)
        .into_par_iter()
        .map(|i| extremal_singular_values(&gaussian_matrix(&rng.child(i), n, n_cols, field)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunningStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl RunningStats {
    fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let (mut sum, mut count) = (0.0, 0usize);
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            sum += v;
            count += 1;
            min = min.min(v);
            max = max.max(v);
        }
        Self {
            mean: sum / count as f64,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremesSummary {
    pub trials: u64,
    pub sigma_max: RunningStats,
    pub sigma_min: RunningStats,
}

impl ExtremesSummary {
    pub fn from_samples(samples: &[SingularExtremes]) -> Self {
        Self {
            trials: samples.len() as u64,
            sigma_max: RunningStats::from_values(samples.iter().map(|e| e.sigma_max)),
            sigma_min: RunningStats::from_values(samples.iter().map(|e| e.sigma_min)),
        }
    }
}

pub fn empirical_extremes(
    n: usize,
    n_cols: usize,
    field: Field,
    trials: u64,
    rng: &RngStream,
) -> Result<ExtremesSummary> {
    Ok(ExtremesSummary::from_samples(&sample_extremes(
        n, n_cols, field, trials, rng,
    )?))
}
