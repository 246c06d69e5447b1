use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::subsets::{check_enumerable, next_combination, subset_at_rank};
use super::FrameMatrix;
use crate::error::{Error, Result};
use crate::random::{extremal_singular_values, RngStream};

/// Subsets (or sampled trials) handled by one parallel task.
const CHUNK: u64 = 4096;
/// Condition numbers kept per task for quantile estimation.
const RESERVOIR: usize = 1024;
/// Quantile levels reported for the condition-number distribution.
pub const QUANTILE_LEVELS: [f64; 3] = [0.5, 0.9, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErasureMode {
    Exhaustive,
    Sampled,
}

/// How [`nerf_check`] visits subsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckMode {
    Exhaustive { cap: u128 },
    Sampled { trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantile {
    pub q: f64,
    pub value: f64,
}

/// Extremal spectra over the visited K-subsets of a frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureReport {
    pub mode: ErasureMode,
    /// Number of subsets visited: `C(N, K)` when exhaustive, trials when sampled.
    pub total: u64,
    /// Largest `σ₁(F_S)/σ_n(F_S)`; `+inf` (JSON `null`) if some `F_S` is rank deficient.
    pub worst_condition: f64,
    pub worst_pattern: Vec<usize>,
    pub min_sigma_min: f64,
    pub max_sigma_max: f64,
    /// Subsets with `σ_n < α` or `σ₁ > β`; absent when no window was given.
    pub violations: Option<u64>,
    pub quantiles: Vec<Quantile>,
    pub seed: Option<u64>,
    pub stream_id: Option<u64>,
}

impl ErasureReport {
    /// Zero violations, i.e. the frame passed the `[α, β]` window on every visited subset.
    pub fn passed(&self) -> bool {
        self.violations == Some(0)
    }
}

/// Per-task accumulator; merged in task order.
struct Partial {
    seen: u64,
    worst: f64,
    worst_pattern: Vec<usize>,
    min_sigma_min: f64,
    max_sigma_max: f64,
    violations: u64,
    reservoir: Vec<f64>,
}

impl Partial {
    fn new() -> Self {
        Self {
            seen: 0,
            worst: f64::NEG_INFINITY,
            worst_pattern: Vec::new(),
            min_sigma_min: f64::INFINITY,
            max_sigma_max: 0.0,
            violations: 0,
            reservoir: Vec::new(),
        }
    }

    fn push(
        &mut self,
        f: &FrameMatrix,
        kept: &[usize],
        window: Option<(f64, f64)>,
        rng: &mut ChaCha12Rng,
    ) -> Result<()> {
        let (sigma_n, sigma_1) = subset_spectrum(f, kept)?;
        let cond = if sigma_n > 0.0 {
            sigma_1 / sigma_n
        } else {
            f64::INFINITY
        };
        if cond > self.worst {
            self.worst = cond;
            self.worst_pattern = kept.to_vec();
        }
        self.min_sigma_min = self.min_sigma_min.min(sigma_n);
        self.max_sigma_max = self.max_sigma_max.max(sigma_1);
        if let Some((alpha, beta)) = window {
            if sigma_n < alpha || sigma_1 > beta {
                self.violations += 1;
            }
        }
        // Algorithm R
        self.seen += 1;
        if self.reservoir.len() < RESERVOIR {
            self.reservoir.push(cond);
        } else {
            let j = rng.gen_range(0..self.seen);
            if (j as usize) < RESERVOIR {
                self.reservoir[j as usize] = cond;
            }
        }
        Ok(())
    }
}

/// `(σ_n, σ₁)` of `F_S`, with σ_n the minimum of `‖F_S* v‖` over the unit
/// sphere of the ambient space: zero when `|S| < n` or `F_S` is numerically
/// rank deficient.
fn subset_spectrum(f: &FrameMatrix, kept: &[usize]) -> Result<(f64, f64)> {
    let sub = f.matrix().select_columns(kept)?;
    let e = extremal_singular_values(&sub)?;
    let n = f.dim();
    let rank_tol = n.max(kept.len()) as f64 * f64::EPSILON * e.sigma_max;
    let sigma_n = if kept.len() < n || e.sigma_min <= rank_tol {
        0.0
    } else {
        e.sigma_min
    };
    Ok((sigma_n, e.sigma_max))
}

fn merge(mode: ErasureMode, parts: Vec<Partial>, window: Option<(f64, f64)>) -> ErasureReport {
    let mut total = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pattern = Vec::new();
    let (mut min_sn, mut max_s1, mut violations) = (f64::INFINITY, 0.0f64, 0);
    let mut weighted = Vec::new();
    for p in parts {
        total += p.seen;
        if p.worst > worst {
            worst = p.worst;
            worst_pattern = p.worst_pattern;
        }
        min_sn = min_sn.min(p.min_sigma_min);
        max_s1 = max_s1.max(p.max_sigma_max);
        violations += p.violations;
        let w = p.seen as f64 / p.reservoir.len().max(1) as f64;
        weighted.extend(p.reservoir.into_iter().map(|v| (v, w)));
    }
    ErasureReport {
        mode,
        total,
        worst_condition: worst,
        worst_pattern,
        min_sigma_min: min_sn,
        max_sigma_max: max_s1,
        violations: window.map(|_| violations),
        quantiles: weighted_quantiles(weighted),
        seed: None,
        stream_id: None,
    }
}

fn weighted_quantiles(mut values: Vec<(f64, f64)>) -> Vec<Quantile> {
    if values.is_empty() {
        return Vec::new();
    }
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = values.iter().map(|v| v.1).sum();
    QUANTILE_LEVELS
        .iter()
        .map(|&q| {
            let target = q * total;
            let mut acc = 0.0;
            let value = values
                .iter()
                .find(|(_, w)| {
                    acc += w;
                    acc >= target
                })
                .unwrap_or(values.last().expect("nonempty"))
                .0;
            Quantile { q, value }
        })
        .collect()
}

// Reservoir replacement in exhaustive mode draws from this fixed stream.
const EXHAUSTIVE_STREAM: RngStream = RngStream {
    seed: 0x4e45_5246,
    stream_id: 0,
};

fn scan_exhaustive(
    f: &FrameMatrix,
    k: usize,
    cap: u128,
    window: Option<(f64, f64)>,
) -> Result<ErasureReport> {
    let count = check_enumerable(f.len(), k, cap)?;
    let count = u64::try_from(count).map_err(|_| Error::EnumerationCap {
        n_cols: f.len(),
        k,
        count,
        cap,
    })?;
    let chunks = count.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = EXHAUSTIVE_STREAM.child(chunk).rng();
            let mut part = Partial::new();
            let mut c = subset_at_rank(f.len(), k, (chunk * CHUNK) as u128);
            let len = CHUNK.min(count - chunk * CHUNK);
            for i in 0..len {
                part.push(f, &c, window, &mut rng)?;
                if i + 1 < len {
                    next_combination(&mut c, f.len());
                }
            }
            Ok(part)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(ErasureMode::Exhaustive, parts, window))
}

fn scan_sampled(
    f: &FrameMatrix,
    k: usize,
    trials: u64,
    rng: &RngStream,
    window: Option<(f64, f64)>,
) -> Result<ErasureReport> {
    let n_cols = f.len();
    if k == 0 || k > n_cols {
        return Err(Error::Domain(format!(
            "need 0 < K <= N, got K = {k}, N = {n_cols}"
        )));
    }
    if trials == 0 {
        return Err(Error::Domain(
            "sampled mode needs at least one trial".into(),
        ));
    }
    let chunks = trials.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut r = rng.child(chunk).rng();
            let mut part = Partial::new();
            let mut idx: Vec<usize> = (0..n_cols).collect();
            let mut kept = vec![0; k];
            for _ in 0..CHUNK.min(trials - chunk * CHUNK) {
                // partial Fisher–Yates
                for i in 0..k {
                    let j = r.gen_range(i..n_cols);
                    idx.swap(i, j);
                }
                kept.copy_from_slice(&idx[..k]);
                kept.sort_unstable();
                part.push(f, &kept, window, &mut r)?;
            }
            Ok(part)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = merge(ErasureMode::Sampled, parts, window);
    report.seed = Some(rng.seed);
    report.stream_id = Some(rng.stream_id);
    Ok(report)
}

/// Exact `R(F, N−K)` and extremal singular values over all K-subsets.
pub fn worst_condition_exhaustive(f: &FrameMatrix, k: usize, cap: u128) -> Result<ErasureReport> {
    scan_exhaustive(f, k, cap, None)
}

/// Maximum condition number over `trials` uniformly drawn K-subsets, a lower
/// bound on `R(F, N−K)`. Subsets may repeat across trials.
pub fn worst_condition_sampled(
    f: &FrameMatrix,
    k: usize,
    trials: u64,
    rng: &RngStream,
) -> Result<ErasureReport> {
    scan_sampled(f, k, trials, rng, None)
}

/// Counts K-subsets with `σ_n(F_S) < α` or `σ₁(F_S) > β`. In exhaustive mode
/// zero violations certify `F` as a `(K, α, β)`-NERF.
pub fn nerf_check(
    f: &FrameMatrix,
    k: usize,
    alpha: f64,
    beta: f64,
    mode: CheckMode,
    rng: &RngStream,
) -> Result<ErasureReport> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "need alpha, beta > 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let window = Some((alpha, beta));
    match mode {
        CheckMode::Exhaustive { cap } => scan_exhaustive(f, k, cap, window),
        CheckMode::Sampled { trials } => scan_sampled(f, k, trials, rng, window),
    }
}
