//! Self-checks of the bounds against exact values, sweeps and seeded samples.

use std::f64::consts::E;
use std::fmt;

use nerf_core::bounds::{
    approx_c_tilde, binomial_log_bound, certificate_constants, gamma_tail_bound, ln_phi_at_log,
    maximize_phi, phi, smallest_sv_constant, PhiParams,
};
use nerf_core::erasure::{frame_from_gaussian, worst_condition_exhaustive};
use nerf_core::random::{empirical_gamma_tail, gaussian_matrix, sample_extremes, RngStream};
use nerf_core::{ConstantConvention, Error, Field, Result};
use rand::Rng;
use serde::Serialize;

use crate::curve::{sweep, PointStatus, SweepMode, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Binomial,
    Consistency,
    Examples,
    Shapes,
    Extremes,
    Theorem,
    Gamma,
    Erasure,
    Complex,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Binomial,
        Check::Consistency,
        Check::Examples,
        Check::Shapes,
        Check::Extremes,
        Check::Theorem,
        Check::Gamma,
        Check::Erasure,
        Check::Complex,
    ];
}

/// Shapes and sample sizes; `None` selects each check's own default.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub checks: Vec<Check>,
    pub max_n: u64,
    pub n: Option<u64>,
    pub n_cols: Option<u64>,
    pub trials: Option<u64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            max_n: 30,
            n: None,
            n_cols: None,
            trials: None,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub observed: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Distance to the nearest violated side; negative on failure.
    pub margin: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn at_most(name: impl Into<String>, observed: f64, upper: f64) -> Self {
        Self::within(name, observed, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, observed: f64, lower: f64) -> Self {
        Self::within(name, observed, Some(lower), None)
    }

    pub fn within(
        name: impl Into<String>,
        observed: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> Self {
        let lo = lower.map_or(f64::INFINITY, |b| observed - b);
        let hi = upper.map_or(f64::INFINITY, |b| b - observed);
        let margin = lo.min(hi);
        Self {
            name: name.into(),
            observed,
            lower,
            upper,
            margin,
            passed: margin >= 0.0,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => format!("[{lo:.6e}, {hi:.6e}]"),
            (Some(lo), None) => format!(">= {lo:.6e}"),
            (None, Some(hi)) => format!("<= {hi:.6e}"),
            (None, None) => "-".into(),
        };
        write!(
            f,
            "{} {:<32} observed={:.9e} bound={} margin={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            bound,
            self.margin
        )
    }
}

/// Condition bounds quoted for the two worked examples, as
/// `(mode, ratio, s, value)`.
pub const EXAMPLE_VALUES: [(SweepMode, f64, f64, f64); 10] = [
    (SweepMode::FixedK, 2.0, 0.5, 10232.0),
    (SweepMode::FixedK, 2.0, 0.9, 611675.0),
    (SweepMode::FixedK, 5.0, 0.5, 139.88),
    (SweepMode::FixedK, 5.0, 0.9, 1862.1),
    (SweepMode::FixedK, 5.0, 0.99, 42716.0),
    (SweepMode::FixedN, 50.0, 0.5, 31.7),
    (SweepMode::FixedN, 50.0, 0.9, 1862.1),
    (SweepMode::FixedN, 200.0, 0.5, 23.48),
    (SweepMode::FixedN, 200.0, 0.9, 315.12),
    (SweepMode::FixedN, 200.0, 0.95, 1312.4),
];

/// Accepted range of computed/quoted condition bounds.
pub const EXAMPLE_FACTOR: (f64, f64) = (0.75, 1.35);

pub const EXAMPLE_TAU0: f64 = 0.25;

pub fn run(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let checks: &[Check] = if opts.checks.is_empty() {
        &Check::ALL
    } else {
        &opts.checks
    };
    let mut out = Vec::new();
    for &check in checks {
        out.extend(match check {
            Check::Binomial => binomial(opts.max_n)?,
            Check::Consistency => consistency(Field::Real, 1000, 100, opts.seed)?,
            Check::Examples => examples()?,
            Check::Shapes => shapes()?,
            Check::Extremes => extremes(
                opts.n.unwrap_or(50),
                opts.n_cols.unwrap_or(200),
                Field::Real,
                opts.trials.unwrap_or(1000),
                opts.seed,
            )?,
            Check::Theorem => theorem(
                opts.n.unwrap_or(50),
                opts.n_cols.unwrap_or(200),
                Field::Real,
                opts.trials.unwrap_or(1000),
                opts.seed,
            )?,
            Check::Gamma => gamma(
                opts.n.unwrap_or(10),
                opts.n_cols.unwrap_or(40),
                opts.trials.unwrap_or(100_000),
                opts.seed,
            )?,
            Check::Erasure => erasure(opts.trials.unwrap_or(20), opts.seed)?,
            Check::Complex => {
                let mut v = consistency(Field::Complex, 1000, 100, opts.seed)?;
                v.extend(theorem(
                    opts.n.unwrap_or(50),
                    opts.n_cols.unwrap_or(200),
                    Field::Complex,
                    opts.trials.unwrap_or(1000),
                    opts.seed,
                )?);
                v
            }
        });
    }
    Ok(out)
}

/// The bound against exact coefficients for every `0 ≤ K ≤ N ≤ max_n`.
pub fn binomial(max_n: u64) -> Result<Vec<CheckResult>> {
    if max_n > 125 {
        return Err(Error::Domain(format!(
            "exact binomials need max_n <= 125, got {max_n}"
        )));
    }
    let mut row = vec![1u128];
    let (mut slack, mut endpoint) = (f64::INFINITY, 0.0f64);
    for n in 0..=max_n {
        if n > 0 {
            let mut next = vec![1u128; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        for (k, &exact) in row.iter().enumerate() {
            let gap = binomial_log_bound(n, k as u64)? - (exact as f64).ln();
            if k == 0 || k as u64 == n {
                endpoint = endpoint.max(gap.abs());
            } else {
                slack = slack.min(gap);
            }
        }
    }
    Ok(vec![
        CheckResult::at_least("binomial/dominance", slack, 0.0),
        CheckResult::at_most("binomial/endpoints", endpoint, 1e-12),
    ])
}

/// `c̃ ≤ c`, concavity of φ, and the optimizer against a dense grid.
pub fn consistency(
    field: Field,
    draws: usize,
    grid_draws: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let tag = field_tag(field);
    let mut rng = RngStream::new(seed, 1).rng();
    let draw = |rng: &mut rand_chacha::ChaCha12Rng| -> Result<PhiParams> {
        let lambda = 1.0 + 99.0 * (1.0 - rng.gen::<f64>());
        let mu = 100.0 * (1.0 - rng.gen::<f64>());
        let k = smallest_sv_constant(lambda, mu, field, ConstantConvention::Derivation)?;
        PhiParams::from_ln_ell(lambda, k.big_c, k.ln_ell)
    };

    let mut tilde_excess = f64::NEG_INFINITY;
    let mut concavity = f64::NEG_INFINITY;
    for _ in 0..draws {
        let p = draw(&mut rng)?;
        let m = maximize_phi(&p);
        tilde_excess = tilde_excess.max(approx_c_tilde(&p).c_tilde - m.c);

        let mut t: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        t.sort_by(f64::total_cmp);
        let [a, b, c] = t.map(|x| x.clamp(1e-12, 1.0 - 1e-9));
        if a < b && b < c {
            let theta = (c - b) / (c - a);
            let (fa, fb, fc) = (phi(a, &p)?, phi(b, &p)?, phi(c, &p)?);
            let chord = theta * fa + (1.0 - theta) * fc;
            let scale = fa.abs().max(fb.abs()).max(fc.abs()).max(f64::MIN_POSITIVE);
            concavity = concavity.max((chord - fb) / scale);
        }
    }

    let mut grid_gap = 0.0f64;
    for _ in 0..grid_draws {
        let p = draw(&mut rng)?;
        let m = maximize_phi(&p);
        let u0 = approx_c_tilde(&p).ln_t0;
        let (lo, hi) = (u0 - 2.0, (u0 + 2.0).min(-1e-12));
        if !(lo < m.ln_t_star && m.ln_t_star < hi) {
            grid_gap = f64::INFINITY;
            continue;
        }
        let pts = 100_000;
        let best = (0..pts)
            .filter_map(|i| ln_phi_at_log(lo + (hi - lo) * i as f64 / (pts - 1) as f64, &p))
            .fold(f64::NEG_INFINITY, f64::max);
        grid_gap = grid_gap.max((best - m.ln_c).abs());
    }

    Ok(vec![
        CheckResult::at_most(
            format!("consistency/{tag}c_tilde_minus_c"),
            tilde_excess,
            0.0,
        ),
        CheckResult::at_most(format!("consistency/{tag}concavity"), concavity, 1e-12),
        CheckResult::at_most(format!("consistency/{tag}grid_log_gap"), grid_gap, 1e-9),
    ])
}

/// Condition bound at one example point, computed from the ratios alone.
pub fn example_ratio(mode: SweepMode, ratio: f64, s: f64) -> Result<f64> {
    let spec = SweepSpec::new(mode, ratio, EXAMPLE_TAU0);
    let (lambda, p) = spec.ratios_at(s);
    let k = certificate_constants(
        lambda,
        p,
        EXAMPLE_TAU0,
        Field::Real,
        ConstantConvention::Derivation,
    )?;
    Ok(k.condition_bound())
}

pub fn examples() -> Result<Vec<CheckResult>> {
    EXAMPLE_VALUES
        .iter()
        .map(|&(mode, ratio, s, quoted)| {
            let name = match mode {
                SweepMode::FixedK => format!("examples/K={ratio}n,s={s}"),
                SweepMode::FixedN => format!("examples/N={ratio}n,s={s}"),
            };
            let r = example_ratio(mode, ratio, s)? / quoted;
            Ok(CheckResult::within(
                name,
                r,
                Some(EXAMPLE_FACTOR.0),
                Some(EXAMPLE_FACTOR.1),
            ))
        })
        .collect()
}

/// Largest decrease between consecutive valid points, and the largest excess
/// of the `upper_ratio` curve over the other at common `s`.
pub fn shapes() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (mode, low, high) in [
        (SweepMode::FixedK, 2.0, 5.0),
        (SweepMode::FixedN, 50.0, 200.0),
    ] {
        let a = sweep(&SweepSpec::new(mode, low, EXAMPLE_TAU0))?;
        let b = sweep(&SweepSpec::new(mode, high, EXAMPLE_TAU0))?;
        let label = match mode {
            SweepMode::FixedK => "K",
            SweepMode::FixedN => "N",
        };
        for (ratio, pts) in [(low, &a), (high, &b)] {
            let ok: Vec<_> = pts.iter().filter(|p| p.status == PointStatus::Ok).collect();
            let drop = |f: fn(&crate::curve::CurvePoint) -> Option<f64>| {
                ok.windows(2)
                    .map(|w| f(w[0]).unwrap() - f(w[1]).unwrap())
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            out.push(CheckResult::at_most(
                format!("shapes/{label}={ratio}n/log2_ratio_drop"),
                drop(|p| p.log2_ratio),
                0.0,
            ));
            out.push(CheckResult::at_most(
                format!("shapes/{label}={ratio}n/neg_log2_alpha_drop"),
                drop(|p| p.neg_log2_alpha),
                0.0,
            ));
        }
        let mut excess = f64::NEG_INFINITY;
        let mut common = 0usize;
        for (p, q) in a.iter().zip(&b) {
            if p.s != q.s {
                return Err(Error::Domain("sweeps do not share a grid".into()));
            }
            if let (Some(x), Some(y)) = (p.log2_ratio, q.log2_ratio) {
                excess = excess.max(y - x);
                common += 1;
            }
        }
        if common == 0 {
            return Err(Error::Domain("sweeps have no common valid point".into()));
        }
        out.push(CheckResult::at_most(
            format!("shapes/{label}={high}n_below_{label}={low}n"),
            excess,
            0.0,
        ));
    }
    Ok(out)
}

/// Mean extremal singular values against `√N ± √n` (times `√2` for complex).
pub fn extremes(
    n: u64,
    n_cols: u64,
    field: Field,
    trials: u64,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    check_positive(n, n_cols, trials)?;
    let samples = sample_extremes(
        n as usize,
        n_cols as usize,
        field,
        trials,
        &RngStream::new(seed, 2),
    )?;
    let scale = (field.real_dim() as f64).sqrt();
    let (rn, rc) = ((n as f64).sqrt(), (n_cols as f64).sqrt());
    let mean = |f: fn(&nerf_core::random::SingularExtremes) -> f64| {
        samples.iter().map(f).sum::<f64>() / samples.len() as f64
    };
    let tag = field_tag(field);
    Ok(vec![
        CheckResult::at_most(
            format!("extremes/{tag}sigma_max_mean_rel_err"),
            (mean(|e| e.sigma_max) / (scale * (rc + rn)) - 1.0).abs(),
            0.05,
        ),
        CheckResult::at_most(
            format!("extremes/{tag}sigma_min_mean_rel_err"),
            (mean(|e| e.sigma_min) / (scale * (rc - rn)) - 1.0).abs(),
            0.05,
        ),
    ])
}

/// Samples violating `c√n ≤ σ_n ≤ σ₁ ≤ C√n` at `μ = 1`.
pub fn theorem(
    n: u64,
    n_cols: u64,
    field: Field,
    trials: u64,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    check_positive(n, n_cols, trials)?;
    if n_cols <= n {
        return Err(Error::Domain(format!(
            "theorem check needs N > n, got n = {n}, N = {n_cols}"
        )));
    }
    let lambda = n_cols as f64 / n as f64;
    let k = smallest_sv_constant(lambda, 1.0, field, ConstantConvention::Derivation)?;
    let root_n = (n as f64).sqrt();
    let samples = sample_extremes(
        n as usize,
        n_cols as usize,
        field,
        trials,
        &RngStream::new(seed, 3),
    )?;
    let violations = samples
        .iter()
        .filter(|e| !(k.c * root_n <= e.sigma_min && e.sigma_max <= k.big_c * root_n))
        .count();
    let tag = field_tag(field);
    Ok(vec![CheckResult::at_most(
        format!("theorem/{tag}violations"),
        violations as f64,
        0.0,
    )])
}

/// Small-ball frequencies against the Gamma-tail bound, and a KS test that the
/// law of `‖A*v‖` does not depend on `v`.
pub fn gamma(n: u64, n_cols: u64, trials: u64, seed: u64) -> Result<Vec<CheckResult>> {
    check_positive(n, n_cols, trials)?;
    let lambda = n_cols as f64 / n as f64;
    let mut out = Vec::new();
    for (i, (label, delta)) in [
        ("lambda/4e", lambda / (4.0 * E)),
        ("lambda/2e", lambda / (2.0 * E)),
        ("lambda", lambda),
    ]
    .into_iter()
    .enumerate()
    {
        let bound = gamma_tail_bound(delta, n, n_cols, Field::Real)?.probability();
        let freq = empirical_gamma_tail(
            delta,
            n as usize,
            n_cols as usize,
            Field::Real,
            trials,
            &RngStream::new(seed, 10 + i as u64),
        );
        out.push(CheckResult::at_most(
            format!("gamma/delta={label}"),
            freq.frequency(),
            bound + 3.0 * freq.standard_error_at(bound),
        ));
    }
    let m = trials.min(10_000);
    let d = rotation_ks(n as usize, n_cols as usize, m, seed)?;
    out.push(CheckResult::at_most(
        "gamma/rotation_ks",
        d,
        ks_critical_1pct(m as usize, m as usize),
    ));
    Ok(out)
}

/// 1% critical value of the two-sample KS statistic.
pub fn ks_critical_1pct(m: usize, k: usize) -> f64 {
    let (m, k) = (m as f64, k as f64);
    1.628 * ((m + k) / (m * k)).sqrt()
}

pub fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn rotation_ks(n: usize, n_cols: usize, trials: u64, seed: u64) -> Result<f64> {
    let dir = gaussian_matrix(&RngStream::new(seed, 20), n, 1, Field::Real);
    let norm = dir.frobenius_norm();
    let v: Vec<f64> = dir.as_slice().iter().map(|x| x / norm).collect();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let along = |stream: u64, w: &[f64]| -> Vec<f64> {
        let base = RngStream::new(seed, stream);
        (0..trials)
            .map(|i| {
                let a = gaussian_matrix(&base.child(i), n, n_cols, Field::Real);
                (0..n_cols)
                    .map(|j| (0..n).map(|r| a.get(r, j).0 * w[r]).sum::<f64>().powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    };
    Ok(ks_statistic(along(21, &v), along(22, &e1)))
}

/// Exhaustive scans of small frames against the matching certificate.
pub fn erasure(frames: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let (n, cols, k, tau0) = (4u64, 12u64, 6u64, 2.0);
    let cert = certificate_constants(
        cols as f64 / n as f64,
        k as f64 / cols as f64,
        tau0,
        Field::Real,
        ConstantConvention::Derivation,
    )?;
    let bound = cert.condition_bound();
    let mut worst = 0.0f64;
    let mut violating = 0u64;
    for i in 0..frames {
        let f = frame_from_gaussian(
            &RngStream::new(seed, 100 + i),
            n as usize,
            cols as usize,
            Field::Real,
        )?;
        let r = worst_condition_exhaustive(&f, k as usize, u128::MAX)?;
        worst = worst.max(r.worst_condition);
        violating += u64::from(!(r.worst_condition <= bound));
    }
    Ok(vec![
        CheckResult::at_most("erasure/worst_condition", worst, bound),
        CheckResult::at_most("erasure/violating_frames", violating as f64, 0.0),
    ])
}

fn field_tag(field: Field) -> &'static str {
    match field {
        Field::Real => "",
        Field::Complex => "complex/",
    }
}

fn check_positive(n: u64, n_cols: u64, trials: u64) -> Result<()> {
    if n == 0 || n_cols < n || trials == 0 {
        return Err(Error::Domain(format!(
            "need 1 <= n <= N and trials >= 1, got n = {n}, N = {n_cols}, trials = {trials}"
        )));
    }
    Ok(())
}
