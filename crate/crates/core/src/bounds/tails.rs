use std::f64::consts::{LN_2, SQRT_2};

use super::{log_add_exp, TailBound};
use crate::error::{domain, Result};
use crate::field::Field;

fn check_shape(n: u64, n_cols: u64) -> Result<()> {
    if n == 0 || n_cols < n {
        return domain(format!("need N >= n >= 1, got n = {n}, N = {n_cols}"));
    }
    Ok(())
}

/// Upper tail of the largest singular value: `P(σ₁ > √N + √n + t) ≤ exp(-t²/2)`.
///
/// For complex matrices σ₁(A) ≤ √2 σ₁(B) with B the real `n × 2N` matrix
/// `[Re A, Im A]`, so the threshold becomes `√2 (√(2N) + √n + t)`.
pub fn sigma_max_tail(n: u64, n_cols: u64, t: f64, field: Field) -> Result<TailBound> {
    check_shape(n, n_cols)?;
    if !(t >= 0.0) {
        return domain(format!("sigma_max_tail needs t >= 0, got {t}"));
    }
    let (rn, rcols) = (n as f64, n_cols as f64);
    let threshold = match field {
        Field::Real => rcols.sqrt() + rn.sqrt() + t,
        Field::Complex => SQRT_2 * ((2.0 * rcols).sqrt() + rn.sqrt() + t),
    };
    let mut b = TailBound::new("sigma_max_tail", -0.5 * t * t)
        .with("n", rn)
        .with("N", rcols)
        .with("t", t);
    b.threshold = Some(threshold);
    Ok(b)
}

/// Classical lower tail `P(σ_n < √N - √n - t) ≤ exp(-t²/2)`, real field only.
///
/// When the threshold is not positive the event is empty; the bound is still
/// reported but flagged via `vacuous_threshold`.
pub fn classical_sigma_min_tail(n: u64, n_cols: u64, t: f64) -> Result<TailBound> {
    if n == 0 || n_cols <= n {
        return domain(format!(
            "classical tail needs N > n >= 1, got n = {n}, N = {n_cols}"
        ));
    }
    if !(t >= 0.0) {
        return domain(format!("classical tail needs t >= 0, got {t}"));
    }
    let (rn, rcols) = (n as f64, n_cols as f64);
    let threshold = rcols.sqrt() - rn.sqrt() - t;
    let mut b = TailBound::new("classical_sigma_min_tail", -0.5 * t * t)
        .with("n", rn)
        .with("N", rcols)
        .with("t", t);
    b.threshold = Some(threshold);
    b.vacuous_threshold = threshold <= 0.0;
    Ok(b)
}

/// `P(‖A*v‖ ≤ √(δn)) ≤ (2eδ/λ)^{N/2}` for real entries, exponent `N` for complex.
pub fn gamma_tail_bound(delta: f64, n: u64, n_cols: u64, field: Field) -> Result<TailBound> {
    check_shape(n, n_cols)?;
    if !(delta > 0.0) {
        return domain(format!("gamma tail needs delta > 0, got {delta}"));
    }
    let lambda = n_cols as f64 / n as f64;
    // ln(2eδ/λ), written so that δ = λ/(2e) gives exactly zero
    let log_base = delta.ln() - (lambda / (2.0 * std::f64::consts::E)).ln();
    let exponent = match field {
        Field::Real => 0.5 * n_cols as f64,
        Field::Complex => n_cols as f64,
    };
    Ok(TailBound::new("gamma_tail_bound", exponent * log_base)
        .with("delta", delta)
        .with("n", n as f64)
        .with("N", n_cols as f64)
        .with("lambda", lambda))
}

/// Log-cardinality of an ε-net of the unit sphere: `n ln(1 + 2/ε)`; the
/// complex sphere is the real sphere of dimension `2n`.
pub fn net_cardinality_bound(epsilon: f64, n: u64, field: Field) -> Result<f64> {
    if !(epsilon > 0.0) {
        return domain(format!("net size needs epsilon > 0, got {epsilon}"));
    }
    let dim = (field.real_dim() as u64 * n) as f64;
    Ok(dim * (2.0 / epsilon).ln_1p())
}

struct UnionTerms {
    net: f64,
    small_ball: f64,
    sigma_max: f64,
}

fn union_terms(
    c: f64,
    big_c: f64,
    epsilon: f64,
    n: u64,
    lambda: f64,
    field: Field,
) -> Result<UnionTerms> {
    if !(c >= 0.0) || !(epsilon > 0.0) || !(lambda > 1.0) || n == 0 {
        return domain(format!(
            "union bound needs c >= 0, epsilon > 0, lambda > 1, n >= 1; got c = {c}, \
             epsilon = {epsilon}, lambda = {lambda}, n = {n}"
        ));
    }
    let min_c = match field {
        Field::Real => 1.0 + lambda.sqrt(),
        Field::Complex => SQRT_2 + 2.0 * lambda.sqrt(),
    };
    if !(big_c >= min_c) {
        return domain(format!("union bound needs C >= {min_c}, got {big_c}"));
    }
    let rn = n as f64;
    let net = net_cardinality_bound(epsilon, n, field)?;
    // ln(2e(c+εC)²/λ)
    let log_base = LN_2 + 1.0 + 2.0 * (c + epsilon * big_c).ln() - lambda.ln();
    let (small_ball, sigma_max) = match field {
        Field::Real => {
            let gap = big_c - 1.0 - lambda.sqrt();
            (0.5 * lambda * rn * log_base, -0.5 * gap * gap * rn)
        }
        Field::Complex => {
            let gap = big_c / SQRT_2 - (2.0 * lambda).sqrt() - 1.0;
            (lambda * rn * log_base, -0.5 * gap * gap * rn)
        }
    };
    Ok(UnionTerms {
        net,
        small_ball,
        sigma_max,
    })
}

/// ε-net union bound on `P(σ_n(A) ≤ c√n)`, with the net cardinality
/// multiplying both the small-ball term and the σ₁ tail:
///
/// `(1+2/ε)^n ((2e(c+εC)²/λ)^{N/2} + exp(-(C-1-√λ)² n/2))`.
pub fn union_tail_bound(
    c: f64,
    big_c: f64,
    epsilon: f64,
    n: u64,
    lambda: f64,
    field: Field,
) -> Result<TailBound> {
    let t = union_terms(c, big_c, epsilon, n, lambda, field)?;
    let first = t.net + t.small_ball;
    let second = t.net + t.sigma_max;
    Ok(
        TailBound::new("union_tail_bound", log_add_exp(first, second))
            .with("c", c)
            .with("C", big_c)
            .with("epsilon", epsilon)
            .with("n", n as f64)
            .with("lambda", lambda)
            .with("log_net", t.net)
            .with("log_small_ball", t.small_ball)
            .with("log_sigma_max_tail", t.sigma_max),
    )
}

/// Same union bound with the σ₁ event counted once instead of once per net point:
///
/// `(1+2/ε)^n (2e(c+εC)²/λ)^{N/2} + exp(-(C-1-√λ)² n/2)`.
///
/// This is the form the constants `c`, `C` are tuned for: each summand is at
/// most `exp(-μn)` at the optimum.
pub fn union_tail_bound_single_event(
    c: f64,
    big_c: f64,
    epsilon: f64,
    n: u64,
    lambda: f64,
    field: Field,
) -> Result<TailBound> {
    let t = union_terms(c, big_c, epsilon, n, lambda, field)?;
    Ok(TailBound::new(
        "union_tail_bound_single_event",
        log_add_exp(t.net + t.small_ball, t.sigma_max),
    )
    .with("c", c)
    .with("C", big_c)
    .with("epsilon", epsilon)
    .with("n", n as f64)
    .with("lambda", lambda)
    .with("log_net", t.net)
    .with("log_small_ball", t.small_ball)
    .with("log_sigma_max_tail", t.sigma_max))
}
