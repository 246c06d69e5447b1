use crate::error::{domain, Result};

/// Binary entropy `s_p = p ln(1/p) + (1-p) ln(1/(1-p))` in nats.
///
/// The `(1-p)` term vanishes at `p = 1` by continuity.
pub fn shannon_entropy_nat(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return domain(format!("entropy needs 0 < p <= 1, got {p}"));
    }
    let q = 1.0 - p;
    let tail = if q > 0.0 { -q * q.ln() } else { 0.0 };
    Ok(-p * p.ln() + tail)
}

/// Entropy upper bound on `ln C(N, K)`: `N · s_p` with `p = K/N`.
pub fn binomial_log_bound(n_cols: u64, k: u64) -> Result<f64> {
    if k > n_cols {
        return domain(format!(
            "binomial bound needs 0 <= K <= N, got K = {k}, N = {n_cols}"
        ));
    }
    if k == 0 || k == n_cols {
        return Ok(0.0);
    }
    let p = k as f64 / n_cols as f64;
    Ok(n_cols as f64 * shannon_entropy_nat(p)?)
}
