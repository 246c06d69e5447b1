use super::ErasurePattern;
use crate::error::{Error, Result};

/// Default bound on the number of subsets an exhaustive scan may visit.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n−i) / (i+1) stays integral at every step
        let Some(num) = acc.checked_mul(n - i) else {
            return u128::MAX;
        };
        acc = num / (i + 1);
    }
    acc
}

/// The K-subset of rank `rank` in lexicographic order.
pub fn subset_at_rank(n_cols: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    for i in 0..k {
        loop {
            let with_x = binomial((n_cols - x - 1) as u64, (k - i - 1) as u64);
            if rank < with_x {
                out.push(x);
                x += 1;
                break;
            }
            rank -= with_x;
            x += 1;
        }
    }
    out
}

/// Advances `c` to the next K-subset of `0..n_cols` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n_cols: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n_cols - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

pub(crate) fn check_enumerable(n_cols: usize, k: usize, cap: u128) -> Result<u128> {
    if k == 0 || k > n_cols {
        return Err(Error::Domain(format!(
            "need 0 < K <= N, got K = {k}, N = {n_cols}"
        )));
    }
    let count = binomial(n_cols as u64, k as u64);
    if count > cap {
        return Err(Error::EnumerationCap {
            n_cols,
            k,
            count,
            cap,
        });
    }
    Ok(count)
}

/// Streaming iterator over all K-subsets in lexicographic order.
#[derive(Debug, Clone)]
pub struct LexSubsets {
    n_cols: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for LexSubsets {
    type Item = ErasurePattern;

    fn next(&mut self) -> Option<ErasurePattern> {
        let c = self.current.as_mut()?;
        let out = ErasurePattern::from_sorted(c.clone());
        if !next_combination(c, self.n_cols) {
            self.current = None;
        }
        Some(out)
    }
}

/// Every K-subset of `0..n_cols` exactly once, lexicographically. Refuses if
/// there are more than `cap` of them.
pub fn subsets_lex(n_cols: usize, k: usize, cap: u128) -> Result<LexSubsets> {
    check_enumerable(n_cols, k, cap)?;
    Ok(LexSubsets {
        n_cols,
        current: Some((0..k).collect()),
    })
}
