//! The variational objective `φ(t) = t^{1/λ}/L − 2Ct/(1−t)` whose supremum over
//! `0 < t < 1` is the lower singular-value constant `c`.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{domain, Result};

/// Parameters of φ. `L` is stored as its logarithm; for λ near one and large
/// μ it overflows a double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiParams {
    lambda: f64,
    big_c: f64,
    ln_ell: f64,
}

impl PhiParams {
    pub fn new(lambda: f64, big_c: f64, ell: f64) -> Result<Self> {
        if !(ell > 0.0) {
            return domain(format!("phi needs L > 0, got {ell}"));
        }
        Self::from_ln_ell(lambda, big_c, ell.ln())
    }

    pub fn from_ln_ell(lambda: f64, big_c: f64, ln_ell: f64) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return domain(format!("phi needs lambda > 1, got {lambda}"));
        }
        if !(big_c > 0.0) || !big_c.is_finite() {
            return domain(format!("phi needs C > 0, got {big_c}"));
        }
        if !ln_ell.is_finite() {
            return domain(format!("phi needs finite ln L, got {ln_ell}"));
        }
        Ok(Self {
            lambda,
            big_c,
            ln_ell,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn big_c(&self) -> f64 {
        self.big_c
    }

    pub fn ell(&self) -> f64 {
        self.ln_ell.exp()
    }

    pub fn ln_ell(&self) -> f64 {
        self.ln_ell
    }

    /// `ln t0` for the maximizer of the small-t approximation `t^{1/λ}/L − 2Ct`.
    fn ln_t0(&self) -> f64 {
        let l = self.lambda;
        -(l / (l - 1.0)) * (LN_2 + self.big_c.ln() + l.ln() + self.ln_ell)
    }

    /// `φ(e^u) · e^{-shift}`; keeps both terms representable when `e^u` underflows.
    fn scaled(&self, u: f64, shift: f64) -> f64 {
        let head = (u / self.lambda - self.ln_ell - shift).exp();
        let tail = 2.0 * self.big_c * (u - shift).exp() / -u.exp_m1();
        head - tail
    }
}

/// φ(t) for `0 < t < 1`.
pub fn phi(t: f64, params: &PhiParams) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("phi needs 0 < t < 1, got {t}"));
    }
    Ok(phi_at_log(t.ln(), params))
}

/// φ(e^u) for `u < 0`.
pub fn phi_at_log(u: f64, params: &PhiParams) -> f64 {
    params.scaled(u, 0.0)
}

/// `ln φ(e^u)`, or `None` where φ is not positive.
pub fn ln_phi_at_log(u: f64, params: &PhiParams) -> Option<f64> {
    let shift = u / params.lambda - params.ln_ell;
    let v = params.scaled(u, shift);
    (v > 0.0).then(|| shift + v.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiMax {
    pub t_star: f64,
    pub ln_t_star: f64,
    /// sup φ; may be zero or negative, in which case the bound is vacuous.
    pub c: f64,
    /// `ln c`, finite even when `c` underflows; `-inf` when `c ≤ 0`.
    pub ln_c: f64,
}

impl PhiMax {
    pub fn is_vacuous(&self) -> bool {
        !(self.c > 0.0)
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes φ over `(0, 1)` by golden-section search in `u = ln t`.
///
/// φ is concave in t, hence unimodal in u. The search starts from the bracket
/// `[ln t0 − 20, min(ln t0 + 20, 0))` and slides it downwards if the maximum
/// sits on the lower edge. Iteration stops once the bracket is narrower than
/// `1e-12 · max(1, |u|)`.
pub fn maximize_phi(params: &PhiParams) -> PhiMax {
    let u0 = params.ln_t0();
    // ψ = φ · e^{-shift} is O(1) near the optimum
    let shift = u0 / params.lambda - params.ln_ell;
    let f = |u: f64| params.scaled(u, shift);

    let mut lo = u0 - 20.0;
    let hi = (u0 + 20.0).min(0.0);
    let (mut u_best, mut f_best) = golden_max(&f, lo, hi);
    for _ in 0..64 {
        if u_best - lo > 1e-9 * lo.abs().max(1.0) {
            break;
        }
        lo -= 40.0;
        (u_best, f_best) = golden_max(&f, lo, lo + 40.0);
    }

    let c = shift.exp() * f_best;
    // t0 is feasible, so sup φ ≥ φ(t0) must also hold after rounding
    let c0 = phi_at_log(u0, params);
    if c0 >= c && u0 < 0.0 {
        return PhiMax {
            t_star: u0.exp(),
            ln_t_star: u0,
            c: c0,
            ln_c: ln_phi_at_log(u0, params).unwrap_or(f64::NEG_INFINITY),
        };
    }
    let ln_c = if f_best > 0.0 {
        shift + f_best.ln()
    } else {
        f64::NEG_INFINITY
    };
    PhiMax {
        t_star: u_best.exp(),
        ln_t_star: u_best,
        c,
        ln_c,
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if b - a <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CTilde {
    /// `(2CλL)^{-λ/(λ-1)}`
    pub t0: f64,
    pub ln_t0: f64,
    /// φ(t0), a lower bound on sup φ.
    pub c_tilde: f64,
    /// `(1 − 1/λ)(2CλL^λ)^{-1/(λ-1)}`, the value of `t^{1/λ}/L − 2Ct` at t0.
    /// Exceeds φ(t0) by the relative amount `t0 / ((λ−1)(1−t0))`.
    pub closed_form: f64,
}

/// Closed-form approximation of the maximizer, dropping the `1/(1−t)` factor.
pub fn approx_c_tilde(params: &PhiParams) -> CTilde {
    let l = params.lambda;
    let ln_t0 = params.ln_t0();
    let ln_closed =
        (1.0 - 1.0 / l).ln() - (LN_2 + params.big_c.ln() + l.ln() + l * params.ln_ell) / (l - 1.0);
    CTilde {
        t0: ln_t0.exp(),
        ln_t0,
        c_tilde: phi_at_log(ln_t0, params),
        closed_form: ln_closed.exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, big_c: f64, ell: f64) -> PhiParams {
        PhiParams::new(lambda, big_c, ell).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(PhiParams::new(1.0, 1.0, 1.0).is_err());
        assert!(PhiParams::new(2.0, 0.0, 1.0).is_err());
        assert!(PhiParams::new(2.0, 1.0, -1.0).is_err());
        let p = params(2.0, 1.0, 1.0);
        assert!(phi(0.0, &p).is_err());
        assert!(phi(1.0, &p).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = params(2.0, 1.0, 1.0);
        assert!((phi(0.25, &p).unwrap() + 1.0 / 6.0).abs() < 1e-15);
        assert!(phi(1e-300, &p).unwrap() > 0.0);
        // mpmath, 50 digits, at the rounded parameters
        let p = params(2.0, 4.872908, 7.47310);
        let v = phi(4.713e-5, &p).unwrap();
        assert!((v - 4.593_034_884_954_655e-4).abs() < 1e-15);
    }

    #[test]
    fn maximize_matches_extended_precision() {
        // K = 2n, 50 % erasures: mpmath root of φ' = 0
        let p =
            PhiParams::from_ln_ell(2.0, 4.872_907_818_371_502_5, 2.011_294_361_119_890_6).unwrap();
        let m = maximize_phi(&p);
        assert!((m.c - 4.593_177_887_722_769_6e-4).abs() < 1e-10 * 4.6e-4);
        assert!((m.t_star - 4.712_308_097_768_575e-5).abs() < 1e-6 * 4.7e-5);
        assert!((m.ln_c - m.c.ln()).abs() < 1e-12);

        let p = PhiParams::new(5.0, 7.025_915_416_539_903, 4.384_821_838_257_191).unwrap();
        let m = maximize_phi(&p);
        assert!((m.c - 0.043_540_186_590_762_64).abs() < 1e-10 * 0.0435);
        // spec example at its rounded inputs
        let m = maximize_phi(&params(5.0, 7.02592, 4.38530));
        assert!((m.c - 0.04354).abs() < 5e-5);
    }

    #[test]
    fn c_tilde_examples() {
        let q = approx_c_tilde(&params(2.0, 0.5, 1.0));
        assert!((q.t0 - 0.25).abs() < 1e-15);
        assert!((q.closed_form - 0.25).abs() < 1e-15);
        let p =
            PhiParams::from_ln_ell(2.0, 4.872_907_818_371_502_5, 2.011_294_361_119_890_6).unwrap();
        let q = approx_c_tilde(&p);
        assert!((q.t0 - 4.713_196_436_323_565e-5).abs() < 1e-12 * 4.7e-5);
        assert!((q.closed_form - 4.593_394_352_816_360_6e-4).abs() < 1e-12 * 4.6e-4);
        assert!((q.c_tilde - 4.593_177_846_913_068_7e-4).abs() < 1e-12 * 4.6e-4);
        assert!(q.c_tilde <= maximize_phi(&p).c);
    }

    #[test]
    fn c_tilde_relative_gap_is_exact() {
        for (l, c, ell) in [
            (1.2, 3.0, 2.0),
            (2.0, 0.5, 1.0),
            (7.0, 9.0, 0.4),
            (50.0, 20.0, 0.3),
        ] {
            let q = approx_c_tilde(&params(l, c, ell));
            let rel = (q.closed_form - q.c_tilde) / q.closed_form;
            let expected = q.t0 / ((l - 1.0) * (1.0 - q.t0));
            assert!(
                (rel - expected).abs() <= 1e-6 * expected + 1e-14,
                "{l}: {rel} vs {expected}"
            );
        }
    }

    #[test]
    fn ln_phi_tracks_phi() {
        let p = params(3.0, 2.0, 1.5);
        for u in [-30.0, -10.0, -5.0] {
            let v = phi_at_log(u, &p);
            assert!((ln_phi_at_log(u, &p).unwrap() - v.ln()).abs() < 1e-12);
        }
        assert!(ln_phi_at_log(-1e-3, &p).is_none());
    }

    #[test]
    fn maximizer_survives_underflow() {
        // λ close to one drives t* far below the smallest double
        let p = PhiParams::from_ln_ell(1.01, 120.0, 500.0).unwrap();
        let m = maximize_phi(&p);
        assert!(m.ln_t_star < -745.0);
        assert!(m.ln_c.is_finite());
        for du in [-1e-3, 1e-3] {
            assert!(ln_phi_at_log(m.ln_t_star + du, &p).unwrap() <= m.ln_c + 1e-12);
        }
    }

    #[test]
    fn underflowed_supremum_is_vacuous() {
        // sup φ > 0 in exact arithmetic, but here it is below the smallest double
        let p = PhiParams::from_ln_ell(1.01, 120.0, 500.0).unwrap();
        let m = maximize_phi(&p);
        assert_eq!(m.c, 0.0);
        assert!(m.is_vacuous());
        assert!(m.ln_c < -745.0 && m.ln_c.is_finite());
    }
}
