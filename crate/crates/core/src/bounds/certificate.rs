use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::{approx_c_tilde, maximize_phi, shannon_entropy_nat, PhiParams};
use crate::error::{domain, Error, Result};
use crate::field::{ConstantConvention, Field};

fn check_lambda_mu(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return domain(format!("need lambda > 1, got {lambda}"));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return domain(format!("need mu > 0, got {mu}"));
    }
    Ok(())
}

/// Upper constant C with `P(σ₁(A) > C√n) ≤ e^{-μn}`.
pub fn sigma_max_constant(
    lambda: f64,
    mu: f64,
    field: Field,
    convention: ConstantConvention,
) -> Result<f64> {
    check_lambda_mu(lambda, mu)?;
    Ok(match (field, convention) {
        (Field::Real, ConstantConvention::Derivation) => 1.0 + lambda.sqrt() + (2.0 * mu).sqrt(),
        (Field::Real, ConstantConvention::Theorem) => 1.0 + lambda.sqrt() + mu.sqrt(),
        (Field::Complex, _) => SQRT_2 + 2.0 * lambda.sqrt() + 2.0 * mu.sqrt(),
    })
}

fn ln_ell_unchecked(lambda: f64, mu: f64, field: Field) -> f64 {
    let head = 0.5 * (2.0 * std::f64::consts::E / lambda).ln();
    match field {
        Field::Real => head + mu / lambda,
        Field::Complex => head + mu / (2.0 * lambda),
    }
}

/// `ln L` with `L = √(2e/λ) e^{μ/λ}` (real) or `√(2e/λ) e^{μ/(2λ)}` (complex).
pub fn ln_ell_constant(lambda: f64, mu: f64, field: Field) -> Result<f64> {
    check_lambda_mu(lambda, mu)?;
    Ok(ln_ell_unchecked(lambda, mu, field))
}

/// `L`; may overflow to infinity for λ near one, prefer [`ln_ell_constant`].
pub fn ell_constant(lambda: f64, mu: f64, field: Field) -> Result<f64> {
    Ok(ln_ell_constant(lambda, mu, field)?.exp())
}

/// Constants `(c, C)` with `P(c√n ≤ σ_n(A) ≤ σ₁(A) ≤ C√n) ≥ 1 − 3e^{-μn}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallestSvConstants {
    pub c: f64,
    pub ln_c: f64,
    pub big_c: f64,
    pub ell: f64,
    pub ln_ell: f64,
    pub t_star: f64,
    pub vacuous: bool,
}

pub fn smallest_sv_constant(
    lambda: f64,
    mu: f64,
    field: Field,
    convention: ConstantConvention,
) -> Result<SmallestSvConstants> {
    let big_c = sigma_max_constant(lambda, mu, field, convention)?;
    let ln_ell = ln_ell_constant(lambda, mu, field)?;
    let m = maximize_phi(&PhiParams::from_ln_ell(lambda, big_c, ln_ell)?);
    Ok(SmallestSvConstants {
        c: m.c,
        ln_c: m.ln_c,
        big_c,
        ell: ln_ell.exp(),
        ln_ell,
        t_star: m.t_star,
        vacuous: m.is_vacuous(),
    })
}

/// A request for a `(K, α, β)`-NERF certificate of `F = A/√n`, `A` an `n × N`
/// Gaussian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NerfQuery {
    pub n: u64,
    #[serde(rename = "N")]
    pub n_cols: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub tau0: f64,
    pub field: Field,
    #[serde(default)]
    pub convention: ConstantConvention,
}

impl NerfQuery {
    pub fn new(n: u64, n_cols: u64, k: u64, tau0: f64, field: Field) -> Self {
        Self {
            n,
            n_cols,
            k,
            tau0,
            field,
            convention: ConstantConvention::default(),
        }
    }

    pub fn with_convention(mut self, convention: ConstantConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("need n >= 1");
        }
        if self.k <= self.n {
            return domain(format!(
                "need K > n (effective aspect ratio K/n > 1), got K = {}, n = {}",
                self.k, self.n
            ));
        }
        if self.k > self.n_cols {
            return domain(format!(
                "need K <= N, got K = {}, N = {}",
                self.k, self.n_cols
            ));
        }
        if !(self.tau0 > 0.0) || !self.tau0.is_finite() {
            return domain(format!("need tau0 > 0, got {}", self.tau0));
        }
        Ok(())
    }
}

/// Everything in a certificate that does not depend on n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateConstants {
    pub alpha: f64,
    pub beta: f64,
    /// N/n
    pub lambda: f64,
    /// K/n
    pub lambda_eff: f64,
    pub s_p: f64,
    pub mu: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    #[serde(rename = "L")]
    pub ell: f64,
    pub t_star: f64,
    pub c: f64,
    pub c_tilde: f64,
    pub constant_convention: ConstantConvention,
    pub field: Field,
}

impl CertificateConstants {
    /// β/α, an upper bound on every `R(F, N−K)`.
    pub fn condition_bound(&self) -> f64 {
        self.beta / self.alpha
    }
}

/// Certificate constants from the ratios `λ = N/n` and `p = K/N`.
///
/// `μ = λ s_p + τ0` pays for the union over all `C(N, K)` subsets; each
/// `n × K` submatrix then has aspect ratio `λ' = pλ`.
pub fn certificate_constants(
    lambda: f64,
    p: f64,
    tau0: f64,
    field: Field,
    convention: ConstantConvention,
) -> Result<CertificateConstants> {
    if !(tau0 > 0.0) || !tau0.is_finite() {
        return domain(format!("need tau0 > 0, got {tau0}"));
    }
    let lambda_eff = p * lambda;
    if !(lambda_eff > 1.0) {
        return domain(format!("need K/n > 1, got {lambda_eff}"));
    }
    let s_p = shannon_entropy_nat(p)?;
    let mu = lambda * s_p + tau0;
    let k = smallest_sv_constant(lambda_eff, mu, field, convention)?;
    if k.vacuous {
        return Err(Error::Vacuous {
            c: k.c,
            lambda_eff,
            mu,
        });
    }
    let tilde = approx_c_tilde(&PhiParams::from_ln_ell(lambda_eff, k.big_c, k.ln_ell)?);
    Ok(CertificateConstants {
        alpha: k.c,
        beta: k.big_c,
        lambda,
        lambda_eff,
        s_p,
        mu,
        big_c: k.big_c,
        ell: k.ell,
        t_star: k.t_star,
        c: k.c,
        c_tilde: tilde.c_tilde,
        constant_convention: convention,
        field,
    })
}

/// A `(K, α, β)`-NERF certificate holding with probability at least
/// `1 − exp(log_failure_prob)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NerfCertificate {
    #[serde(flatten)]
    pub constants: CertificateConstants,
    /// `ln 3 − τ0 n`
    pub log_failure_prob: f64,
}

impl NerfCertificate {
    pub fn alpha(&self) -> f64 {
        self.constants.alpha
    }

    pub fn beta(&self) -> f64 {
        self.constants.beta
    }

    pub fn condition_bound(&self) -> f64 {
        self.constants.condition_bound()
    }

    pub fn failure_probability(&self) -> f64 {
        self.log_failure_prob.min(0.0).exp()
    }
}

pub fn nerf_certificate(query: &NerfQuery) -> Result<NerfCertificate> {
    query.validate()?;
    let lambda = query.n_cols as f64 / query.n as f64;
    let p = query.k as f64 / query.n_cols as f64;
    let constants = certificate_constants(lambda, p, query.tau0, query.field, query.convention)?;
    Ok(NerfCertificate {
        constants,
        log_failure_prob: 3f64.ln() - query.tau0 * query.n as f64,
    })
}
