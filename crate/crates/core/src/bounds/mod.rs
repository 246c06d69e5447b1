//! Closed-form tail bounds and the constants behind NERF certificates.
//!
//! Every probability is carried as a natural logarithm so that powers such as
//! `(2eδ/λ)^{N/2}` or `L^λ` never overflow. A log bound may exceed zero (the
//! bound is then uninformative); [`TailBound::probability`] clamps at
//! presentation time.

mod certificate;
mod entropy;
mod phi;
mod tails;

use std::collections::BTreeMap;

use serde::Serialize;

pub use certificate::{
    certificate_constants, ell_constant, ln_ell_constant, nerf_certificate, sigma_max_constant,
    smallest_sv_constant, CertificateConstants, NerfCertificate, NerfQuery, SmallestSvConstants,
};
pub use entropy::{binomial_log_bound, shannon_entropy_nat};
pub use phi::{
    approx_c_tilde, ln_phi_at_log, maximize_phi, phi, phi_at_log, CTilde, PhiMax, PhiParams,
};
pub use tails::{
    classical_sigma_min_tail, gamma_tail_bound, net_cardinality_bound, sigma_max_tail,
    union_tail_bound, union_tail_bound_single_event,
};

/// A named analytic bound evaluated at concrete parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBound {
    pub name: &'static str,
    /// Natural log of the probability upper bound. Not clamped.
    pub log_prob_bound: f64,
    /// Deviation threshold of the event, for bounds phrased as `P(X > threshold)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Set when the event is empty (e.g. a negative lower threshold for σ_min).
    pub vacuous_threshold: bool,
    pub params: BTreeMap<&'static str, f64>,
}

impl TailBound {
    fn new(name: &'static str, log_prob_bound: f64) -> Self {
        Self {
            name,
            log_prob_bound,
            threshold: None,
            vacuous_threshold: false,
            params: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &'static str, value: f64) -> Self {
        self.params.insert(key, value);
        self
    }

    /// The bound as a probability, `exp(min(log_prob_bound, 0))`.
    pub fn probability(&self) -> f64 {
        self.log_prob_bound.min(0.0).exp()
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}
