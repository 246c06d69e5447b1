//! Certificate sweeps over the erasure proportion `s = 1 − K/N`.
//!
//! Only the ratios `λ = N/n` and `p = K/N` enter the certificate, so grid
//! points are real-valued and need not correspond to integer `N` or `K`.

use std::fmt::Write as _;

use nerf_core::bounds::certificate_constants;
use nerf_core::{ConstantConvention, Error, Field, Result};
use serde::Serialize;

use crate::json::fmt_f64;

pub const DEFAULT_POINTS: usize = 200;
pub const DEFAULT_S_MAX: f64 = 0.99;

pub const CSV_HEADER: &str = "s,alpha,beta,log2_ratio,neg_log2_alpha,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// `K = ratio·n` fixed while `N` grows log-uniformly from `K` to `K/(1 − s_max)`.
    FixedK,
    /// `N = ratio·n` fixed while `K` falls linearly from `N` to `(1 − s_max)N`.
    FixedN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub ratio: f64,
    pub points: usize,
    pub s_max: f64,
    pub tau0: f64,
    pub field: Field,
    pub convention: ConstantConvention,
}

impl SweepSpec {
    pub fn new(mode: SweepMode, ratio: f64, tau0: f64) -> Self {
        Self {
            mode,
            ratio,
            points: DEFAULT_POINTS,
            s_max: DEFAULT_S_MAX,
            tau0,
            field: Field::Real,
            convention: ConstantConvention::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 1.0) || !self.ratio.is_finite() {
            return Err(Error::Domain(format!("need ratio > 1, got {}", self.ratio)));
        }
        if self.points < 2 {
            return Err(Error::Domain(format!(
                "need points >= 2, got {}",
                self.points
            )));
        }
        if !(self.s_max > 0.0 && self.s_max < 1.0) {
            return Err(Error::Domain(format!(
                "need s_max in (0, 1), got {}",
                self.s_max
            )));
        }
        if !(self.tau0 > 0.0) || !self.tau0.is_finite() {
            return Err(Error::Domain(format!("need tau0 > 0, got {}", self.tau0)));
        }
        Ok(())
    }

    /// Erasure proportions, strictly increasing from 0 to `s_max`.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                match self.mode {
                    SweepMode::FixedK => -(t * (1.0 - self.s_max).ln()).exp_m1(),
                    SweepMode::FixedN => t * self.s_max,
                }
            })
            .collect()
    }

    /// `(λ, p)` at erasure proportion `s`.
    pub fn ratios_at(&self, s: f64) -> (f64, f64) {
        let p = 1.0 - s;
        match self.mode {
            SweepMode::FixedK => (self.ratio / p, p),
            SweepMode::FixedN => (self.ratio, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Ok,
    /// The optimized `c` is not positive.
    Vacuous,
    /// `K ≤ n` at this grid point.
    Invalid,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Vacuous => "vacuous",
            Self::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub s: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub log2_ratio: Option<f64>,
    pub neg_log2_alpha: Option<f64>,
    pub status: PointStatus,
}

impl CurvePoint {
    fn empty(s: f64, status: PointStatus) -> Self {
        Self {
            s,
            alpha: None,
            beta: None,
            log2_ratio: None,
            neg_log2_alpha: None,
            status,
        }
    }
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    spec.grid()
        .into_iter()
        .map(|s| {
            let (lambda, p) = spec.ratios_at(s);
            if !(lambda * p > 1.0) {
                return Ok(CurvePoint::empty(s, PointStatus::Invalid));
            }
            match certificate_constants(lambda, p, spec.tau0, spec.field, spec.convention) {
                Ok(k) => Ok(CurvePoint {
                    s,
                    alpha: Some(k.alpha),
                    beta: Some(k.beta),
                    log2_ratio: Some((k.beta / k.alpha).log2()),
                    neg_log2_alpha: Some(-k.alpha.log2()),
                    status: PointStatus::Ok,
                }),
                Err(Error::Vacuous { .. }) => Ok(CurvePoint::empty(s, PointStatus::Vacuous)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let cell = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let mut out = String::with_capacity(points.len() * 120);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(p.s),
            cell(p.alpha),
            cell(p.beta),
            cell(p.log2_ratio),
            cell(p.neg_log2_alpha),
            p.status.as_str()
        )
        .expect("writing to a String");
    }
    out
}
