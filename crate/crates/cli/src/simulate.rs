//! Seeded frame campaigns checked against a certificate or a user window.

use nerf_core::bounds::{nerf_certificate, NerfCertificate, NerfQuery};
use nerf_core::erasure::{frame_from_gaussian, nerf_check, CheckMode, ErasureMode, ErasureReport};
use nerf_core::random::RngStream;
use nerf_core::{ConstantConvention, Error, Field, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulateSpec {
    pub n: u64,
    #[serde(rename = "N")]
    pub n_cols: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub tau0: f64,
    pub field: Field,
    pub convention: ConstantConvention,
    pub mode: ErasureMode,
    pub frames: u64,
    /// Subsets drawn per frame in sampled mode.
    pub trials: u64,
    pub seed: u64,
    /// User-supplied `(α, β)`; the certificate is used when absent.
    #[serde(skip)]
    pub window: Option<(f64, f64)>,
    #[serde(skip)]
    pub cap: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowSource {
    Certificate,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameResult {
    pub frame: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub violated: bool,
    pub report: ErasureReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub frames: u64,
    pub violating_frames: u64,
    pub pass_fraction: f64,
    pub worst_condition: f64,
    pub worst_frame: u64,
    pub min_sigma_min: f64,
    pub max_sigma_max: f64,
    pub subsets_per_frame: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateOutput {
    pub query: SimulateSpec,
    pub alpha: f64,
    pub beta: f64,
    pub condition_bound: f64,
    pub window_source: WindowSource,
    pub certificate: Option<NerfCertificate>,
    pub per_frame: Vec<FrameResult>,
    pub aggregate: Aggregate,
}

impl SimulateSpec {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k < self.n || self.k > self.n_cols {
            return Err(Error::Domain(format!(
                "need 1 <= n <= K <= N, got n = {}, K = {}, N = {}",
                self.n, self.k, self.n_cols
            )));
        }
        if self.frames == 0 {
            return Err(Error::Domain("need frames >= 1".into()));
        }
        if self.mode == ErasureMode::Sampled && self.trials == 0 {
            return Err(Error::Domain("need trials >= 1 in sampled mode".into()));
        }
        Ok(())
    }

    fn check_mode(&self) -> CheckMode {
        match self.mode {
            ErasureMode::Exhaustive => CheckMode::Exhaustive { cap: self.cap },
            ErasureMode::Sampled => CheckMode::Sampled {
                trials: self.trials,
            },
        }
    }
}

/// Frame `i` is drawn from stream `(seed, i)`; its sampled subsets come from
/// that stream's first child.
pub fn simulate(spec: &SimulateSpec) -> Result<SimulateOutput> {
    spec.validate()?;
    let (alpha, beta, source, certificate) = match spec.window {
        Some((a, b)) => (a, b, WindowSource::User, None),
        None => {
            let q = NerfQuery::new(spec.n, spec.n_cols, spec.k, spec.tau0, spec.field)
                .with_convention(spec.convention);
            let cert = nerf_certificate(&q)?;
            (
                cert.alpha(),
                cert.beta(),
                WindowSource::Certificate,
                Some(cert),
            )
        }
    };
    let (n, cols, k) = (spec.n as usize, spec.n_cols as usize, spec.k as usize);
    let mut per_frame = Vec::with_capacity(spec.frames as usize);
    for i in 0..spec.frames {
        let stream = RngStream::new(spec.seed, i);
        let frame = frame_from_gaussian(&stream, n, cols, spec.field)?;
        let report = nerf_check(&frame, k, alpha, beta, spec.check_mode(), &stream.child(0))?;
        per_frame.push(FrameResult {
            frame: i,
            seed: stream.seed,
            stream_id: stream.stream_id,
            violated: !report.passed(),
            report,
        });
    }
    let aggregate = aggregate(&per_frame);
    Ok(SimulateOutput {
        query: *spec,
        alpha,
        beta,
        condition_bound: beta / alpha,
        window_source: source,
        certificate,
        per_frame,
        aggregate,
    })
}

fn aggregate(frames: &[FrameResult]) -> Aggregate {
    let violating = frames.iter().filter(|f| f.violated).count() as u64;
    let (worst_frame, worst_condition) = frames
        .iter()
        .map(|f| (f.frame, f.report.worst_condition))
        .fold((0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    Aggregate {
        frames: frames.len() as u64,
        violating_frames: violating,
        pass_fraction: 1.0 - violating as f64 / frames.len() as f64,
        worst_condition,
        worst_frame,
        min_sigma_min: frames
            .iter()
            .map(|f| f.report.min_sigma_min)
            .fold(f64::INFINITY, f64::min),
        max_sigma_max: frames
            .iter()
            .map(|f| f.report.max_sigma_max)
            .fold(f64::NEG_INFINITY, f64::max),
        subsets_per_frame: frames[0].report.total,
    }
}
