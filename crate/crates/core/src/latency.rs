//! Network latency, handover delay and spectrum-manager service time.

use rand_distr::{Distribution, Gamma, Normal};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::model::{nonneg, probability};
use crate::rng::SeedStream;
use crate::{Error, Result};

/// Linear-plus-Gaussian latency: a·x + b + N(0, σ²), x in miles.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NetworkParams {
    /// ms per mile.
    pub a: f64,
    /// Intercept, ms.
    pub b: f64,
    /// Noise variance, ms².
    pub sigma2: f64,
    /// When set, the mean latency regardless of distance (ms).
    #[cfg_attr(feature = "serde", serde(default))]
    pub fixed_rtt_override: Option<f64>,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            a: 0.022,
            b: 4.862,
            sigma2: 0.907,
            fixed_rtt_override: None,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() {
            return Err(Error::invalid("a", "must be finite"));
        }
        nonneg("b", self.b)?;
        nonneg("sigma2", self.sigma2)?;
        if let Some(rtt) = self.fixed_rtt_override {
            nonneg("fixed_rtt_override", rtt)?;
        }
        Ok(())
    }

    /// The same model scaled to one leg of a round trip: half the mean, half the variance.
    pub fn one_way(&self) -> NetworkParams {
        NetworkParams {
            a: self.a / 2.0,
            b: self.b / 2.0,
            sigma2: self.sigma2 / 2.0,
            fixed_rtt_override: self.fixed_rtt_override.map(|v| v / 2.0),
        }
    }

    pub fn std_dev(&self) -> f64 {
        crate::math::sqrt(self.sigma2)
    }
}

pub fn network_latency_mean(x: f64, net: &NetworkParams) -> Result<f64> {
    nonneg("x", x)?;
    Ok(match net.fixed_rtt_override {
        Some(rtt) => rtt,
        None => net.a * x + net.b,
    })
}

/// One latency draw, clamped below at zero.
pub fn sample_network_latency(x: f64, net: &NetworkParams, rng: &mut SeedStream) -> Result<f64> {
    let mean = network_latency_mean(x, net)?;
    if net.sigma2 == 0.0 {
        return Ok(mean.max(0.0));
    }
    let normal = Normal::new(mean, net.std_dev())
        .map_err(|_| Error::invalid("sigma2", "not a valid variance"))?;
    Ok(normal.sample(rng).max(0.0))
}

/// True when a clamped Gaussian draw can noticeably bias moments (mean < 5σ).
pub fn clamp_may_bias(mean: f64, sigma2: f64) -> bool {
    sigma2 > 0.0 && mean < 5.0 * crate::math::sqrt(sigma2)
}

/// Handover delay f + U(0, l_f).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct HandoverParams {
    /// Fixed overhead, ms.
    pub f: f64,
    /// Frame length, ms.
    pub l_f: f64,
}

impl Default for HandoverParams {
    fn default() -> Self {
        Self { f: 20.0, l_f: 20.0 }
    }
}

impl HandoverParams {
    pub fn validate(&self) -> Result<()> {
        nonneg("f", self.f)?;
        nonneg("l_f", self.l_f)
    }

    pub fn mean(&self) -> f64 {
        self.f + self.l_f / 2.0
    }

    pub fn variance(&self) -> f64 {
        self.l_f * self.l_f / 12.0
    }

    pub fn support(&self) -> (f64, f64) {
        (self.f, self.f + self.l_f)
    }
}

pub fn sample_handover_delay(h: &HandoverParams, rng: &mut SeedStream) -> f64 {
    h.f + rng.uniform() * h.l_f
}

/// How the simulator draws a job's service time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ServiceLaw {
    /// g(M+N) + gMn + hmn + l with the job's actual n and m.
    #[default]
    Formula,
    /// Exponential with mean τ·E(n), the M/M/C approximation.
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ServiceTimeParams {
    /// Per-record search time, ms.
    pub g: f64,
    /// Per-PU channel lookup time, ms.
    pub h: f64,
    /// OS jitter mean, ms.
    pub l_mean: f64,
    /// OS jitter variance, ms².
    pub l_var: f64,
    /// Mean service time per guard-zone secondary user, ms.
    pub tau: f64,
    /// Per-query database response time used by the back-of-envelope estimator, ms.
    pub query_ms: f64,
    /// Records a job touches in the back-of-envelope estimator.
    pub records_per_job: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub law: ServiceLaw,
}

impl ServiceTimeParams {
    pub fn validate(&self) -> Result<()> {
        nonneg("g", self.g)?;
        nonneg("h", self.h)?;
        nonneg("l_mean", self.l_mean)?;
        nonneg("l_var", self.l_var)?;
        nonneg("tau", self.tau)?;
        nonneg("query_ms", self.query_ms)?;
        nonneg("records_per_job", self.records_per_job)
    }

    /// Deterministic part of the service time.
    pub fn base_time(&self, tv_receivers: u64, secondary_links: u64, n: u64, m: u64) -> f64 {
        let (big_m, big_n, n, m) = (
            tv_receivers as f64,
            secondary_links as f64,
            n as f64,
            m as f64,
        );
        self.g * (big_m + big_n) + self.g * big_m * n + self.h * m * n
    }
}

/// t_p = g(M+N) + gMn + hmn + l, floored at zero.
///
/// `n` is the number of secondary users the job evacuates (0 for a
/// log-only job) and `m` the number of TV receivers interfering with them.
/// The jitter `l` is the constant `l_mean` when `l_var` is zero and a
/// moment-matched gamma draw otherwise.
pub fn sample_service_time(
    s: &ServiceTimeParams,
    tv_receivers: u64,
    secondary_links: u64,
    n: u64,
    m: u64,
    rng: &mut SeedStream,
) -> f64 {
    (s.base_time(tv_receivers, secondary_links, n, m) + sample_jitter(s, rng)).max(0.0)
}

fn sample_jitter(s: &ServiceTimeParams, rng: &mut SeedStream) -> f64 {
    if s.l_var == 0.0 {
        return s.l_mean;
    }
    if s.l_mean > 0.0 {
        let shape = s.l_mean * s.l_mean / s.l_var;
        let scale = s.l_var / s.l_mean;
        match Gamma::new(shape, scale) {
            Ok(g) => g.sample(rng),
            Err(_) => s.l_mean,
        }
    } else {
        let normal = Normal::new(0.0, crate::math::sqrt(s.l_var)).expect("finite variance");
        normal.sample(rng).max(0.0)
    }
}

/// Per-query time × records touched × evacuation probability.
pub fn estimate_sm_response_simple(
    per_query_ms: f64,
    records_touched: f64,
    p_evac: f64,
) -> Result<f64> {
    nonneg("per_query_ms", per_query_ms)?;
    nonneg("records_touched", records_touched)?;
    probability("p_evac", p_evac)?;
    Ok(per_query_ms * records_touched * p_evac)
}
