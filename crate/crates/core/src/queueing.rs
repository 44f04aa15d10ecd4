//! M/M/C analytics for the spectrum manager.
//!
//! Rates on [`QueueModel`] are per second; [`ResponseTimeLaw`] works in
//! milliseconds because every delay in the crate does.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::latency::ServiceTimeParams;
use crate::math;
use crate::model::{expected_sus_in_guard_zone, ScenarioParams, SpatialParams, TrafficParams};
use crate::rng::SeedStream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct QueueModel {
    /// Arrival rate, jobs/s.
    pub lambda: f64,
    /// Per-server service rate, jobs/s.
    pub mu: f64,
    pub servers: u64,
}

impl QueueModel {
    pub fn new(lambda: f64, mu: f64, servers: u64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid("lambda", "must be finite and >= 0"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu", "must be finite and > 0"));
        }
        if servers < 1 {
            return Err(Error::invalid("servers", "at least one server is required"));
        }
        Ok(Self {
            lambda,
            mu,
            servers,
        })
    }

    /// Quasi-static model of a scenario at `hour` of the day.
    pub fn for_scenario(scn: &ScenarioParams, hour: f64) -> Result<Self> {
        let mu = service_rate(&scn.service, &scn.spatial)?;
        Self::new(arrival_rate(&scn.traffic, hour), mu, scn.processors)
    }

    /// Offered load ρ = λ/μ in erlangs.
    pub fn rho(&self) -> f64 {
        self.lambda / self.mu
    }

    pub fn utilization(&self) -> f64 {
        self.rho() / self.servers as f64
    }

    pub fn is_stable(&self) -> bool {
        self.rho() < self.servers as f64
    }

    pub fn erlang_c(&self) -> Result<f64> {
        erlang_c(self.servers, self.rho())
    }
}

/// ln of the Erlang-B blocking probability via the recurrence
/// 1/B(k) = 1 + (k/ρ)/B(k-1), carried in the log domain.
pub fn erlang_b_ln(servers: u64, rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::invalid("rho", "must be finite and >= 0"));
    }
    if servers < 1 {
        return Err(Error::invalid("servers", "at least one server is required"));
    }
    if rho == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_rho = math::ln(rho);
    let mut ln_inv_b = 0.0_f64;
    for k in 1..=servers {
        let a = math::ln(k as f64) - ln_rho + ln_inv_b;
        ln_inv_b = a.max(0.0) + math::ln_1p(math::exp(-a.abs()));
    }
    Ok(-ln_inv_b)
}

/// ln of the Erlang-C waiting probability. Finite for any stable load with ρ > 0.
pub fn erlang_c_ln(servers: u64, rho: f64) -> Result<f64> {
    let c = servers as f64;
    if rho.is_finite() && rho >= c && servers >= 1 {
        return Err(Error::Unstable { rho, servers });
    }
    let ln_b = erlang_b_ln(servers, rho)?;
    if ln_b == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let b = math::exp(ln_b);
    Ok(ln_b + math::ln(c) - math::ln(c - rho + rho * b))
}

/// Probability that an arriving job waits in an M/M/C queue.
pub fn erlang_c(servers: u64, rho: f64) -> Result<f64> {
    Ok(math::exp(erlang_c_ln(servers, rho)?).min(1.0))
}

/// λ = M·φ(t)/E(B), jobs per second.
pub fn arrival_rate(traffic: &TrafficParams, hour: f64) -> f64 {
    traffic.tv_receivers as f64 * traffic.hut.value_at(hour) / traffic.mean_holding_s
}

/// μ = 1/(τ·E(n)) in jobs per second, with τ in ms.
pub fn service_rate(s: &ServiceTimeParams, spatial: &SpatialParams) -> Result<f64> {
    let mean_ms = s.tau * expected_sus_in_guard_zone(spatial);
    if !(mean_ms.is_finite() && mean_ms > 0.0) {
        return Err(Error::invalid("tau", "τ·λs·π·r_p² must be positive"));
    }
    Ok(1000.0 / mean_ms)
}

/// Time-domain M/M/C response-time law: with probability `1 - p_wait` an
/// Exponential(`mu`), otherwise Exponential(`drain_rate`) + Exponential(`mu`).
/// Its Laplace transform is
/// (1−P)·μ/(μ+s) + P·(μC−λ)μ/((μC−λ+s)(μ+s)).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ResponseTimeLaw {
    pub p_wait: f64,
    /// Per-server service rate, 1/ms.
    pub mu: f64,
    /// μC − λ, 1/ms.
    pub drain_rate: f64,
}

pub fn response_time_law(q: &QueueModel) -> Result<ResponseTimeLaw> {
    let p_wait = q.erlang_c()?;
    let mu = q.mu / 1000.0;
    let drain_rate = (q.mu * q.servers as f64 - q.lambda) / 1000.0;
    ResponseTimeLaw::new(p_wait, mu, drain_rate)
}

impl ResponseTimeLaw {
    pub fn new(p_wait: f64, mu: f64, drain_rate: f64) -> Result<Self> {
        crate::model::probability("p_wait", p_wait)?;
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu", "must be finite and > 0"));
        }
        if !(drain_rate.is_finite() && drain_rate > 0.0) {
            return Err(Error::invalid("drain_rate", "must be finite and > 0"));
        }
        Ok(Self {
            p_wait,
            mu,
            drain_rate,
        })
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.mu + self.p_wait / self.drain_rate
    }

    pub fn variance(&self) -> f64 {
        let (mu, d, p) = (self.mu, self.drain_rate, self.p_wait);
        let second =
            (1.0 - p) * 2.0 / (mu * mu) + p * (2.0 / (d * d) + 2.0 / (mu * mu) + 2.0 / (d * mu));
        second - math::sq(self.mean())
    }

    pub fn laplace(&self, s: f64) -> f64 {
        let (mu, d, p) = (self.mu, self.drain_rate, self.p_wait);
        (1.0 - p) * mu / (mu + s) + p * d * mu / ((d + s) * (mu + s))
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let mu = self.mu;
        (1.0 - self.p_wait) * mu * math::exp(-mu * t) + self.p_wait * self.hypo_pdf(t)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        1.0 - self.survival(t)
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        (1.0 - self.p_wait) * math::exp(-self.mu * t) + self.p_wait * self.hypo_survival(t)
    }

    // Density of Exp(d) + Exp(μ); stable when d ≈ μ.
    fn hypo_pdf(&self, t: f64) -> f64 {
        let (mu, d) = (self.mu, self.drain_rate);
        let z = (mu - d) * t;
        if z.abs() < 1e-2 {
            d * mu * t * math::exp(-mu * t) * expm1_over(z)
        } else {
            d * mu * (math::exp(-d * t) - math::exp(-mu * t)) / (mu - d)
        }
    }

    fn hypo_survival(&self, t: f64) -> f64 {
        let (mu, d) = (self.mu, self.drain_rate);
        let z = (mu - d) * t;
        if z.abs() < 1e-2 {
            math::exp(-mu * t) * (1.0 + mu * t * expm1_over(z))
        } else {
            (mu * math::exp(-d * t) - d * math::exp(-mu * t)) / (mu - d)
        }
    }

    pub fn sample(&self, rng: &mut SeedStream) -> f64 {
        let service = -math::ln(rng.uniform_open0()) / self.mu;
        if rng.uniform() < self.p_wait {
            service - math::ln(rng.uniform_open0()) / self.drain_rate
        } else {
            service
        }
    }
}

fn expm1_over(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        math::exp_m1(z) / z
    }
}

pub fn sample_response_time(law: &ResponseTimeLaw, rng: &mut SeedStream) -> f64 {
    law.sample(rng)
}
