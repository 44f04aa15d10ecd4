//! Evacuation delay t_E = t_N + t_D + t_H and its protection probability.
//!
//! Components are assumed independent, so the law of the sum is the
//! convolution of the component laws. Point masses are folded into a shift;
//! everything else is discretized on a common grid and convolved directly.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::distribution::{AnalyticLaw, DelayDistribution, GridSpec};
use crate::latency::{estimate_sm_response_simple, network_latency_mean};
use crate::model::{ProtectionRequirement, ScenarioParams, PRIME_TIME_HOUR};
use crate::queueing::{response_time_law, QueueModel};
use crate::{Error, Result};

/// How the spectrum-manager response time is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EvalMode {
    /// Per-query time × records × evacuation probability, as a constant.
    #[default]
    Simple,
    /// M/M/C response time at the analysis hour.
    Queueing,
}

impl core::fmt::Display for EvalMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            EvalMode::Simple => "simple",
            EvalMode::Queueing => "queueing",
        })
    }
}

impl core::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(EvalMode::Simple),
            "queueing" => Ok(EvalMode::Queueing),
            other => Err(Error::invalid(
                "mode",
                alloc::format!("unknown mode `{other}`"),
            )),
        }
    }
}

pub fn compose_evacuation_delay(
    net: &DelayDistribution,
    sm: &DelayDistribution,
    hand: &DelayDistribution,
) -> Result<DelayDistribution> {
    compose_with(&[net, sm, hand], None)
}

/// Law of the independent sum of `parts`.
///
/// With `spec = None` the grid uses the default step and a bound of
/// max(10 s, 20 × the summed means of the non-degenerate parts).
pub fn compose_with(
    parts: &[&DelayDistribution],
    spec: Option<GridSpec>,
) -> Result<DelayDistribution> {
    if parts.is_empty() {
        return Err(Error::Empty("components"));
    }
    let mut offset = 0.0;
    let mut spread: Vec<&DelayDistribution> = Vec::new();
    for d in parts {
        match d.as_point_mass() {
            Some(v) => offset += v,
            None => spread.push(d),
        }
    }
    if spread.is_empty() {
        return DelayDistribution::point_mass(offset);
    }
    let spec = spec.unwrap_or_else(|| GridSpec::for_mean(spread.iter().map(|d| d.mean()).sum()));
    let mut grids = spread
        .iter()
        .map(|d| d.to_grid(&spec))
        .collect::<Result<Vec<_>>>()?;
    // Smallest supports first keeps the direct convolution cheap; ties keep input order.
    grids.sort_by_key(|g| g.len());
    let mut acc = grids.remove(0);
    for g in &grids {
        acc = acc.convolve(g)?;
    }
    let acc = acc.shifted(offset);
    let bound = offset + spec.upper_bound_ms;
    if acc.upper() > bound {
        let mass_beyond = 1.0 - acc.cdf(bound);
        if mass_beyond > crate::distribution::MAX_OVERFLOW_MASS {
            return Err(Error::GridOverflow {
                mass_beyond,
                upper_bound_ms: spec.upper_bound_ms,
            });
        }
    }
    Ok(DelayDistribution::grid(acc))
}

/// Pr(t_E ≤ Δmax).
pub fn protection_probability(d: &DelayDistribution, req: &ProtectionRequirement) -> f64 {
    d.cdf(req.delta_max_ms)
}

pub fn delay_percentile(d: &DelayDistribution, q: f64) -> Result<f64> {
    d.quantile(q)
}

/// Mean network round trip for the scenario, ms.
pub fn network_mean(scn: &ScenarioParams) -> Result<f64> {
    network_latency_mean(scn.distance_x, &scn.net)
}

/// Mean spectrum-manager response time, ms.
pub fn sm_response_mean(scn: &ScenarioParams, mode: EvalMode) -> Result<f64> {
    sm_response_mean_at(scn, mode, PRIME_TIME_HOUR)
}

pub fn sm_response_mean_at(scn: &ScenarioParams, mode: EvalMode, hour: f64) -> Result<f64> {
    match mode {
        EvalMode::Simple => estimate_sm_response_simple(
            scn.service.query_ms,
            scn.service.records_per_job,
            scn.traffic.p_evac,
        ),
        EvalMode::Queueing => Ok(response_time_law(&QueueModel::for_scenario(scn, hour)?)?.mean()),
    }
}

/// Mean evacuation delay: network mean + response mean + handover mean.
pub fn mean_evacuation_delay(scn: &ScenarioParams, mode: EvalMode) -> Result<f64> {
    mean_evacuation_delay_at(scn, mode, PRIME_TIME_HOUR)
}

pub fn mean_evacuation_delay_at(scn: &ScenarioParams, mode: EvalMode, hour: f64) -> Result<f64> {
    Ok(network_mean(scn)? + sm_response_mean_at(scn, mode, hour)? + scn.handover.mean())
}

/// (network, spectrum manager, handover) laws for a scenario.
pub fn evacuation_components(
    scn: &ScenarioParams,
    mode: EvalMode,
) -> Result<[DelayDistribution; 3]> {
    evacuation_components_at(scn, mode, PRIME_TIME_HOUR)
}

pub fn evacuation_components_at(
    scn: &ScenarioParams,
    mode: EvalMode,
    hour: f64,
) -> Result<[DelayDistribution; 3]> {
    let net = DelayDistribution::analytic(AnalyticLaw::Gaussian {
        mean: network_mean(scn)?,
        variance: scn.net.sigma2,
    })?;
    let sm = match mode {
        EvalMode::Simple => DelayDistribution::point_mass(sm_response_mean_at(scn, mode, hour)?)?,
        EvalMode::Queueing => DelayDistribution::response_time(response_time_law(
            &QueueModel::for_scenario(scn, hour)?,
        )?),
    };
    let (lo, hi) = scn.handover.support();
    let hand = DelayDistribution::uniform(lo, hi)?;
    Ok([net, sm, hand])
}

/// Composed evacuation-delay law for a scenario.
pub fn evacuation_distribution(scn: &ScenarioParams, mode: EvalMode) -> Result<DelayDistribution> {
    let [net, sm, hand] = evacuation_components(scn, mode)?;
    compose_evacuation_delay(&net, &sm, &hand)
}
