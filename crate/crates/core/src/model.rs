//! Domain types: user placement, traffic, protection requirement, scenarios.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Poisson};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::latency::{HandoverParams, NetworkParams, ServiceTimeParams};
use crate::math;
use crate::rng::SeedStream;
use crate::{Error, Result};

/// Hour of day used when a quasi-static analysis needs a single φ(t).
pub const PRIME_TIME_HOUR: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        math::sqrt(math::sq(self.x - other.x) + math::sq(self.y - other.y))
    }

    /// Distance on the flat torus of the given extent.
    pub fn torus_distance(&self, other: &Point2D, width: f64, height: f64) -> f64 {
        let dx = wrap_delta(self.x - other.x, width);
        let dy = wrap_delta(self.y - other.y, height);
        math::sqrt(dx * dx + dy * dy)
    }
}

fn wrap_delta(d: f64, extent: f64) -> f64 {
    let d = d.abs() % extent;
    d.min(extent - d)
}

/// Spatial Poisson densities and the guard-zone radius.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SpatialParams {
    /// Secondary-user density, users per m².
    pub lambda_s: f64,
    /// Primary-user (TV receiver) density, users per m².
    pub lambda_p: f64,
    /// Guard-zone radius in metres; also the interference range of a secondary base station.
    pub r_p: f64,
    pub region_width: f64,
    pub region_height: f64,
}

impl SpatialParams {
    pub fn validate(&self) -> Result<()> {
        nonneg("lambda_s", self.lambda_s)?;
        nonneg("lambda_p", self.lambda_p)?;
        positive("r_p", self.r_p)?;
        positive("region_width", self.region_width)?;
        positive("region_height", self.region_height)
    }

    pub fn area(&self) -> f64 {
        self.region_width * self.region_height
    }

    pub fn guard_zone_area(&self) -> f64 {
        math::PI * self.r_p * self.r_p
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= 0.0 && p.x < self.region_width && p.y >= 0.0 && p.y < self.region_height
    }

    /// Secondary-user density that puts `mean` users in a guard zone on average.
    pub fn lambda_s_for_mean(mean: f64, r_p: f64) -> f64 {
        mean / (math::PI * r_p * r_p)
    }
}

/// Pr(Δe ≤ `delta_max_ms`) must be at least `o_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ProtectionRequirement {
    #[cfg_attr(feature = "serde", serde(rename = "delta_max"))]
    pub delta_max_ms: f64,
    pub o_max: f64,
}

impl ProtectionRequirement {
    pub fn new(delta_max_ms: f64, o_max: f64) -> Result<Self> {
        let req = Self {
            delta_max_ms,
            o_max,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        positive("delta_max", self.delta_max_ms)?;
        probability("o_max", self.o_max)
    }
}

impl Default for ProtectionRequirement {
    fn default() -> Self {
        Self {
            delta_max_ms: 200.0,
            o_max: 0.95,
        }
    }
}

/// Household-using-television ratio φ(t) as a function of the hour of day.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HutProfile {
    Constant(f64),
    /// `(hour, φ)` knots with strictly increasing hours in [0, 24); linear
    /// interpolation, wrapping from the last knot to the first across midnight.
    Piecewise(Vec<(f64, f64)>),
}

impl Default for HutProfile {
    /// 5% at 04:00 rising to 60% at 20:00.
    fn default() -> Self {
        HutProfile::Piecewise(vec![(4.0, 0.05), (PRIME_TIME_HOUR, 0.6)])
    }
}

impl HutProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            HutProfile::Constant(phi) => probability("hut_profile", *phi),
            HutProfile::Piecewise(knots) => {
                if knots.is_empty() {
                    return Err(Error::invalid("hut_profile", "no knots"));
                }
                let mut prev = f64::NEG_INFINITY;
                for &(hour, phi) in knots {
                    if !(0.0..24.0).contains(&hour) || hour <= prev {
                        return Err(Error::invalid(
                            "hut_profile",
                            "knot hours must be strictly increasing within [0, 24)",
                        ));
                    }
                    probability("hut_profile", phi)?;
                    prev = hour;
                }
                Ok(())
            }
        }
    }

    /// φ at `hour` (any real; taken modulo 24).
    pub fn value_at(&self, hour: f64) -> f64 {
        match self {
            HutProfile::Constant(phi) => *phi,
            HutProfile::Piecewise(knots) => {
                let t = math::rem_euclid(hour, 24.0);
                let n = knots.len();
                if n == 1 {
                    return knots[0].1;
                }
                // Segment [knots[i], knots[i+1]] with the last one wrapping past midnight.
                let i = match knots.iter().rposition(|&(h, _)| h <= t) {
                    Some(i) => i,
                    None => n - 1,
                };
                let (h0, p0) = knots[i];
                let (mut h1, p1) = knots[(i + 1) % n];
                let mut t = t;
                if i == n - 1 {
                    h1 += 24.0;
                    if t < h0 {
                        t += 24.0;
                    }
                }
                p0 + (p1 - p0) * (t - h0) / (h1 - h0)
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            HutProfile::Constant(phi) => *phi,
            HutProfile::Piecewise(knots) => knots.iter().map(|k| k.1).fold(0.0, f64::max),
        }
    }
}

/// Which channel a zapping viewer asks for.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChannelPopularity {
    #[default]
    Uniform,
    /// Channel k (1-based) chosen with weight k^(-exponent).
    Zipf { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TrafficParams {
    /// Registered TV receivers M.
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub tv_receivers: u64,
    /// Registered secondary links N.
    #[cfg_attr(feature = "serde", serde(rename = "N"))]
    pub secondary_links: u64,
    /// Mean channel holding time E(B), seconds.
    #[cfg_attr(feature = "serde", serde(rename = "E_B"))]
    pub mean_holding_s: f64,
    #[cfg_attr(feature = "serde", serde(rename = "hut_profile"))]
    pub hut: HutProfile,
    pub n_channels: u32,
    /// Probability that a processed job triggers an evacuation.
    pub p_evac: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub channel_popularity: ChannelPopularity,
}

/// Placeholder mean channel holding time, seconds.
pub const DEFAULT_MEAN_HOLDING_S: f64 = 600.0;

impl TrafficParams {
    pub fn validate(&self) -> Result<()> {
        if self.secondary_links < 1 {
            return Err(Error::invalid(
                "N",
                "at least one secondary link is required",
            ));
        }
        positive("E_B", self.mean_holding_s)?;
        self.hut.validate()?;
        if self.n_channels < 1 {
            return Err(Error::invalid(
                "n_channels",
                "at least one channel is required",
            ));
        }
        probability("p_evac", self.p_evac)?;
        if let ChannelPopularity::Zipf { exponent } = self.channel_popularity {
            nonneg("channel_popularity.exponent", exponent)?;
        }
        Ok(())
    }
}

/// One spectrum-manager architecture.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ScenarioParams {
    pub name: String,
    pub spatial: SpatialParams,
    pub traffic: TrafficParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub protection: ProtectionRequirement,
    /// Server count C of the spectrum manager.
    pub processors: u64,
    pub net: NetworkParams,
    pub handover: HandoverParams,
    pub service: ServiceTimeParams,
    /// Miles between the users and the spectrum manager; 0 when co-located.
    pub distance_x: f64,
    /// Report the evacuation time as the handover support interval rather than a mean.
    #[cfg_attr(feature = "serde", serde(default))]
    pub report_interval: bool,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        self.spatial.validate()?;
        self.traffic.validate()?;
        self.protection.validate()?;
        if self.processors < 1 {
            return Err(Error::invalid(
                "processors",
                "at least one server is required",
            ));
        }
        self.net.validate()?;
        self.handover.validate()?;
        self.service.validate()?;
        nonneg("distance_x", self.distance_x)
    }
}

/// E(n) = λs·π·r_p², the mean number of secondary users in a guard zone.
pub fn expected_sus_in_guard_zone(spatial: &SpatialParams) -> f64 {
    spatial.lambda_s * spatial.guard_zone_area()
}

/// λp·π·r_p², the mean number of TV receivers within a base station's range.
pub fn expected_pus_in_range(spatial: &SpatialParams) -> f64 {
    spatial.lambda_p * spatial.guard_zone_area()
}

/// Poisson PMF evaluated in the log domain so large means do not overflow.
pub fn poisson_pmf(k: i64, mean: f64) -> Result<f64> {
    if k < 0 {
        return Err(Error::NegativeCount(k));
    }
    nonneg("mean", mean)?;
    if mean == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let k = k as u64;
    Ok(math::exp(
        k as f64 * math::ln(mean) - mean - math::ln_factorial(k),
    ))
}

/// Pr(n = k) for the secondary-user count in one guard zone.
pub fn pmf_sus_in_guard_zone(k: i64, spatial: &SpatialParams) -> Result<f64> {
    poisson_pmf(k, expected_sus_in_guard_zone(spatial))
}

/// Pr(m = k) for the TV-receiver count in one base station's range.
pub fn pmf_pus_in_range(k: i64, spatial: &SpatialParams) -> Result<f64> {
    poisson_pmf(k, expected_pus_in_range(spatial))
}

/// Homogeneous Poisson point process of `density` over the scenario region.
pub fn sample_ppp(
    density: f64,
    region: &SpatialParams,
    rng: &mut SeedStream,
) -> Result<Vec<Point2D>> {
    nonneg("density", density)?;
    let mean = density * region.area();
    let count = if mean > 0.0 {
        let poisson =
            Poisson::new(mean).map_err(|_| Error::invalid("density", "mean count too large"))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    Ok(uniform_points(count, region, rng))
}

/// `count` i.i.d. uniform points over the region.
pub fn uniform_points(count: usize, region: &SpatialParams, rng: &mut SeedStream) -> Vec<Point2D> {
    (0..count)
        .map(|_| {
            Point2D::new(
                rng.uniform() * region.region_width,
                rng.uniform() * region.region_height,
            )
        })
        .collect()
}

pub(crate) fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must be finite and >= 0, got {v}"),
        ))
    }
}

pub(crate) fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must be finite and > 0, got {v}"),
        ))
    }
}

pub(crate) fn probability(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must lie in [0, 1], got {v}"),
        ))
    }
}
