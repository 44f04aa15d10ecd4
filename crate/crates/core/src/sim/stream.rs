//! Zapping-event generation.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::math;
use crate::model::{ChannelPopularity, TrafficParams};
use crate::rng::SeedStream;
use crate::sim::db::PuId;

/// A viewer switching to `channel`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ZappingEvent {
    pub time_ms: f64,
    pub pu_id: PuId,
    pub channel: u32,
}

/// Draws requested channels from the configured popularity law.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    cumulative: Vec<f64>,
}

impl ChannelSampler {
    pub fn new(n_channels: u32, popularity: ChannelPopularity) -> Self {
        let weight = |k: u32| match popularity {
            ChannelPopularity::Uniform => 1.0,
            ChannelPopularity::Zipf { exponent } => math::powf(k as f64, -exponent),
        };
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = (1..=n_channels)
            .map(|k| {
                acc += weight(k);
                acc
            })
            .collect();
        for c in &mut cumulative {
            *c /= acc;
        }
        Self { cumulative }
    }

    pub fn sample(&self, rng: &mut SeedStream) -> u32 {
        let u = rng.uniform();
        let k = self.cumulative.partition_point(|&c| c <= u);
        k.min(self.cumulative.len() - 1) as u32 + 1
    }
}

/// Inhomogeneous Poisson stream with rate M·φ(t)/E(B), by thinning.
///
/// Time zero corresponds to `start_hour` of the day. The originating receiver
/// is drawn uniformly from `pus`; with no receivers there is nobody to zap and
/// the stream is empty.
pub fn generate_zapping_stream(
    traffic: &TrafficParams,
    duration_s: f64,
    start_hour: f64,
    pus: &[PuId],
    rng: &mut SeedStream,
) -> Vec<ZappingEvent> {
    let phi_max = traffic.hut.max_value();
    let peak_rate_per_ms = traffic.tv_receivers as f64 * phi_max / traffic.mean_holding_s / 1000.0;
    let mut events = Vec::new();
    if peak_rate_per_ms.is_nan()
        || peak_rate_per_ms <= 0.0
        || pus.is_empty()
        || duration_s.is_nan()
        || duration_s <= 0.0
    {
        return events;
    }
    let channels = ChannelSampler::new(traffic.n_channels, traffic.channel_popularity);
    let horizon_ms = duration_s * 1000.0;
    let mut t = 0.0;
    loop {
        t += -math::ln(rng.uniform_open0()) / peak_rate_per_ms;
        if t >= horizon_ms {
            break;
        }
        let phi = traffic.hut.value_at(start_hour + t / 3_600_000.0);
        if rng.uniform() * phi_max >= phi {
            continue;
        }
        let pu_id = pus[rng.index(pus.len())];
        let channel = channels.sample(rng);
        events.push(ZappingEvent {
            time_ms: t,
            pu_id,
            channel,
        });
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HutProfile;

    fn traffic(m: u64, phi: f64) -> TrafficParams {
        TrafficParams {
            tv_receivers: m,
            secondary_links: 1,
            mean_holding_s: 600.0,
            hut: HutProfile::Constant(phi),
            n_channels: 5,
            p_evac: 0.1,
            channel_popularity: ChannelPopularity::Uniform,
        }
    }

    #[test]
    fn no_viewers_no_events() {
        let mut rng = SeedStream::new(1);
        assert!(
            generate_zapping_stream(&traffic(10_000, 0.0), 3600.0, 0.0, &[1, 2], &mut rng)
                .is_empty()
        );
        assert!(
            generate_zapping_stream(&traffic(10_000, 0.6), 3600.0, 0.0, &[], &mut rng).is_empty()
        );
    }

    #[test]
    fn constant_rate_matches_poisson_count() {
        // 10⁴ receivers at φ = 0.6 with E(B) = 600 s: 10 events/s, 36 000 per hour (σ ≈ 190).
        let mut rng = SeedStream::new(42);
        let pus: Vec<u32> = (0..100).collect();
        let events = generate_zapping_stream(&traffic(10_000, 0.6), 3600.0, 0.0, &pus, &mut rng);
        let expected = 36_000.0;
        assert!((events.len() as f64 - expected).abs() < 3.0 * math::sqrt(expected));
        assert!(events.windows(2).all(|w| w[0].time_ms <= w[1].time_ms));
        assert!(events
            .iter()
            .all(|e| (1..=5).contains(&e.channel) && e.pu_id < 100));
    }

    #[test]
    fn deterministic_under_seed() {
        let pus: Vec<u32> = (0..10).collect();
        let a = generate_zapping_stream(
            &traffic(1000, 0.3),
            600.0,
            0.0,
            &pus,
            &mut SeedStream::new(5),
        );
        let b = generate_zapping_stream(
            &traffic(1000, 0.3),
            600.0,
            0.0,
            &pus,
            &mut SeedStream::new(5),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn thinning_follows_diurnal_profile() {
        // Over a whole day the count matches M·E_B⁻¹·∫φ; the default profile averages 0.325.
        let mut t = traffic(1000, 0.0);
        t.hut = HutProfile::default();
        let pus = [0u32];
        let events = generate_zapping_stream(&t, 86_400.0, 0.0, &pus, &mut SeedStream::new(8));
        let expected = 1000.0 * 0.325 / 600.0 * 86_400.0;
        assert!((events.len() as f64 - expected).abs() < 3.0 * math::sqrt(expected));
    }

    #[test]
    fn zipf_prefers_low_channels() {
        let sampler = ChannelSampler::new(10, ChannelPopularity::Zipf { exponent: 1.0 });
        let mut rng = SeedStream::new(3);
        let mut counts = [0usize; 11];
        for _ in 0..100_000 {
            counts[sampler.sample(&mut rng) as usize] += 1;
        }
        let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
        let p1 = counts[1] as f64 / 1e5;
        assert!((p1 - 1.0 / h10).abs() < 0.01);
        assert!(counts[1] > counts[10] * 5);
    }
}
