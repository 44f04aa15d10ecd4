use alloc::format;
use alloc::vec::Vec;

use crate::latency::{
    clamp_may_bias, network_latency_mean, sample_handover_delay, sample_network_latency,
    sample_service_time, ServiceLaw,
};
use crate::math;
use crate::model::{
    expected_sus_in_guard_zone, sample_ppp, uniform_points, ScenarioParams, PRIME_TIME_HOUR,
};
use crate::rng::SeedStream;
use crate::sim::db::{build_interference_db, InterferenceDb, PuSpec, SuSpec};
use crate::sim::queue::FifoServerPool;
use crate::sim::report::{EvacComponents, SimReport};
use crate::sim::stream::{generate_zapping_stream, ChannelSampler};
use crate::Result;

const STREAM_PLACEMENT: u64 = 1;
const STREAM_ARRIVALS: u64 = 2;
const STREAM_NETWORK: u64 = 3;
const STREAM_SERVICE: u64 = 4;
const STREAM_HANDOVER: u64 = 5;
const STREAM_RETUNE: u64 = 6;

const TRACE_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub duration_s: f64,
    pub seed: u64,
    /// Hour of day at simulation time zero.
    pub start_hour: f64,
    /// Most TV receivers placed in the region; the arrival rate and the
    /// service-time formula still use the configured M.
    pub pu_cap: usize,
    /// Most secondary users placed in the region.
    pub su_cap: usize,
}

impl SimOptions {
    pub fn new(duration_s: f64, seed: u64) -> Self {
        Self {
            duration_s,
            seed,
            start_hour: PRIME_TIME_HOUR,
            pu_cap: 20_000,
            su_cap: 100_000,
        }
    }
}

/// Placed receivers and secondary links.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub pus: Vec<PuSpec>,
    pub sus: Vec<SuSpec>,
}

impl Population {
    /// min(M, cap) receivers placed uniformly, a Poisson field of secondary
    /// users truncated at the cap. Receivers watch a channel with probability
    /// φ(start); secondary users start on a random free channel.
    pub fn sample(
        scn: &ScenarioParams,
        opts: &SimOptions,
        rng: &mut SeedStream,
    ) -> Result<Population> {
        let n_pus = (scn.traffic.tv_receivers as usize).min(opts.pu_cap);
        let channels = ChannelSampler::new(scn.traffic.n_channels, scn.traffic.channel_popularity);
        let phi = scn.traffic.hut.value_at(opts.start_hour);
        let pus = uniform_points(n_pus, &scn.spatial, rng)
            .into_iter()
            .enumerate()
            .map(|(i, pos)| PuSpec {
                id: i as u32,
                pos,
                channel: (rng.uniform() < phi).then(|| channels.sample(rng)),
            })
            .collect();
        let mut su_points = sample_ppp(scn.spatial.lambda_s, &scn.spatial, rng)?;
        su_points.truncate(opts.su_cap);
        let sus = su_points
            .into_iter()
            .enumerate()
            .map(|(i, pos)| SuSpec {
                id: i as u32,
                pos,
                channel: None,
            })
            .collect();
        Ok(Population { pus, sus })
    }
}

pub fn run_simulation(scn: &ScenarioParams, duration_s: f64, seed: u64) -> Result<SimReport> {
    run_simulation_with(scn, &SimOptions::new(duration_s, seed), None)
}

/// One replication. With `population = None` users are placed from the scenario.
pub fn run_simulation_with(
    scn: &ScenarioParams,
    opts: &SimOptions,
    population: Option<Population>,
) -> Result<SimReport> {
    scn.validate()?;
    crate::model::positive("duration", opts.duration_s)?;
    let root = SeedStream::new(opts.seed);
    let mut placement = root.substream(STREAM_PLACEMENT);
    let mut arrivals_rng = root.substream(STREAM_ARRIVALS);
    let mut net_rng = root.substream(STREAM_NETWORK);
    let mut service_rng = root.substream(STREAM_SERVICE);
    let mut handover_rng = root.substream(STREAM_HANDOVER);
    let mut retune_rng = root.substream(STREAM_RETUNE);

    let explicit = population.is_some();
    let population = match population {
        Some(p) => p,
        None => Population::sample(scn, opts, &mut placement)?,
    };
    let mut db = build_interference_db(
        &population.pus,
        &population.sus,
        &scn.spatial,
        scn.traffic.n_channels,
    )?;
    if !explicit {
        assign_initial_channels(&mut db, &mut placement)?;
    }

    let pu_ids: Vec<u32> = db.pu_ids().collect();
    let events = generate_zapping_stream(
        &scn.traffic,
        opts.duration_s,
        opts.start_hour,
        &pu_ids,
        &mut arrivals_rng,
    );

    let leg = scn.net.one_way();
    let leg_mean = network_latency_mean(scn.distance_x, &leg)?;

    // Each job reaches the spectrum manager after its first network leg.
    let mut jobs: Vec<(f64, usize, f64)> = Vec::with_capacity(events.len());
    for (seq, e) in events.iter().enumerate() {
        let net_in = sample_network_latency(scn.distance_x, &leg, &mut net_rng)?;
        jobs.push((e.time_ms + net_in, seq, net_in));
    }
    jobs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mean_exp_service = scn.service.tau * expected_sus_in_guard_zone(&scn.spatial);
    let mut pool = FifoServerPool::new(scn.processors);
    let mut report = SimReport {
        scenario: scn.name.clone(),
        seed: opts.seed,
        config_digest: config_digest(scn, opts),
        replications: 1,
        duration_s: opts.duration_s,
        start_hour: opts.start_hour,
        servers: scn.processors,
        pus_placed: db.pu_count() as u64,
        sus_placed: db.su_count() as u64,
        jobs_processed: 0,
        jobs_evacuating: 0,
        evacuations: 0,
        blocked: 0,
        evacuation_samples: Vec::new(),
        components: Vec::new(),
        queue_wait_samples: Vec::with_capacity(jobs.len()),
        response_samples: Vec::with_capacity(jobs.len()),
        busy_fraction: 0.0,
        wait_probability: 0.0,
        max_backlog: 0,
        backlog_trace: Vec::new(),
        delta_max_ms: scn.protection.delta_max_ms,
        protection_probability: None,
        clamp_possible: clamp_may_bias(leg_mean, leg.sigma2),
    };

    let mut arrivals = Vec::with_capacity(jobs.len());
    let mut starts = Vec::with_capacity(jobs.len());
    let mut waited = 0u64;
    for &(arrival, seq, net_in) in &jobs {
        let event = &events[seq];
        // The database reflects jobs in the order they enter service.
        db.set_pu_channel(event.pu_id, Some(event.channel))?;
        let affected = db.affected_sus(event.pu_id, event.channel)?;
        let n = affected.len() as u64;
        let m = affected
            .iter()
            .map(|&su| db.interferers(su).map(|p| p.len() as u64))
            .try_fold(0u64, |acc, m| m.map(|m| acc.max(m)))?;
        let service = match scn.service.law {
            ServiceLaw::Formula => sample_service_time(
                &scn.service,
                scn.traffic.tv_receivers,
                scn.traffic.secondary_links,
                n,
                m,
                &mut service_rng,
            ),
            ServiceLaw::Exponential => -math::ln(service_rng.uniform_open0()) * mean_exp_service,
        };
        let served = pool.serve(arrival, service);
        let wait = served.start - arrival;
        if wait > 0.0 {
            waited += 1;
        }
        report.jobs_processed += 1;
        report.queue_wait_samples.push(wait);
        report.response_samples.push(wait + service);
        arrivals.push(arrival);
        starts.push(served.start);

        if affected.is_empty() {
            continue;
        }
        report.jobs_evacuating += 1;
        for su in affected {
            let parts = EvacComponents {
                net_in,
                wait,
                service,
                net_out: sample_network_latency(scn.distance_x, &leg, &mut net_rng)?,
                handover: sample_handover_delay(&scn.handover, &mut handover_rng),
            };
            report.evacuations += 1;
            report.evacuation_samples.push(parts.total());
            report.components.push(parts);
            let free = db.free_channels_for(su)?;
            if free.is_empty() {
                db.set_su_channel(su, None)?;
                report.blocked += 1;
            } else {
                db.set_su_channel(su, Some(free[retune_rng.index(free.len())]))?;
            }
        }
    }

    let horizon = (opts.duration_s * 1000.0).max(pool.last_finish());
    report.busy_fraction = (pool.busy_ms() / (scn.processors as f64 * horizon)).clamp(0.0, 1.0);
    report.wait_probability = if report.jobs_processed > 0 {
        waited as f64 / report.jobs_processed as f64
    } else {
        0.0
    };
    report.max_backlog = max_backlog(&arrivals, &starts);
    report.backlog_trace = backlog_trace(&arrivals, &starts, horizon);
    report.protection_probability = report.protection_at(report.delta_max_ms);
    Ok(report)
}

fn assign_initial_channels(db: &mut InterferenceDb, rng: &mut SeedStream) -> Result<()> {
    let ids: Vec<u32> = db.su_ids().collect();
    for su in ids {
        let free = db.free_channels_for(su)?;
        if !free.is_empty() {
            db.set_su_channel(su, Some(free[rng.index(free.len())]))?;
        }
    }
    Ok(())
}

/// Most jobs waiting at any arrival instant. `starts` is nondecreasing under FIFO.
fn max_backlog(arrivals: &[f64], starts: &[f64]) -> u64 {
    let mut best = 0usize;
    for (i, &a) in arrivals.iter().enumerate() {
        let started = starts[..=i].partition_point(|&s| s <= a);
        best = best.max(i + 1 - started);
    }
    best as u64
}

fn backlog_trace(arrivals: &[f64], starts: &[f64], horizon: f64) -> Vec<(f64, u64)> {
    if arrivals.is_empty() {
        return Vec::new();
    }
    (0..=TRACE_POINTS)
        .map(|k| {
            let t = horizon * k as f64 / TRACE_POINTS as f64;
            let arrived = arrivals.partition_point(|&a| a <= t);
            let started = starts.partition_point(|&s| s <= t);
            (t, arrived.saturating_sub(started) as u64)
        })
        .collect()
}

fn config_digest(scn: &ScenarioParams, opts: &SimOptions) -> u64 {
    let text = format!(
        "{scn:?}|{}|{}|{}|{}",
        opts.duration_s, opts.start_hour, opts.pu_cap, opts.su_cap
    );
    text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
