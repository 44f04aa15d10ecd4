use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::distribution::Empirical;
use crate::{Error, Result};

/// Parts of one evacuation delay, in the order they occur.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EvacComponents {
    pub net_in: f64,
    pub wait: f64,
    pub service: f64,
    pub net_out: f64,
    pub handover: f64,
}

impl EvacComponents {
    pub fn total(&self) -> f64 {
        self.net_in + self.wait + self.service + self.net_out + self.handover
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SimReport {
    pub scenario: String,
    pub seed: u64,
    /// FNV-1a digest of the scenario and options.
    pub config_digest: u64,
    pub replications: u32,
    pub duration_s: f64,
    pub start_hour: f64,
    pub servers: u64,
    pub pus_placed: u64,
    pub sus_placed: u64,
    pub jobs_processed: u64,
    pub jobs_evacuating: u64,
    pub evacuations: u64,
    /// Evacuated links left with no free channel.
    pub blocked: u64,
    /// t_E per evacuated link, ms.
    pub evacuation_samples: Vec<f64>,
    pub components: Vec<EvacComponents>,
    /// Queue wait per job, ms.
    pub queue_wait_samples: Vec<f64>,
    /// Wait plus service per job, ms.
    pub response_samples: Vec<f64>,
    pub busy_fraction: f64,
    pub wait_probability: f64,
    pub max_backlog: u64,
    /// (time ms, jobs waiting) at evenly spaced instants of the first replication.
    pub backlog_trace: Vec<(f64, u64)>,
    pub delta_max_ms: f64,
    pub protection_probability: Option<f64>,
    /// Latency draws may have been clamped at zero often enough to bias moments.
    pub clamp_possible: bool,
}

/// Headline numbers of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SimSummary {
    pub evacuations: u64,
    pub mean_ms: Option<f64>,
    pub p50_ms: Option<f64>,
    pub p95_ms: Option<f64>,
    pub p99_ms: Option<f64>,
    pub max_ms: Option<f64>,
    pub mean_wait_ms: Option<f64>,
    pub mean_response_ms: Option<f64>,
    pub protection_probability: Option<f64>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(crate::math::sum(xs.iter().copied()) / xs.len() as f64)
    }
}

impl SimReport {
    pub fn summary(&self) -> SimSummary {
        let empirical = Empirical::new(self.evacuation_samples.clone()).ok();
        let q = |p: f64| empirical.as_ref().map(|e| e.quantile(p));
        SimSummary {
            evacuations: self.evacuations,
            mean_ms: mean(&self.evacuation_samples),
            p50_ms: q(0.5),
            p95_ms: q(0.95),
            p99_ms: q(0.99),
            max_ms: empirical.as_ref().and_then(|e| e.samples().last().copied()),
            mean_wait_ms: mean(&self.queue_wait_samples),
            mean_response_ms: mean(&self.response_samples),
            protection_probability: self.protection_probability,
        }
    }

    /// Protection probability at an arbitrary deadline.
    pub fn protection_at(&self, delta_max_ms: f64) -> Option<f64> {
        if self.evacuation_samples.is_empty() {
            return None;
        }
        let hits = self
            .evacuation_samples
            .iter()
            .filter(|&&t| t <= delta_max_ms)
            .count();
        Some(hits as f64 / self.evacuation_samples.len() as f64)
    }

    /// Order-preserving reduction of replications of the same configuration.
    pub fn merge(reports: &[SimReport]) -> Result<SimReport> {
        let (first, rest) = reports.split_first().ok_or(Error::Empty("reports"))?;
        let mut out = first.clone();
        let mut busy_sum = first.busy_fraction;
        let mut waited = first.wait_probability * first.jobs_processed as f64;
        for r in rest {
            if r.config_digest != first.config_digest {
                return Err(Error::invalid(
                    "reports",
                    "replications of different configurations",
                ));
            }
            out.replications += r.replications;
            out.pus_placed += r.pus_placed;
            out.sus_placed += r.sus_placed;
            out.jobs_processed += r.jobs_processed;
            out.jobs_evacuating += r.jobs_evacuating;
            out.evacuations += r.evacuations;
            out.blocked += r.blocked;
            out.evacuation_samples
                .extend_from_slice(&r.evacuation_samples);
            out.components.extend_from_slice(&r.components);
            out.queue_wait_samples
                .extend_from_slice(&r.queue_wait_samples);
            out.response_samples.extend_from_slice(&r.response_samples);
            out.max_backlog = out.max_backlog.max(r.max_backlog);
            out.clamp_possible |= r.clamp_possible;
            busy_sum += r.busy_fraction;
            waited += r.wait_probability * r.jobs_processed as f64;
        }
        out.busy_fraction = busy_sum / reports.len() as f64;
        out.wait_probability = if out.jobs_processed > 0 {
            waited / out.jobs_processed as f64
        } else {
            0.0
        };
        out.protection_probability = out.protection_at(out.delta_max_ms);
        Ok(out)
    }
}
