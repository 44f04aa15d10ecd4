//! Channel-evacuation delay models for spectrum managers in TV black-space access.
//!
//! When a TV viewer switches channels, every secondary link transmitting on the
//! requested channel inside the viewer's guard zone has to vacate it. The time
//! from the zap to the evacuation is the sum of network latency, the spectrum
//! manager's response time and the secondary link's handover delay. This crate
//! models each component, composes them into a delay distribution, checks the
//! result against a deadline, and simulates the full pipeline for validation.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, reports and the
//! command-line tool live in the `blackspace` companion crate.
//!
//! Units: time in milliseconds unless a name says otherwise (`_s` for seconds),
//! distances in metres, spectrum-manager distance in miles.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod distribution;
mod error;
pub mod evac;
pub mod latency;
mod math;
pub mod model;
pub mod queueing;
pub mod rng;
pub mod scenarios;
pub mod sim;

pub use distribution::{AnalyticLaw, DelayDistribution, GridPdf, GridSpec};
pub use error::Error;
pub use evac::{
    compose_evacuation_delay, compose_with, delay_percentile, evacuation_components,
    mean_evacuation_delay, protection_probability, EvalMode,
};
pub use latency::{HandoverParams, NetworkParams, ServiceLaw, ServiceTimeParams};
pub use model::{
    HutProfile, Point2D, ProtectionRequirement, ScenarioParams, SpatialParams, TrafficParams,
};
pub use queueing::{QueueModel, ResponseTimeLaw};
pub use rng::SeedStream;

pub type Result<T, E = Error> = core::result::Result<T, E>;
