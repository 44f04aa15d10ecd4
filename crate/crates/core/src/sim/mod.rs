//! Seeded discrete-event simulation of the zap → evacuation pipeline.
//!
//! One replication is single-threaded and fully determined by the scenario,
//! the options and the seed. Replications keyed by
//! [`derive_seed`](crate::rng::derive_seed) can run in parallel and be merged
//! with [`SimReport::merge`].

pub mod db;
mod engine;
pub mod queue;
mod report;
pub mod stream;

pub use db::{build_interference_db, InterferenceDb, PuId, PuSpec, SuId, SuSpec};
pub use engine::{run_simulation, run_simulation_with, Population, SimOptions};
pub use queue::{simulate_mmc, FifoServerPool, MmcStats};
pub use report::{EvacComponents, SimReport, SimSummary};
pub use stream::{generate_zapping_stream, ChannelSampler, ZappingEvent};
