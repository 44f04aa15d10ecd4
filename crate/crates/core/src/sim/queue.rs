//! First-come-first-served multi-server queue.

use alloc::collections::BinaryHeap;
use core::cmp::Reverse;

use crate::math;
use crate::rng::SeedStream;

/// C identical servers taking jobs strictly in arrival order.
///
/// Jobs must be offered in nondecreasing arrival order; each one starts on the
/// server that frees up first.
#[derive(Debug, Clone)]
pub struct FifoServerPool {
    // Free-at times as raw bits; nonnegative f64 bit patterns order like the values.
    free_at: BinaryHeap<Reverse<(u64, u32)>>,
    servers: u64,
    busy_ms: f64,
    last_finish: f64,
}

/// Timing of one served job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Served {
    pub start: f64,
    pub finish: f64,
    pub server: u32,
}

impl FifoServerPool {
    pub fn new(servers: u64) -> Self {
        assert!(servers >= 1, "at least one server");
        let free_at = (0..servers)
            .map(|s| Reverse((0f64.to_bits(), s as u32)))
            .collect();
        Self {
            free_at,
            servers,
            busy_ms: 0.0,
            last_finish: 0.0,
        }
    }

    /// Earliest time a server is free.
    pub fn next_free(&self) -> f64 {
        f64::from_bits(self.free_at.peek().expect("pool is never empty").0 .0)
    }

    /// Start time a job arriving at `arrival` would get.
    pub fn start_time(&self, arrival: f64) -> f64 {
        arrival.max(self.next_free())
    }

    pub fn serve(&mut self, arrival: f64, service: f64) -> Served {
        let Reverse((bits, server)) = self.free_at.pop().expect("pool is never empty");
        let start = arrival.max(f64::from_bits(bits));
        let finish = start + service;
        self.free_at.push(Reverse((finish.to_bits(), server)));
        self.busy_ms += service;
        self.last_finish = self.last_finish.max(finish);
        Served {
            start,
            finish,
            server,
        }
    }

    pub fn servers(&self) -> u64 {
        self.servers
    }

    pub fn busy_ms(&self) -> f64 {
        self.busy_ms
    }

    pub fn last_finish(&self) -> f64 {
        self.last_finish
    }
}

/// Summary of a plain M/M/C run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmcStats {
    pub jobs: u64,
    pub mean_response: f64,
    pub mean_wait: f64,
    pub wait_probability: f64,
}

/// Discrete-event M/M/C run: Poisson arrivals at `lambda`, exponential service
/// at `mu` per server (both per ms), FIFO, `jobs` jobs starting empty.
pub fn simulate_mmc(lambda: f64, mu: f64, servers: u64, jobs: u64, seed: u64) -> MmcStats {
    let mut arrivals = SeedStream::with_stream(seed, 1);
    let mut services = SeedStream::with_stream(seed, 2);
    let mut pool = FifoServerPool::new(servers);
    let (mut t, mut response, mut wait, mut waited) = (0.0, 0.0, 0.0, 0u64);
    for _ in 0..jobs {
        t += -math::ln(arrivals.uniform_open0()) / lambda;
        let service = -math::ln(services.uniform_open0()) / mu;
        let served = pool.serve(t, service);
        let w = served.start - t;
        if w > 0.0 {
            waited += 1;
        }
        wait += w;
        response += served.finish - t;
    }
    let n = jobs as f64;
    MmcStats {
        jobs,
        mean_response: response / n,
        mean_wait: wait / n,
        wait_probability: waited as f64 / n,
    }
}
