//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use blackspace_core::sim::{PuSpec, SuSpec};
use blackspace_core::{Point2D, SeedStream, SpatialParams};
use nalgebra::{DMatrix, DVector};

pub fn spatial(width: f64, height: f64, r_p: f64) -> SpatialParams {
    SpatialParams {
        lambda_s: 1e-4,
        lambda_p: 1e-4,
        r_p,
        region_width: width,
        region_height: height,
    }
}

fn wrap(d: f64, extent: f64) -> f64 {
    let d = d.abs();
    d.min(extent - d)
}

/// Guard-set relation by checking every pair.
pub fn all_pairs(pus: &[PuSpec], sus: &[SuSpec], s: &SpatialParams) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    for p in pus {
        for q in sus {
            let dx = wrap(p.pos.x - q.pos.x, s.region_width);
            let dy = wrap(p.pos.y - q.pos.y, s.region_height);
            if dx.hypot(dy) <= s.r_p {
                out.insert((p.id, q.id));
            }
        }
    }
    out
}

pub fn random_point(rng: &mut SeedStream, s: &SpatialParams) -> Point2D {
    Point2D {
        x: rng.uniform() * s.region_width,
        y: rng.uniform() * s.region_height,
    }
}

pub fn random_channel(rng: &mut SeedStream, n_channels: u32) -> Option<u32> {
    let k = rng.index(n_channels as usize + 1) as u32;
    (k > 0).then_some(k)
}

/// Stationary probability that an arrival waits, from the birth-death
/// generator of an M/M/C queue truncated at `cap` customers, solved by LU.
pub fn ctmc_wait_probability(lambda: f64, mu: f64, servers: usize, cap: usize) -> f64 {
    let n = cap + 1;
    let mut q = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        if k + 1 < n {
            q[(k, k + 1)] = lambda;
        }
        if k > 0 {
            q[(k, k - 1)] = mu * k.min(servers) as f64;
        }
        let out: f64 = (0..n).filter(|&j| j != k).map(|j| q[(k, j)]).sum();
        q[(k, k)] = -out;
    }
    // Solve πQ = 0 with the last balance equation replaced by Σπ = 1.
    let mut a = q.transpose();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b).expect("singular generator");
    // PASTA: arrivals see the stationary law.
    (servers..n).map(|k| pi[k]).sum()
}

/// Erlang C from the textbook factorial expression.
pub fn erlang_c_factorial(servers: u32, rho: f64) -> f64 {
    let c = servers as f64;
    let mut term = 1.0;
    let mut head = 1.0;
    for k in 1..servers {
        term *= rho / k as f64;
        head += term;
    }
    let tail = term * rho / c * c / (c - rho);
    tail / (head + tail)
}

/// Largest gap between an empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
