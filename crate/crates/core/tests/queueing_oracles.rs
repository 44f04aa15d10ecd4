mod support;

use blackspace_core::model::{pmf_sus_in_guard_zone, poisson_pmf};
use blackspace_core::queueing::{erlang_c, erlang_c_ln};
use blackspace_core::sim::simulate_mmc;
use blackspace_core::{QueueModel, ResponseTimeLaw};
use proptest::prelude::*;
use support::{ctmc_wait_probability, erlang_c_factorial, spatial};

#[test]
fn erlang_c_matches_ctmc() {
    for servers in 1..=8u64 {
        for load in [0.05, 0.3, 0.6, 0.85] {
            let rho = load * servers as f64;
            let oracle = ctmc_wait_probability(rho, 1.0, servers as usize, 600);
            let got = erlang_c(servers, rho).unwrap();
            assert!(
                (got - oracle).abs() < 1e-10,
                "C={servers} rho={rho}: {got} vs {oracle}"
            );
        }
    }
}

#[test]
fn erlang_c_matches_factorial_form() {
    for servers in 1..=30u32 {
        for load in [0.1, 0.5, 0.9, 0.99] {
            let rho = load * servers as f64;
            let a = erlang_c(servers as u64, rho).unwrap();
            let b = erlang_c_factorial(servers, rho);
            assert!(
                (a - b).abs() < 1e-12 * b.max(1e-300) + 1e-15,
                "C={servers} rho={rho}"
            );
        }
    }
}

#[test]
fn log_domain_survives_huge_pools() {
    let mut prev = f64::INFINITY;
    for servers in [10u64, 100, 1_000, 10_000, 100_000, 1_000_000] {
        let ln_p = erlang_c_ln(servers, 0.95 * servers as f64).unwrap();
        assert!(ln_p.is_finite() && ln_p <= 0.0);
        assert!(ln_p < prev);
        prev = ln_p;
    }
}

#[test]
fn simulated_two_server_queue_matches_closed_form() {
    // ρ = 1 on two servers: P_C = 1/3, E[T] = 1 + (1/3)/1.
    let stats = simulate_mmc(1.0, 1.0, 2, 1_000_000, 11);
    let law = ResponseTimeLaw::new(erlang_c(2, 1.0).unwrap(), 1.0, 1.0).unwrap();
    assert!(
        (stats.mean_response / law.mean() - 1.0).abs() < 0.02,
        "{stats:?}"
    );
    assert!((stats.wait_probability * 3.0 - 1.0).abs() < 0.02);
}

#[test]
fn simulated_wait_probability_matches_erlang_c() {
    for (servers, rho) in [(1u64, 0.5), (4, 3.0), (16, 12.0)] {
        let stats = simulate_mmc(rho, 1.0, servers, 1_000_000, 5 + servers);
        let p = erlang_c(servers, rho).unwrap();
        assert!(
            (stats.wait_probability / p - 1.0).abs() < 0.02,
            "C={servers}: {stats:?} vs {p}"
        );
    }
}

proptest! {
    #[test]
    fn erlang_c_is_a_probability(servers in 1u64..2000, load in 0.0f64..0.999) {
        let p = erlang_c(servers, load * servers as f64).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn erlang_c_grows_with_load(servers in 1u64..500, a in 0.01f64..0.99, b in 0.01f64..0.99) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let c = servers as f64;
        prop_assert!(erlang_c(servers, lo * c).unwrap() <= erlang_c(servers, hi * c).unwrap() + 1e-15);
    }

    #[test]
    fn erlang_c_falls_with_servers(servers in 1u64..500, rho in 0.01f64..0.99) {
        prop_assert!(erlang_c(servers + 1, rho).unwrap() <= erlang_c(servers, rho).unwrap() + 1e-15);
    }

    #[test]
    fn unstable_loads_are_rejected(servers in 1u64..1000, over in 1.0f64..5.0) {
        prop_assert!(erlang_c(servers, over * servers as f64).is_err());
        prop_assert!(!QueueModel::new(over * servers as f64, 1.0, servers).unwrap().is_stable());
    }

    #[test]
    fn response_mean_is_service_plus_wait(p in 0.0f64..1.0, mu in 0.001f64..10.0, extra in 0.001f64..10.0) {
        let law = ResponseTimeLaw::new(p, mu, extra).unwrap();
        prop_assert!((law.mean() - (1.0 / mu + p / extra)).abs() <= 1e-12 * law.mean());
        prop_assert!(law.cdf(0.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_pmf_sums_to_one(mean in 0.0f64..300.0) {
        let top = (mean + 12.0 * mean.sqrt() + 30.0) as i64;
        let total: f64 = (0..=top).map(|k| poisson_pmf(k, mean).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn guard_zone_pmf_has_poisson_mean(lambda in 1e-5f64..1e-2, r_p in 10.0f64..300.0) {
        let mut s = spatial(5000.0, 5000.0, r_p);
        s.lambda_s = lambda;
        let mean = lambda * std::f64::consts::PI * r_p * r_p;
        let top = (mean + 12.0 * mean.sqrt() + 30.0) as i64;
        let m: f64 = (0..=top).map(|k| k as f64 * pmf_sus_in_guard_zone(k, &s).unwrap()).sum();
        prop_assert!((m - mean).abs() < 1e-8 * mean.max(1.0));
    }
}
