//! The four spectrum-manager architectures, the summary table, real-time
//! verdicts and the centralization sweep.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::evac::{
    evacuation_distribution, mean_evacuation_delay, network_mean, protection_probability,
    sm_response_mean, EvalMode,
};
use crate::latency::{HandoverParams, NetworkParams, ServiceLaw, ServiceTimeParams};
use crate::math;
use crate::model::{
    expected_sus_in_guard_zone, ChannelPopularity, HutProfile, ProtectionRequirement,
    ScenarioParams, SpatialParams, TrafficParams, DEFAULT_MEAN_HOLDING_S, PRIME_TIME_HOUR,
};
use crate::queueing::QueueModel;
use crate::{Error, Result};

pub const FULLY_DISTRIBUTED: &str = "fully-distributed";
pub const REGIONAL: &str = "regional";
pub const NATIONAL: &str = "national";
pub const SEMI_NATIONAL: &str = "semi-national";

/// Average guard-zone secondary-user count assumed by the built-ins.
pub const GUARD_ZONE_SUS: f64 = 200.0;
pub const GUARD_RADIUS_M: f64 = 130.0;
/// Round trip within one city quoted in prose; the table lists 2 ms.
pub const CITY_RTT_TEXT_MS: f64 = 3.0;
pub const CITY_RTT_TABLE_MS: f64 = 2.0;
pub const COAST_RTT_MS: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct OutputOptions {
    pub format: ReportFormat,
    pub decimals: u8,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            format: ReportFormat::Csv,
            decimals: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ScenarioSuite {
    pub scenarios: Vec<ScenarioParams>,
    pub protection: ProtectionRequirement,
    #[cfg_attr(feature = "serde", serde(default))]
    pub output: OutputOptions,
}

impl ScenarioSuite {
    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for s in &self.scenarios {
            s.validate()?;
            if !names.insert(s.name.as_str()) {
                return Err(Error::DuplicateScenario(s.name.clone()));
            }
        }
        self.protection.validate()
    }

    pub fn get(&self, name: &str) -> Option<&ScenarioParams> {
        self.scenarios.iter().find(|s| s.name == name)
    }
}

/// τ that makes τ·E(n) equal the quoted mean response time.
pub fn tau_for_response(response_ms: f64, spatial: &SpatialParams) -> f64 {
    response_ms / expected_sus_in_guard_zone(spatial)
}

fn builtin(
    name: &str,
    processors: u64,
    tv_receivers: u64,
    secondary_links: u64,
    rtt_override: Option<f64>,
    distance_x: f64,
    query_ms: f64,
) -> ScenarioParams {
    let spatial = SpatialParams {
        lambda_s: SpatialParams::lambda_s_for_mean(GUARD_ZONE_SUS, GUARD_RADIUS_M),
        lambda_p: 1e-3,
        r_p: GUARD_RADIUS_M,
        region_width: 2000.0,
        region_height: 2000.0,
    };
    let traffic = TrafficParams {
        tv_receivers,
        secondary_links,
        mean_holding_s: DEFAULT_MEAN_HOLDING_S,
        hut: HutProfile::default(),
        n_channels: 20,
        p_evac: 0.1,
        channel_popularity: ChannelPopularity::Uniform,
    };
    let records_per_job = GUARD_ZONE_SUS;
    let response = query_ms * records_per_job * traffic.p_evac;
    let service = ServiceTimeParams {
        // One query scans the receiver table once per evacuated link.
        g: query_ms / tv_receivers.max(1) as f64,
        h: 1e-3,
        l_mean: 0.0,
        l_var: 0.0,
        tau: tau_for_response(response, &spatial),
        query_ms,
        records_per_job,
        law: ServiceLaw::Formula,
    };
    ScenarioParams {
        name: name.to_string(),
        spatial,
        traffic,
        protection: ProtectionRequirement::default(),
        processors,
        net: NetworkParams {
            fixed_rtt_override: rtt_override,
            ..NetworkParams::default()
        },
        handover: HandoverParams { f: 20.0, l_f: 20.0 },
        service,
        distance_x,
        report_interval: false,
    }
}

/// The four architectures with a shared 300 ms deadline.
pub fn builtin_scenarios() -> ScenarioSuite {
    let mut fully = builtin(
        FULLY_DISTRIBUTED,
        1,
        130,
        1,
        Some(CITY_RTT_TABLE_MS),
        0.0,
        0.5,
    );
    fully.report_interval = true;
    ScenarioSuite {
        scenarios: vec![
            fully,
            builtin(REGIONAL, 32, 1_120_000, 100_000, None, 0.0, 6.0),
            builtin(
                NATIONAL,
                100_000,
                45_000_000,
                4_000_000,
                Some(COAST_RTT_MS),
                1300.0,
                100.0,
            ),
            builtin(
                SEMI_NATIONAL,
                10_000,
                1_000_000,
                100_000,
                Some(COAST_RTT_MS),
                1300.0,
                6.0,
            ),
        ],
        protection: ProtectionRequirement {
            delta_max_ms: 300.0,
            o_max: 0.95,
        },
        output: OutputOptions::default(),
    }
}

/// The fully distributed scenario with the 3 ms city round trip quoted in prose.
pub fn fully_distributed_text_variant() -> ScenarioParams {
    let mut s = builtin(
        "fully-distributed-text",
        1,
        130,
        1,
        Some(CITY_RTT_TEXT_MS),
        0.0,
        0.5,
    );
    s.report_interval = true;
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Evacuation {
    Mean(f64),
    /// Handover support shifted by the network and response means.
    Interval {
        lo: f64,
        hi: f64,
    },
}

impl Evacuation {
    /// The value a deadline is checked against: the mean, or the interval's upper end.
    pub fn worst_case(&self) -> f64 {
        match self {
            Evacuation::Mean(v) => *v,
            Evacuation::Interval { hi, .. } => *hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RowStatus {
    Ok,
    Unstable { rho: f64, servers: u64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Table1Row {
    pub name: String,
    pub processors: u64,
    pub tv_receivers: u64,
    pub network_latency_ms: f64,
    pub sm_response_ms: Option<f64>,
    pub evacuation: Option<Evacuation>,
    pub mode: EvalMode,
    pub status: RowStatus,
}

pub fn table1_row(scn: &ScenarioParams, mode: EvalMode) -> Result<Table1Row> {
    let net = network_mean(scn)?;
    let (sm, status) = match sm_response_mean(scn, mode) {
        Ok(v) => (Some(v), RowStatus::Ok),
        Err(Error::Unstable { rho, servers }) => (None, RowStatus::Unstable { rho, servers }),
        Err(e) => return Err(e),
    };
    let evacuation = sm.map(|sm| {
        if scn.report_interval {
            let (lo, hi) = scn.handover.support();
            Evacuation::Interval {
                lo: net + sm + lo,
                hi: net + sm + hi,
            }
        } else {
            Evacuation::Mean(net + sm + scn.handover.mean())
        }
    });
    Ok(Table1Row {
        name: scn.name.clone(),
        processors: scn.processors,
        tv_receivers: scn.traffic.tv_receivers,
        network_latency_ms: net,
        sm_response_ms: sm,
        evacuation,
        mode,
        status,
    })
}

/// Summary rows for the built-in architectures.
pub fn reproduce_table1(mode: EvalMode) -> Result<Vec<Table1Row>> {
    table_rows(&builtin_scenarios().scenarios, mode)
}

pub fn table_rows(scenarios: &[ScenarioParams], mode: EvalMode) -> Result<Vec<Table1Row>> {
    scenarios.iter().map(|s| table1_row(s, mode)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum VerdictBasis {
    Mean { value_ms: f64 },
    IntervalUpper { value_ms: f64 },
    Probability { probability: f64, o_max: f64 },
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub delta_max_ms: f64,
    pub basis: VerdictBasis,
}

/// Deadline check on the mean (or interval upper end) of each row.
pub fn check_realtime(rows: &[Table1Row], req: &ProtectionRequirement) -> Vec<Verdict> {
    rows.iter()
        .map(|row| {
            let basis = match row.evacuation {
                Some(Evacuation::Mean(v)) => VerdictBasis::Mean { value_ms: v },
                Some(Evacuation::Interval { hi, .. }) => {
                    VerdictBasis::IntervalUpper { value_ms: hi }
                }
                None => VerdictBasis::Unstable,
            };
            let pass = row
                .evacuation
                .is_some_and(|e| e.worst_case() <= req.delta_max_ms);
            Verdict {
                name: row.name.clone(),
                pass,
                delta_max_ms: req.delta_max_ms,
                basis,
            }
        })
        .collect()
}

/// Deadline check on Pr(t_E ≤ Δmax) ≥ Omax using the composed distribution.
pub fn check_realtime_distributional(
    scenarios: &[ScenarioParams],
    req: &ProtectionRequirement,
    mode: EvalMode,
) -> Result<Vec<Verdict>> {
    scenarios
        .iter()
        .map(|scn| {
            let basis = match evacuation_distribution(scn, mode) {
                Ok(d) => VerdictBasis::Probability {
                    probability: protection_probability(&d, req),
                    o_max: req.o_max,
                },
                Err(Error::Unstable { .. }) => VerdictBasis::Unstable,
                Err(e) => return Err(e),
            };
            let pass = matches!(basis, VerdictBasis::Probability { probability, o_max } if probability >= o_max);
            Ok(Verdict {
                name: scn.name.clone(),
                pass,
                delta_max_ms: req.delta_max_ms,
                basis,
            })
        })
        .collect()
}

/// Per-query database time as a function of the receivers one manager holds.
///
/// Flat below the first anchor, power-law (linear in log–log) between anchors
/// and beyond the last one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct QueryTimeModel {
    /// (records, ms) with strictly increasing records and nondecreasing times.
    pub anchors: Vec<(f64, f64)>,
}

impl Default for QueryTimeModel {
    fn default() -> Self {
        Self {
            anchors: vec![(1e6, 6.0), (45e6, 100.0)],
        }
    }
}

impl QueryTimeModel {
    pub fn validate(&self) -> Result<()> {
        if self.anchors.is_empty() {
            return Err(Error::Empty("query-time anchors"));
        }
        for w in self.anchors.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 >= w[0].1) {
                return Err(Error::invalid(
                    "anchors",
                    "records must increase and times must not decrease",
                ));
            }
        }
        if self.anchors.iter().any(|&(r, t)| !(r > 0.0 && t > 0.0)) {
            return Err(Error::invalid(
                "anchors",
                "records and times must be positive",
            ));
        }
        Ok(())
    }

    pub fn query_ms(&self, records: f64) -> f64 {
        let a = &self.anchors;
        if records <= a[0].0 || a.len() == 1 {
            return a[0].1;
        }
        let i = a
            .windows(2)
            .position(|w| records <= w[1].0)
            .unwrap_or(a.len() - 2);
        let ((r0, t0), (r1, t1)) = (a[i], a[i + 1]);
        let slope = math::ln(t1 / t0) / math::ln(r1 / r0);
        t0 * math::exp(slope * math::ln(records / r0))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SweepPoint {
    pub tv_receivers: u64,
    pub query_ms: f64,
    pub sm_response_ms: Option<f64>,
    pub mean_evacuation_ms: Option<f64>,
    pub protection_probability: Option<f64>,
    pub rho: f64,
    pub stable: bool,
}

/// `base` with M and the database timings rescaled to `tv_receivers`.
pub fn scale_scenario(
    base: &ScenarioParams,
    tv_receivers: u64,
    model: &QueryTimeModel,
) -> ScenarioParams {
    let mut scn = base.clone();
    let query_ms = model.query_ms(tv_receivers as f64);
    scn.traffic.tv_receivers = tv_receivers;
    scn.service.query_ms = query_ms;
    scn.service.g = query_ms / tv_receivers.max(1) as f64;
    let response = query_ms * scn.service.records_per_job * scn.traffic.p_evac;
    scn.service.tau = tau_for_response(response, &scn.spatial);
    scn
}

/// Mean evacuation delay and protection probability as one manager takes on
/// more receivers.
pub fn sweep_centralization(
    base: &ScenarioParams,
    manager_sizes: &[u64],
    mode: EvalMode,
    req: &ProtectionRequirement,
    model: &QueryTimeModel,
) -> Result<Vec<SweepPoint>> {
    model.validate()?;
    if manager_sizes.contains(&0) {
        return Err(Error::invalid("manager_sizes", "sizes must be positive"));
    }
    manager_sizes
        .iter()
        .map(|&size| {
            let scn = scale_scenario(base, size, model);
            let rho = QueueModel::for_scenario(&scn, PRIME_TIME_HOUR)
                .map(|q| q.rho())
                .unwrap_or(f64::NAN);
            let (sm, mean, protection, stable) = match mean_evacuation_delay(&scn, mode) {
                Ok(mean) => {
                    let d = evacuation_distribution(&scn, mode)?;
                    (
                        Some(sm_response_mean(&scn, mode)?),
                        Some(mean),
                        Some(protection_probability(&d, req)),
                        true,
                    )
                }
                Err(Error::Unstable { .. }) => (None, None, None, false),
                Err(e) => return Err(e),
            };
            Ok(SweepPoint {
                tv_receivers: size,
                query_ms: scn.service.query_ms,
                sm_response_ms: sm,
                mean_evacuation_ms: mean,
                protection_probability: protection,
                rho,
                stable,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row<'a>(rows: &'a [Table1Row], name: &str) -> &'a Table1Row {
        rows.iter().find(|r| r.name == name).unwrap()
    }

    #[test]
    fn builtin_suite_shape() {
        let suite = builtin_scenarios();
        suite.validate().unwrap();
        let regional = suite.get(REGIONAL).unwrap();
        assert_eq!(regional.processors, 32);
        assert_eq!(regional.traffic.tv_receivers, 1_120_000);
        let semi = suite.get(SEMI_NATIONAL).unwrap();
        assert_eq!(semi.traffic.tv_receivers, 1_000_000);
        assert_eq!(semi.processors, 10_000);
        let national = suite.get(NATIONAL).unwrap();
        assert_eq!(national.processors, 100_000);
        assert!((sm_response_mean(national, EvalMode::Simple).unwrap() - 2000.0).abs() < 1e-9);
        let fully = suite.get(FULLY_DISTRIBUTED).unwrap();
        assert!(fully.traffic.tv_receivers <= 130);
        assert_eq!(fully.processors, 1);
        for s in &suite.scenarios {
            assert_eq!(s.spatial.r_p, 130.0);
            assert_eq!(s.traffic.p_evac, 0.1);
            assert_eq!(s.handover.support(), (20.0, 40.0));
            assert!((expected_sus_in_guard_zone(&s.spatial) - 200.0).abs() < 1e-9);
        }
    }

    #[test]
    fn regional_tau_gives_120_ms() {
        let suite = builtin_scenarios();
        let regional = suite.get(REGIONAL).unwrap();
        assert!((regional.service.tau - 0.6).abs() < 1e-12);
        let mu = crate::queueing::service_rate(&regional.service, &regional.spatial).unwrap();
        assert!((mu - 1000.0 / 120.0).abs() < 1e-9);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut suite = builtin_scenarios();
        suite.scenarios.push(suite.scenarios[0].clone());
        assert!(matches!(suite.validate(), Err(Error::DuplicateScenario(_))));
    }

    #[test]
    fn simple_table() {
        let rows = reproduce_table1(EvalMode::Simple).unwrap();
        assert_eq!(rows.len(), 4);
        let v = |n| row(&rows, n).evacuation.unwrap();
        assert!((v(REGIONAL).worst_case() - 154.862).abs() < 1e-9);
        assert!((v(NATIONAL).worst_case() - 2055.0).abs() < 1e-9);
        assert!((v(SEMI_NATIONAL).worst_case() - 175.0).abs() < 1e-9);
        assert_eq!(
            v(FULLY_DISTRIBUTED),
            Evacuation::Interval { lo: 32.0, hi: 52.0 }
        );
        let text = table1_row(&fully_distributed_text_variant(), EvalMode::Simple).unwrap();
        assert_eq!(
            text.evacuation,
            Some(Evacuation::Interval { lo: 33.0, hi: 53.0 })
        );
        for r in &rows {
            let e = r.evacuation.unwrap();
            let lower = match e {
                Evacuation::Mean(v) => v,
                Evacuation::Interval { lo, .. } => lo,
            };
            assert!(lower >= r.network_latency_ms + 20.0);
        }
    }

    #[test]
    fn queueing_table_flags_overload() {
        let rows = reproduce_table1(EvalMode::Queueing).unwrap();
        // 1120 jobs/s against 32 servers at 120 ms each.
        let regional = row(&rows, REGIONAL);
        assert!(matches!(
            regional.status,
            RowStatus::Unstable { servers: 32, .. }
        ));
        assert!(regional.evacuation.is_none());
        let semi = row(&rows, SEMI_NATIONAL);
        assert_eq!(semi.status, RowStatus::Ok);
        assert!((semi.sm_response_ms.unwrap() - 120.0).abs() < 1e-6);
    }

    #[test]
    fn verdicts_follow_deadline() {
        let rows = reproduce_table1(EvalMode::Simple).unwrap();
        let req = ProtectionRequirement::new(300.0, 0.95).unwrap();
        let verdicts = check_realtime(&rows, &req);
        let pass = |n: &str| verdicts.iter().find(|v| v.name == n).unwrap().pass;
        assert!(pass(FULLY_DISTRIBUTED) && pass(REGIONAL) && pass(SEMI_NATIONAL));
        assert!(!pass(NATIONAL));
        let strict = ProtectionRequirement::new(200.0, 0.95).unwrap();
        let verdicts = check_realtime(&rows, &strict);
        assert!(
            verdicts
                .iter()
                .find(|v| v.name == SEMI_NATIONAL)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn relaxing_deadline_never_flips_to_fail() {
        let rows = reproduce_table1(EvalMode::Simple).unwrap();
        let mut prev: Option<Vec<bool>> = None;
        for d in (10..3000).step_by(10) {
            let req = ProtectionRequirement::new(d as f64, 0.95).unwrap();
            let now: Vec<bool> = check_realtime(&rows, &req).iter().map(|v| v.pass).collect();
            if let Some(p) = prev {
                assert!(p.iter().zip(&now).all(|(a, b)| !a || *b));
            }
            prev = Some(now);
        }
    }

    #[test]
    fn distributional_verdicts() {
        let suite = builtin_scenarios();
        let verdicts =
            check_realtime_distributional(&suite.scenarios, &suite.protection, EvalMode::Simple)
                .unwrap();
        let get = |n: &str| verdicts.iter().find(|v| v.name == n).unwrap();
        assert!(get(REGIONAL).pass);
        assert!(!get(NATIONAL).pass);
        let verdicts =
            check_realtime_distributional(&suite.scenarios, &suite.protection, EvalMode::Queueing)
                .unwrap();
        let get = |n: &str| verdicts.iter().find(|v| v.name == n).unwrap();
        assert_eq!(get(REGIONAL).basis, VerdictBasis::Unstable);
        assert!(!get(REGIONAL).pass);
    }

    #[test]
    fn query_time_model_anchors() {
        let m = QueryTimeModel::default();
        assert_eq!(m.query_ms(1_000.0), 6.0);
        assert_eq!(m.query_ms(1e6), 6.0);
        assert!((m.query_ms(45e6) - 100.0).abs() < 1e-9);
        let mut prev = 0.0;
        for k in 0..100 {
            let q = m.query_ms(1e5 * 1.1f64.powi(k));
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn sweep_reproduces_rows() {
        let suite = builtin_scenarios();
        let semi = suite.get(SEMI_NATIONAL).unwrap();
        let req = suite.protection;
        let model = QueryTimeModel::default();
        let pts = sweep_centralization(semi, &[1_000_000], EvalMode::Simple, &req, &model).unwrap();
        assert!(
            (pts[0].mean_evacuation_ms.unwrap()
                - mean_evacuation_delay(semi, EvalMode::Simple).unwrap())
            .abs()
                < 1e-9
        );
        let pts =
            sweep_centralization(semi, &[45_000_000], EvalMode::Simple, &req, &model).unwrap();
        assert!((pts[0].mean_evacuation_ms.unwrap() - 2055.0).abs() < 1e-6);
        assert!((pts[0].sm_response_ms.unwrap() - 2000.0).abs() < 1e-6);
        assert!(sweep_centralization(semi, &[0], EvalMode::Simple, &req, &model).is_err());
    }

    #[test]
    fn sweep_response_is_monotone() {
        let suite = builtin_scenarios();
        let semi = suite.get(SEMI_NATIONAL).unwrap();
        let sizes: Vec<u64> = (0..12).map(|k| 250_000u64 << k).collect();
        let pts = sweep_centralization(
            semi,
            &sizes,
            EvalMode::Simple,
            &suite.protection,
            &QueryTimeModel::default(),
        )
        .unwrap();
        for w in pts.windows(2) {
            assert!(w[1].sm_response_ms.unwrap() >= w[0].sm_response_ms.unwrap());
            assert!(
                w[1].protection_probability.unwrap()
                    <= w[0].protection_probability.unwrap() + 1e-12
            );
        }
    }

    #[test]
    fn sweep_flags_instability_in_queueing_mode() {
        let suite = builtin_scenarios();
        let regional = suite.get(REGIONAL).unwrap();
        let pts = sweep_centralization(
            regional,
            &[10_000, 1_120_000],
            EvalMode::Queueing,
            &suite.protection,
            &QueryTimeModel::default(),
        )
        .unwrap();
        assert!(pts[0].stable);
        assert!(!pts[1].stable);
        assert!(pts[1].mean_evacuation_ms.is_none());
    }
}
