//! Command-line surface of the `blackspace` binary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blackspace_core::distribution::GridSpec;
use blackspace_core::evac::{delay_percentile, evacuation_distribution, protection_probability};
use blackspace_core::model::{ProtectionRequirement, ScenarioParams};
use blackspace_core::scenarios::{
    builtin_scenarios, check_realtime, check_realtime_distributional, sweep_centralization,
    table_rows, QueryTimeModel, ReportFormat, RowStatus, ScenarioSuite, Table1Row,
};
use blackspace_core::sim::SimOptions;
use blackspace_core::{compose_with, evacuation_components, EvalMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::replicate::run_replications;
use crate::report::{
    distribution_table, emit_report, samples_table, simulation_table, sweep_table, table1_table,
    verdict_table,
};
use crate::scenario_file::{load_suite, save_suite, suite_to_json};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "blackspace",
    version,
    about = "Channel-evacuation delay analysis for TV black-space spectrum managers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Simple,
    Queueing,
}

impl From<ModeArg> for EvalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simple => EvalMode::Simple,
            ModeArg::Queueing => EvalMode::Queueing,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerdictArg {
    /// Mean (or interval upper end) against the deadline.
    Mean,
    /// Pr(t_E ≤ deadline) against the required probability.
    Probability,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (JSON suite or single scenario); built-ins when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Deadline {
    /// Deadline in ms; the suite's requirement when omitted.
    #[arg(long)]
    pub deadline: Option<f64>,
    /// Required probability of meeting the deadline.
    #[arg(long)]
    pub o_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary table of every scenario with its deadline verdict.
    Table1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "simple")]
        mode: ModeArg,
        #[command(flatten)]
        deadline: Deadline,
        #[arg(long, value_enum, default_value = "mean")]
        verdict: VerdictArg,
        /// Exit with status 2 when any scenario's queue is overloaded.
        #[arg(long)]
        require_stable: bool,
    },
    /// Deadline verdicts only.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "simple")]
        mode: ModeArg,
        #[command(flatten)]
        deadline: Deadline,
        #[arg(long, value_enum, default_value = "mean")]
        verdict: VerdictArg,
    },
    /// Discrete-event simulation of the zapping, queueing and evacuation pipeline.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Scenarios to run (repeatable); all when omitted.
        #[arg(long)]
        name: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Simulated seconds per replication.
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        /// Hour of day at simulation start.
        #[arg(long, default_value_t = 20.0)]
        start_hour: f64,
        /// Also write every evacuation sample with its components (one scenario only).
        #[arg(long)]
        samples_csv: Option<PathBuf>,
    },
    /// Mean delay and protection probability against spectrum-manager size.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Base scenario; the first in the suite when omitted.
        #[arg(long)]
        name: Option<String>,
        /// Receivers per spectrum manager, comma separated (1e6 notation accepted).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<f64>,
        #[arg(long, value_enum, default_value = "simple")]
        mode: ModeArg,
        #[command(flatten)]
        deadline: Deadline,
        #[arg(long)]
        require_stable: bool,
    },
    /// Composed evacuation-delay distribution on a grid.
    Compose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        name: String,
        #[arg(long, value_enum, default_value = "queueing")]
        mode: ModeArg,
        /// Grid step in ms.
        #[arg(long)]
        step: Option<f64>,
        /// Cumulative probability instead of density.
        #[arg(long)]
        cumulative: bool,
    },
    /// Write the built-in scenarios as a scenario file.
    ExportScenarios {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: Option<&Path>) -> Result<ScenarioSuite> {
    match path {
        Some(p) => load_suite(p),
        None => Ok(builtin_scenarios()),
    }
}

fn format_of(common: &Common, suite: &ScenarioSuite) -> ReportFormat {
    match common.format {
        Some(FormatArg::Csv) => ReportFormat::Csv,
        Some(FormatArg::Json) => ReportFormat::Json,
        None => suite.output.format,
    }
}

fn requirement(d: &Deadline, suite: &ScenarioSuite) -> Result<ProtectionRequirement> {
    Ok(ProtectionRequirement::new(
        d.deadline.unwrap_or(suite.protection.delta_max_ms),
        d.o_max.unwrap_or(suite.protection.o_max),
    )?)
}

fn find<'a>(suite: &'a ScenarioSuite, name: &str) -> Result<&'a ScenarioParams> {
    suite
        .get(name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

fn first_unstable(rows: &[Table1Row]) -> Option<Error> {
    rows.iter().find_map(|r| match r.status {
        RowStatus::Unstable { rho, servers } => {
            Some(blackspace_core::Error::Unstable { rho, servers }.into())
        }
        RowStatus::Ok => None,
    })
}

fn verdicts(
    suite: &ScenarioSuite,
    rows: &[Table1Row],
    req: &ProtectionRequirement,
    mode: EvalMode,
    kind: VerdictArg,
) -> Result<Vec<blackspace_core::scenarios::Verdict>> {
    Ok(match kind {
        VerdictArg::Mean => check_realtime(rows, req),
        VerdictArg::Probability => check_realtime_distributional(&suite.scenarios, req, mode)?,
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table1 {
            common,
            mode,
            deadline,
            verdict,
            require_stable,
        } => {
            let suite = load(common.scenario.as_deref())?;
            let req = requirement(&deadline, &suite)?;
            let rows = table_rows(&suite.scenarios, mode.into())?;
            if require_stable {
                if let Some(e) = first_unstable(&rows) {
                    return Err(e);
                }
            }
            let v = verdicts(&suite, &rows, &req, mode.into(), verdict)?;
            emit_report(
                &table1_table(&rows, Some(&v)),
                format_of(&common, &suite),
                common.out.as_deref(),
            )
        }
        Command::Check {
            common,
            mode,
            deadline,
            verdict,
        } => {
            let suite = load(common.scenario.as_deref())?;
            let req = requirement(&deadline, &suite)?;
            let rows = table_rows(&suite.scenarios, mode.into())?;
            let v = verdicts(&suite, &rows, &req, mode.into(), verdict)?;
            emit_report(
                &verdict_table(&v),
                format_of(&common, &suite),
                common.out.as_deref(),
            )
        }
        Command::Simulate {
            common,
            name,
            seed,
            duration,
            reps,
            start_hour,
            samples_csv,
        } => {
            let suite = load(common.scenario.as_deref())?;
            let selected: Vec<&ScenarioParams> = if name.is_empty() {
                suite.scenarios.iter().collect()
            } else {
                name.iter()
                    .map(|n| find(&suite, n))
                    .collect::<Result<_>>()?
            };
            if samples_csv.is_some() && selected.len() != 1 {
                return Err(blackspace_core::Error::invalid(
                    "samples-csv",
                    "needs exactly one scenario (use --name)",
                )
                .into());
            }
            let opts = SimOptions {
                start_hour,
                ..SimOptions::new(duration, seed)
            };
            let reports = selected
                .iter()
                .map(|scn| run_replications(scn, &opts, reps))
                .collect::<Result<Vec<_>>>()?;
            if let Some(path) = samples_csv {
                emit_report(&samples_table(&reports[0]), ReportFormat::Csv, Some(&path))?;
            }
            emit_report(
                &simulation_table(&reports),
                format_of(&common, &suite),
                common.out.as_deref(),
            )
        }
        Command::Sweep {
            common,
            name,
            sizes,
            mode,
            deadline,
            require_stable,
        } => {
            let suite = load(common.scenario.as_deref())?;
            let req = requirement(&deadline, &suite)?;
            let base = match &name {
                Some(n) => find(&suite, n)?,
                None => suite.scenarios.first().ok_or(Error::EmptyReport)?,
            };
            let sizes = sizes
                .iter()
                .map(|&s| {
                    if s.is_finite() && s >= 1.0 && s.fract() == 0.0 && s <= u64::MAX as f64 {
                        Ok(s as u64)
                    } else {
                        Err(blackspace_core::Error::invalid(
                            "sizes",
                            format!("`{s}` is not a positive whole number"),
                        ))
                    }
                })
                .collect::<Result<Vec<u64>, _>>()?;
            let points =
                sweep_centralization(base, &sizes, mode.into(), &req, &QueryTimeModel::default())?;
            if require_stable {
                if let Some(p) = points.iter().find(|p| !p.stable) {
                    return Err(blackspace_core::Error::Unstable {
                        rho: p.rho,
                        servers: base.processors,
                    }
                    .into());
                }
            }
            emit_report(
                &sweep_table(&points),
                format_of(&common, &suite),
                common.out.as_deref(),
            )
        }
        Command::Compose {
            common,
            name,
            mode,
            step,
            cumulative,
        } => {
            let suite = load(common.scenario.as_deref())?;
            let scn = find(&suite, &name)?;
            let d = match step {
                None => evacuation_distribution(scn, mode.into())?,
                Some(step_ms) => {
                    let parts = evacuation_components(scn, mode.into())?;
                    let mean: f64 = parts.iter().map(|p| p.mean()).sum();
                    let spec = GridSpec {
                        step_ms,
                        ..GridSpec::for_mean(mean)
                    };
                    spec.validate()?;
                    compose_with(&[&parts[0], &parts[1], &parts[2]], Some(spec))?
                }
            };
            let grid = match d.as_grid() {
                Some(g) => g.clone(),
                None => d.to_grid(&GridSpec::for_mean(d.mean()))?,
            };
            eprintln!(
                "{}: mean {:.3} ms, p95 {:.3} ms, Pr(t_E <= {:.3} ms) = {:.6}",
                scn.name,
                d.mean(),
                delay_percentile(&d, 0.95)?,
                suite.protection.delta_max_ms,
                protection_probability(&d, &suite.protection),
            );
            emit_report(
                &distribution_table(&grid, cumulative),
                format_of(&common, &suite),
                common.out.as_deref(),
            )
        }
        Command::ExportScenarios { out } => {
            let suite = builtin_scenarios();
            match out {
                Some(p) => save_suite(&p, &suite),
                None => {
                    print!("{}", suite_to_json(&suite));
                    Ok(())
                }
            }
        }
    }
}

/// 0 on success, 2 when a required-stable queue is overloaded, 1 otherwise.
pub fn exit_code(result: &Result<()>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_instability() => ExitCode::from(2),
        Err(_) => ExitCode::from(1),
    }
}
