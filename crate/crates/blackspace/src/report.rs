//! CSV and JSON reports with a fixed column order and fixed decimals.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use blackspace_core::distribution::GridPdf;
use blackspace_core::scenarios::{
    Evacuation, ReportFormat, RowStatus, SweepPoint, Table1Row, Verdict, VerdictBasis,
};
use blackspace_core::sim::SimReport;

use crate::{Error, Result};

pub const DECIMALS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(Some(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Rows sharing one header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

fn number(v: f64, decimals: usize) -> Option<String> {
    if !v.is_finite() {
        return None;
    }
    let s = format!("{v:.decimals$}");
    // -0.000 and 0.000 are the same cell.
    Some(
        if s.trim_start_matches('-')
            .bytes()
            .all(|b| b == b'0' || b == b'.')
        {
            s.trim_start_matches('-').to_string()
        } else {
            s
        },
    )
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => v.and_then(|v| number(v, DECIMALS)).unwrap_or_default(),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => csv_field(s),
                    Cell::Bool(b) => b.to_string(),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// An array of objects, one per line, keys in column order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("  {");
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let value = match cell {
                    Cell::Num(v) => v
                        .and_then(|v| number(v, DECIMALS))
                        .unwrap_or_else(|| "null".into()),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => json_string(s),
                    Cell::Bool(b) => b.to_string(),
                };
                let _ = write!(out, "{}: {value}", json_string(col));
            }
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        if self.is_empty() {
            return Err(Error::EmptyReport);
        }
        Ok(match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        })
    }
}

/// Writes the table to `path`, or to stdout when `path` is `None`.
pub fn emit_report(table: &Table, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    let text = table.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn status_cells(status: &RowStatus) -> (Cell, Cell) {
    match *status {
        RowStatus::Ok => ("ok".into(), Cell::Num(None)),
        RowStatus::Unstable { rho, .. } => ("unstable".into(), rho.into()),
    }
}

/// Summary rows, with the deadline verdict alongside when given.
pub fn table1_table(rows: &[Table1Row], verdicts: Option<&[Verdict]>) -> Table {
    let mut t = Table::new(vec![
        "name",
        "processors",
        "tv_receivers",
        "network_latency_ms",
        "sm_response_ms",
        "evacuation_ms",
        "evacuation_lo_ms",
        "evacuation_hi_ms",
        "mode",
        "status",
        "rho",
        "deadline_ms",
        "meets_deadline",
    ]);
    for (i, r) in rows.iter().enumerate() {
        let (mean, lo, hi) = match r.evacuation {
            Some(Evacuation::Mean(v)) => (Some(v), None, None),
            Some(Evacuation::Interval { lo, hi }) => (None, Some(lo), Some(hi)),
            None => (None, None, None),
        };
        let (status, rho) = status_cells(&r.status);
        let verdict = verdicts.and_then(|v| v.get(i));
        t.push(vec![
            r.name.clone().into(),
            r.processors.into(),
            r.tv_receivers.into(),
            r.network_latency_ms.into(),
            r.sm_response_ms.into(),
            mean.into(),
            lo.into(),
            hi.into(),
            r.mode.to_string().into(),
            status,
            rho,
            verdict.map(|v| v.delta_max_ms).into(),
            verdict.map_or(Cell::Text(String::new()), |v| v.pass.into()),
        ]);
    }
    t
}

pub fn verdict_table(verdicts: &[Verdict]) -> Table {
    let mut t = Table::new(vec![
        "name",
        "deadline_ms",
        "basis",
        "value",
        "o_max",
        "pass",
    ]);
    for v in verdicts {
        let (basis, value, o_max) = match v.basis {
            VerdictBasis::Mean { value_ms } => ("mean", Some(value_ms), None),
            VerdictBasis::IntervalUpper { value_ms } => ("interval_upper", Some(value_ms), None),
            VerdictBasis::Probability { probability, o_max } => {
                ("probability", Some(probability), Some(o_max))
            }
            VerdictBasis::Unstable => ("unstable", None, None),
        };
        t.push(vec![
            v.name.clone().into(),
            v.delta_max_ms.into(),
            basis.into(),
            value.into(),
            o_max.into(),
            v.pass.into(),
        ]);
    }
    t
}

pub fn sweep_table(points: &[SweepPoint]) -> Table {
    let mut t = Table::new(vec![
        "tv_receivers",
        "query_ms",
        "rho",
        "stable",
        "sm_response_ms",
        "mean_evacuation_ms",
        "protection_probability",
    ]);
    for p in points {
        t.push(vec![
            p.tv_receivers.into(),
            p.query_ms.into(),
            p.rho.into(),
            p.stable.into(),
            p.sm_response_ms.into(),
            p.mean_evacuation_ms.into(),
            p.protection_probability.into(),
        ]);
    }
    t
}

/// One row per (merged) simulation report.
pub fn simulation_table(reports: &[SimReport]) -> Table {
    let mut t = Table::new(vec![
        "scenario",
        "seed",
        "replications",
        "duration_s",
        "servers",
        "jobs",
        "evacuations",
        "blocked",
        "mean_ms",
        "p50_ms",
        "p95_ms",
        "p99_ms",
        "max_ms",
        "mean_wait_ms",
        "mean_response_ms",
        "wait_probability",
        "busy_fraction",
        "max_backlog",
        "deadline_ms",
        "protection_probability",
        "clamp_possible",
    ]);
    for r in reports {
        let s = r.summary();
        t.push(vec![
            r.scenario.clone().into(),
            r.seed.into(),
            u64::from(r.replications).into(),
            r.duration_s.into(),
            r.servers.into(),
            r.jobs_processed.into(),
            r.evacuations.into(),
            r.blocked.into(),
            s.mean_ms.into(),
            s.p50_ms.into(),
            s.p95_ms.into(),
            s.p99_ms.into(),
            s.max_ms.into(),
            s.mean_wait_ms.into(),
            s.mean_response_ms.into(),
            r.wait_probability.into(),
            r.busy_fraction.into(),
            r.max_backlog.into(),
            r.delta_max_ms.into(),
            s.protection_probability.into(),
            r.clamp_possible.into(),
        ]);
    }
    t
}

/// Per-evacuation samples with their components.
pub fn samples_table(report: &SimReport) -> Table {
    let mut t = Table::new(vec![
        "evacuation_ms",
        "net_in_ms",
        "wait_ms",
        "service_ms",
        "net_out_ms",
        "handover_ms",
    ]);
    for (c, &total) in report.components.iter().zip(&report.evacuation_samples) {
        t.push(vec![
            total.into(),
            c.net_in.into(),
            c.wait.into(),
            c.service.into(),
            c.net_out.into(),
            c.handover.into(),
        ]);
    }
    t
}

/// Grid nodes with density (per ms) or cumulative probability.
pub fn distribution_table(grid: &GridPdf, cumulative: bool) -> Table {
    let mut t = Table::new(vec![
        "time_ms",
        if cumulative { "cumulative" } else { "density" },
    ]);
    for (x, density, cdf) in grid.rows() {
        t.push(vec![
            x.into(),
            if cumulative { cdf } else { density }.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use blackspace_core::scenarios::{check_realtime, reproduce_table1};
    use blackspace_core::EvalMode;

    #[test]
    fn table1_csv_has_header_and_four_rows() {
        let rows = reproduce_table1(EvalMode::Simple).unwrap();
        let csv = table1_table(&rows, None).render(ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("name,processors,tv_receivers"));
        assert!(csv.contains("regional,32,1120000,4.862,120.000,154.862,,,simple,ok,,,"));
        assert!(csv.contains("fully-distributed,1,130,2.000,10.000,,32.000,52.000,"));
    }

    #[test]
    fn json_is_valid_and_ordered() {
        let rows = reproduce_table1(EvalMode::Queueing).unwrap();
        let verdicts = check_realtime(&rows, &Default::default());
        let json = table1_table(&rows, Some(&verdicts))
            .render(ReportFormat::Json)
            .unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let arr = parsed.as_array().unwrap();
        assert_eq!(arr.len(), 4);
        assert_eq!(arr[1]["status"], "unstable");
        assert!(arr[1]["evacuation_ms"].is_null());
        let first = json.lines().nth(1).unwrap();
        assert!(first.find("\"name\"").unwrap() < first.find("\"processors\"").unwrap());
    }

    #[test]
    fn empty_report_is_an_error() {
        let t = sweep_table(&[]);
        assert!(matches!(
            t.render(ReportFormat::Csv),
            Err(Error::EmptyReport)
        ));
        assert!(matches!(
            emit_report(&t, ReportFormat::Json, None),
            Err(Error::EmptyReport)
        ));
    }

    #[test]
    fn rendering_is_stable() {
        let rows = reproduce_table1(EvalMode::Simple).unwrap();
        let a = table1_table(&rows, None)
            .render(ReportFormat::Json)
            .unwrap();
        let b = table1_table(&rows, None)
            .render(ReportFormat::Json)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn numbers_format_fixed() {
        assert_eq!(number(1.0 / 3.0, 3).unwrap(), "0.333");
        assert_eq!(number(-0.0001, 3).unwrap(), "0.000");
        assert_eq!(number(-1.5, 3).unwrap(), "-1.500");
        assert_eq!(number(f64::NAN, 3), None);
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(json_string("q\"\n"), "\"q\\\"\\n\"");
    }
}
