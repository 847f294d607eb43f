//! Parameter sweeps: one run per (axis value, strategy), merged into tables
//! with axis values as rows and strategies as columns.
//!
//! ```text
//! [sweep]
//! name = flow_sweep
//! base = s2_multi_flow.cfg
//! axis = flow_count           # or packet_rate
//! values = 1, 2, 3
//! strategies = reactive, proactive
//! ```
//!
//! `packet_rate` sets the rate of every flow in the base scenario;
//! `flow_count` keeps its first `n` flows.

use std::path::{Path, PathBuf};

use flowgate_core::{RunReport, StrategyKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::report::{into_string, write_file};
use crate::scenario::{OutputFormat, Scenario};
use crate::sections::{fields, number, Document, Entry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PacketRate,
    FlowCount,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::PacketRate => "packet_rate",
            SweepAxis::FlowCount => "flow_count",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: Scenario,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<SweepSpec> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        let base_dir = path.parent().unwrap_or(Path::new("."));
        SweepSpec::parse(&text, base_dir).map_err(|e| match e {
            Error::Parse { path: p, source } if p == Path::new("<sweep>") => Error::Parse { path: path.into(), source },
            Error::Invalid { path: p, message } if p == Path::new("<sweep>") => Error::Invalid { path: path.into(), message },
            other => other,
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<SweepSpec> {
        let perr = |source: ParseError| Error::Parse { path: PathBuf::from("<sweep>"), source };
        let doc = Document::parse(text).map_err(perr)?;
        doc.expect_sections(&["sweep"]).map_err(perr)?;
        let sec = doc.section("sweep").ok_or_else(|| perr(ParseError::new(1, "missing [sweep] section")))?;
        if let Some(l) = sec.lines.iter().find(|l| matches!(l.entry, Entry::Item(_))) {
            return Err(perr(ParseError::new(l.number, "expected 'key = value'")));
        }

        let (mut name, mut base, mut axis, mut values, mut strategies) = (None, None, None, None, None);
        let (mut out_dir, mut format) = (None, None);
        for (line, key, value) in sec.pairs() {
            match key {
                "name" => name = Some(value.to_string()),
                "base" => base = Some((line, value.to_string())),
                "axis" => {
                    axis = Some(match value {
                        "packet_rate" => SweepAxis::PacketRate,
                        "flow_count" => SweepAxis::FlowCount,
                        other => return Err(perr(ParseError::new(line, format!("unknown axis '{other}'")))),
                    })
                }
                "values" => {
                    let v = fields(value).into_iter().map(|f| number(line, key, f)).collect::<Result<Vec<_>, _>>();
                    values = Some((line, v.map_err(perr)?));
                }
                "strategies" => {
                    let s = fields(value)
                        .into_iter()
                        .map(|f| f.parse::<StrategyKind>().map_err(|e| ParseError::new(line, e.to_string())))
                        .collect::<Result<Vec<_>, _>>();
                    strategies = Some(s.map_err(perr)?);
                }
                "dir" => out_dir = Some(PathBuf::from(value)),
                "format" => {
                    format = Some(
                        <OutputFormat as clap::ValueEnum>::from_str(value, true)
                            .map_err(|_| perr(ParseError::new(line, format!("format: unknown '{value}'"))))?,
                    )
                }
                other => return Err(perr(ParseError::new(line, format!("unknown key '{other}' in [sweep]")))),
            }
        }
        let missing = |what: &str| perr(ParseError::new(sec.line, format!("[sweep] needs {what}")));
        let name = name.ok_or_else(|| missing("a name"))?;
        let (base_line, base_ref) = base.ok_or_else(|| missing("a base scenario"))?;
        let axis = axis.ok_or_else(|| missing("an axis"))?;
        let (values_line, values) = values.ok_or_else(|| missing("values"))?;
        let strategies = strategies.unwrap_or_else(|| StrategyKind::ALL.to_vec());

        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(perr(ParseError::new(values_line, "values must be strictly increasing")));
        }
        for &v in &values {
            let ok = match axis {
                SweepAxis::PacketRate => v > 0.0,
                SweepAxis::FlowCount => v >= 1.0 && v.fract() == 0.0,
            };
            if !ok {
                return Err(perr(ParseError::new(values_line, format!("{v} is not a valid {}", axis.as_str()))));
            }
        }
        if strategies.is_empty() {
            return Err(missing("at least one strategy"));
        }
        let base_path = base_dir.join(&base_ref);
        let base = Scenario::load(&base_path).map_err(|e| match e {
            Error::Read { source, .. } => perr(ParseError::new(base_line, format!("base '{base_ref}': {source}"))),
            other => other,
        })?;
        Ok(SweepSpec { name, base, axis, values, strategies, out_dir, format })
    }

    /// The scenario one sweep cell runs.
    pub fn cell_scenario(&self, value: f64, strategy: StrategyKind) -> Result<Scenario> {
        let mut s = self.base.clone();
        s.config.strategy = strategy;
        match self.axis {
            SweepAxis::PacketRate => s.flows.iter_mut().for_each(|f| f.rate_pps = value),
            SweepAxis::FlowCount => {
                let n = value as usize;
                if n > s.flows.len() {
                    return Err(Error::Invalid {
                        path: PathBuf::from(&self.name),
                        message: format!("flow_count {n} exceeds the {} flows of the base scenario", s.flows.len()),
                    });
                }
                s.flows.truncate(n);
            }
        }
        Ok(s)
    }

    /// Runs every cell on the rayon pool; a failing cell is recorded and the
    /// others still run.
    pub fn run(&self) -> SweepResult {
        let jobs: Vec<(f64, StrategyKind)> =
            self.values.iter().flat_map(|&v| self.strategies.iter().map(move |&s| (v, s))).collect();
        let cells = jobs
            .into_par_iter()
            .map(|(value, strategy)| {
                let outcome = self.cell_scenario(value, strategy).and_then(|s| {
                    let out = s.run()?;
                    Ok(out.report(&s.name))
                });
                let (summary, error) = match outcome {
                    Ok(r) => (Some(CellSummary::from(&r)), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                Cell { axis_value: value, strategy, summary, error }
            })
            .collect();
        SweepResult {
            name: self.name.clone(),
            axis: self.axis,
            values: self.values.clone(),
            strategies: self.strategies.clone(),
            cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub avg_loss_pct: f64,
    pub avg_throughput_bps: f64,
    pub avg_delay_ms: f64,
    pub actions: usize,
}

impl From<&RunReport> for CellSummary {
    fn from(r: &RunReport) -> Self {
        CellSummary {
            avg_loss_pct: r.avg_loss_pct,
            avg_throughput_bps: r.avg_throughput_bps,
            avg_delay_ms: r.avg_delay_ms,
            actions: r.actions.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub axis_value: f64,
    pub strategy: StrategyKind,
    pub summary: Option<CellSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    LossPct,
    ThroughputMbps,
    DelayMs,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::LossPct, Metric::ThroughputMbps, Metric::DelayMs];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::LossPct => "loss_pct",
            Metric::ThroughputMbps => "throughput_mbps",
            Metric::DelayMs => "delay_ms",
        }
    }

    fn of(self, s: &CellSummary) -> f64 {
        match self {
            Metric::LossPct => s.avg_loss_pct,
            Metric::ThroughputMbps => s.avg_throughput_bps / 1e6,
            Metric::DelayMs => s.avg_delay_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub name: String,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    /// Row-major: axis value, then strategy.
    pub cells: Vec<Cell>,
}

impl SweepResult {
    pub fn cell(&self, value: f64, strategy: StrategyKind) -> Option<&Cell> {
        self.cells.iter().find(|c| c.axis_value == value && c.strategy == strategy)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }

    /// One metric as a table; failed cells read `failed`.
    pub fn table_csv(&self, metric: Metric) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let enc = |e: csv::Error| Error::Encode(e.to_string());
        let mut header = vec![self.axis.as_str().to_string()];
        header.extend(self.strategies.iter().map(|s| s.to_string()));
        w.write_record(&header).map_err(enc)?;
        for &v in &self.values {
            let mut row = vec![v.to_string()];
            for &s in &self.strategies {
                row.push(match self.cell(v, s).and_then(|c| c.summary.as_ref()) {
                    Some(sum) => metric.of(sum).to_string(),
                    None => "failed".to_string(),
                });
            }
            w.write_record(&row).map_err(enc)?;
        }
        into_string(w)
    }

    /// Writes `<name>_<metric>.csv` per metric and `<name>.json`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        if format.csv() {
            for m in Metric::ALL {
                let path = dir.join(format!("{}_{}.csv", self.name, m.as_str()));
                written.push(write_file(&path, &self.table_csv(m)?)?);
            }
        }
        if format.json() {
            let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Encode(e.to_string()))?;
            s.push('\n');
            written.push(write_file(&dir.join(format!("{}.json", self.name)), &s)?);
        }
        Ok(written)
    }
}
