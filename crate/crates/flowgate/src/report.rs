//! Run reports on disk: one CSV row per flow plus a summary row, and the full
//! report as JSON.

use std::fs;
use std::path::{Path, PathBuf};

use flowgate_core::RunReport;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::OutputFormat;

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    kind: &'a str,
    flow_id: Option<u32>,
    src: &'a str,
    dst: &'a str,
    offered_bps: Option<f64>,
    loss_pct: f64,
    throughput_bps: f64,
    mean_delay_ms: Option<f64>,
}

pub fn report_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| Error::Encode(e.to_string());
    for f in &report.flows {
        w.serialize(CsvRow {
            kind: "flow",
            flow_id: Some(f.flow_id.0),
            src: &f.src,
            dst: &f.dst,
            offered_bps: Some(f.offered_bps),
            loss_pct: f.loss_pct,
            throughput_bps: f.throughput_bps,
            mean_delay_ms: f.mean_delay_ms,
        })
        .map_err(enc)?;
    }
    w.serialize(CsvRow {
        kind: "summary",
        flow_id: None,
        src: "",
        dst: "",
        offered_bps: None,
        loss_pct: report.avg_loss_pct,
        throughput_bps: report.avg_throughput_bps,
        mean_delay_ms: Some(report.avg_delay_ms),
    })
    .map_err(enc)?;
    into_string(w)
}

pub fn report_json(report: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Encode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `<scenario>_<strategy>.csv` and/or `.json` under `dir`.
pub fn write_report(report: &RunReport, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    let stem = format!("{}_{}", report.scenario, report.strategy);
    let mut written = Vec::new();
    if format.csv() {
        written.push(write_file(&dir.join(format!("{stem}.csv")), &report_csv(report)?)?);
    }
    if format.json() {
        written.push(write_file(&dir.join(format!("{stem}.json")), &report_json(report)?)?);
    }
    Ok(written)
}

pub(crate) fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Encode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Encode(e.to_string()))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| Error::Write { path: parent.into(), source })?;
    }
    fs::write(path, contents).map_err(|source| Error::Write { path: path.into(), source })?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    #[test]
    fn csv_has_flow_rows_and_summary() {
        let s = Scenario::parse(
            "[scenario]\nname = t\ntopology = line2\nduration_s = 10\n[capacity]\nA-B = 10\n[flows]\nf1 = H1, H2, 2000, 1000\n",
            Path::new("."),
        )
        .unwrap();
        let r = s.run().unwrap().report(&s.name);
        let csv = report_csv(&r).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "kind,flow_id,src,dst,offered_bps,loss_pct,throughput_bps,mean_delay_ms");
        assert!(lines[1].starts_with("flow,1,H1,H2,16000000.0,37.5,10000000.0,"));
        assert!(lines[2].starts_with("summary,,,,,37.5,10000000.0,"));
        assert_eq!(lines.len(), 3);
        let back: RunReport = serde_json::from_str(&report_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
