//! Scenario files.
//!
//! ```text
//! [scenario]
//! name = s1_single_flow
//! topology = abilene          # built-in name or topology file path
//! duration_s = 60
//! strategy = proactive
//!
//! [capacity]                  # Mbps; `core`/`access` set whole classes
//! core = 20
//! A-B = 10
//!
//! [controller]
//! interval_s = 10
//! threshold_pct = 70
//! hard_timeout_s = 30
//!
//! [bayes]
//! prior_la = 0.5
//!
//! [flows]                     # src, dst, pps, packet_bytes[, start_s, end_s]
//! f1 = H1, H2, 2000, 1000
//!
//! [output]
//! dir = out
//! format = csv
//! ```
//!
//! Flows get ids 1, 2, ... in file order.

use std::path::{Path, PathBuf};

use flowgate_core::{Flow, FlowId, RunOutcome, SimConfig, Simulation, StrategyKind, Topology, TopologySpec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::sections::{fields, number, Document, Entry, Section};
use crate::topofile::resolve_topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub label: String,
    pub src: String,
    pub dst: String,
    pub rate_pps: f64,
    pub packet_bytes: f64,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub topology_ref: String,
    pub topology: TopologySpec,
    pub flows: Vec<FlowSpec>,
    pub config: SimConfig,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Scenario::parse(&text, base).map_err(|e| match e {
            Error::Invalid { message, .. } => Error::Invalid { path: path.into(), message },
            Error::Parse { source, .. } => Error::Parse { path: path.into(), source },
            other => other,
        })
    }

    /// Parses scenario text; topology file references resolve against
    /// `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Scenario> {
        let here = PathBuf::from("<scenario>");
        let perr = |source: ParseError| Error::Parse { path: here.clone(), source };
        let doc = Document::parse(text).map_err(perr)?;
        doc.expect_sections(&["scenario", "capacity", "controller", "bayes", "flows", "output"]).map_err(perr)?;

        let head = doc.section("scenario").ok_or_else(|| perr(ParseError::new(1, "missing [scenario] section")))?;
        let mut name = None;
        let mut topology_ref = None;
        let mut config = SimConfig::default();
        for (line, key, value) in head.pairs() {
            match key {
                "name" => name = Some(value.to_string()),
                "topology" => topology_ref = Some(value.to_string()),
                "duration_s" => config.duration_s = number(line, key, value).map_err(perr)?,
                "tick_s" => config.tick_s = number(line, key, value).map_err(perr)?,
                "q_coeff_ms" => config.q_coeff_ms = number(line, key, value).map_err(perr)?,
                "seed" => {
                    config.seed = value
                        .parse()
                        .map_err(|_| perr(ParseError::new(line, format!("seed: expected an integer, got '{value}'"))))?
                }
                "strategy" => {
                    config.strategy =
                        value.parse::<StrategyKind>().map_err(|e| perr(ParseError::new(line, e.to_string())))?
                }
                _ => return Err(perr(unknown_key(line, head, key))),
            }
        }
        reject_items(head).map_err(perr)?;
        let name = name.ok_or_else(|| perr(ParseError::new(head.line, "[scenario] needs a name")))?;
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(perr(ParseError::new(head.line, format!("name '{name}' must be [A-Za-z0-9_-]+"))));
        }
        let topology_ref = topology_ref.ok_or_else(|| perr(ParseError::new(head.line, "[scenario] needs a topology")))?;
        let mut topology = resolve_topology(&topology_ref, base_dir)?;

        if let Some(sec) = doc.section("controller") {
            reject_items(sec).map_err(perr)?;
            for (line, key, value) in sec.pairs() {
                let v = number(line, key, value).map_err(perr)?;
                match key {
                    "interval_s" => config.monitor.interval_s = v,
                    "threshold_pct" => config.monitor.threshold_pct = v,
                    "hard_timeout_s" => config.monitor.hard_timeout_s = v,
                    _ => return Err(perr(unknown_key(line, sec, key))),
                }
            }
        }
        if let Some(sec) = doc.section("bayes") {
            reject_items(sec).map_err(perr)?;
            for (line, key, value) in sec.pairs() {
                let v = number(line, key, value).map_err(perr)?;
                match key {
                    "prior_la" => config.bayes.prior_la = v,
                    "lik_rb_pos_given_la1" => config.bayes.lik_rb_pos_given_la1 = v,
                    "lik_rb_pos_given_la0" => config.bayes.lik_rb_pos_given_la0 = v,
                    "pu_eps" => config.bayes.pu_eps = v,
                    _ => return Err(perr(unknown_key(line, sec, key))),
                }
            }
        }

        if let Some(sec) = doc.section("capacity") {
            reject_items(sec).map_err(perr)?;
            apply_capacities(&mut topology, sec).map_err(perr)?;
        }

        let mut flows = Vec::new();
        if let Some(sec) = doc.section("flows") {
            reject_items(sec).map_err(perr)?;
            for (line, label, value) in sec.pairs() {
                flows.push(parse_flow(line, label, value, config.duration_s).map_err(perr)?);
            }
        }

        let (mut out_dir, mut format) = (None, None);
        if let Some(sec) = doc.section("output") {
            reject_items(sec).map_err(perr)?;
            for (line, key, value) in sec.pairs() {
                match key {
                    "dir" => out_dir = Some(PathBuf::from(value)),
                    "format" => {
                        format = Some(
                            <OutputFormat as clap::ValueEnum>::from_str(value, true)
                                .map_err(|_| perr(ParseError::new(line, format!("format: unknown '{value}'"))))?,
                        )
                    }
                    _ => return Err(perr(unknown_key(line, sec, key))),
                }
            }
        }

        let scenario = Scenario { name, topology_ref, topology, flows, config, out_dir, format };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::Invalid { path: PathBuf::from("<scenario>"), message };
        if !(self.config.duration_s > 0.0) {
            return Err(invalid(format!("duration_s must be positive, got {}", self.config.duration_s)));
        }
        for f in &self.flows {
            if f.end_s > self.config.duration_s + 1e-9 {
                return Err(invalid(format!(
                    "flow {} ends at {} s, after the {} s duration",
                    f.label, f.end_s, self.config.duration_s
                )));
            }
        }
        // Resolves node names and checks every flow and controller parameter.
        self.build().map(|_| ())
    }

    /// Loaded topology and flows, ready to simulate.
    pub fn build(&self) -> Result<(Topology, Vec<Flow>)> {
        let topo = Topology::load(&self.topology)?;
        let invalid = |message: String| Error::Invalid { path: PathBuf::from("<scenario>"), message };
        let mut flows = Vec::with_capacity(self.flows.len());
        for (i, f) in self.flows.iter().enumerate() {
            let host = |name: &str| match topo.node_by_name(name) {
                Some(id) if topo.attached_switch(id).is_some() => Ok(id),
                Some(_) => Err(invalid(format!("flow {}: '{name}' is not a host", f.label))),
                None => Err(invalid(format!("flow {}: unknown node '{name}'", f.label))),
            };
            let flow = Flow::new(FlowId(i as u32 + 1), host(&f.src)?, host(&f.dst)?, f.rate_pps, f.packet_bytes, f.start_s, f.end_s)
                .map_err(|e| invalid(format!("flow {}: {e}", f.label)))?;
            flows.push(flow);
        }
        // Surfaces controller and timing errors before any run.
        Simulation::new(topo.clone(), flows.clone(), self.config.clone())?;
        Ok((topo, flows))
    }

    pub fn run(&self) -> Result<RunOutcome> {
        let (topo, flows) = self.build()?;
        Ok(Simulation::new(topo, flows, self.config.clone())?.run())
    }
}

fn unknown_key(line: usize, sec: &Section, key: &str) -> ParseError {
    ParseError::new(line, format!("unknown key '{key}' in [{}]", sec.name))
}

fn reject_items(sec: &Section) -> Result<(), ParseError> {
    match sec.lines.iter().find(|l| matches!(l.entry, Entry::Item(_))) {
        Some(l) => Err(ParseError::new(l.number, format!("expected 'key = value' in [{}]", sec.name))),
        None => Ok(()),
    }
}

fn apply_capacities(spec: &mut TopologySpec, sec: &Section) -> Result<(), ParseError> {
    // Class-wide settings first so that per-cable overrides win.
    for (line, key, value) in sec.pairs() {
        let mbps = positive(line, key, value)?;
        match key {
            "core" => spec.set_core_capacity(mbps * 1e6),
            "access" => spec.set_access_capacity(mbps * 1e6),
            _ => {}
        }
    }
    for (line, key, value) in sec.pairs().filter(|p| p.1 != "core" && p.1 != "access") {
        let mbps = positive(line, key, value)?;
        let Some((a, b)) = key.split_once('-').map(|(a, b)| (a.trim(), b.trim())) else {
            return Err(ParseError::new(line, format!("capacity key '{key}' must look like A-B")));
        };
        if !spec.set_capacity(a, b, mbps * 1e6) {
            return Err(ParseError::new(line, format!("no cable between {a} and {b}")));
        }
    }
    Ok(())
}

fn positive(line: usize, key: &str, value: &str) -> Result<f64, ParseError> {
    let v = number(line, key, value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ParseError::new(line, format!("{key}: capacity must be positive")))
    }
}

fn parse_flow(line: usize, label: &str, value: &str, duration_s: f64) -> Result<FlowSpec, ParseError> {
    let f = fields(value);
    if f.len() != 4 && f.len() != 6 {
        return Err(ParseError::new(
            line,
            format!("flow {label}: expected 'src, dst, pps, packet_bytes[, start_s, end_s]', got {} fields", f.len()),
        ));
    }
    let (start_s, end_s) = if f.len() == 6 {
        (number(line, "start_s", f[4])?, number(line, "end_s", f[5])?)
    } else {
        (0.0, duration_s)
    };
    Ok(FlowSpec {
        label: label.to_string(),
        src: f[0].to_string(),
        dst: f[1].to_string(),
        rate_pps: number(line, "pps", f[2])?,
        packet_bytes: number(line, "packet_bytes", f[3])?,
        start_s,
        end_s,
    })
}
