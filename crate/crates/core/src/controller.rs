//! Port monitoring and rerouting strategies.
//!
//! The controller only reads the dataplane. Each call returns a list of
//! [`RerouteAction`]s; the engine installs the admitted paths between ticks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::admission::{
    admit_flow, residual_bandwidth, AdmissionError, AdmissionOutcome, BayesParams, ImpassableList, LinkEvidence,
    RejectReason,
};
use crate::dataplane::{FlowCounters, FlowId, PortStatsSnapshot, SimState};
use crate::topology::{LinkId, Path};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControllerError {
    #[error("monitoring interval must be positive, got {0}")]
    InvalidInterval(f64),
    #[error("threshold must lie in (0, 100], got {0}")]
    InvalidThreshold(f64),
    #[error("port speed must be positive, got {0}")]
    InvalidPortSpeed(f64),
    #[error("hard timeout must be positive, got {0}")]
    InvalidTimeout(f64),
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(alloc::string::String),
    #[error(transparent)]
    InvalidBayes(#[from] AdmissionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub interval_s: f64,
    pub threshold_pct: f64,
    pub hard_timeout_s: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig { interval_s: 10.0, threshold_pct: 70.0, hard_timeout_s: 30.0 }
    }
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<(), ControllerError> {
        if !(self.interval_s > 0.0 && self.interval_s.is_finite()) {
            return Err(ControllerError::InvalidInterval(self.interval_s));
        }
        if !(self.threshold_pct > 0.0 && self.threshold_pct <= 100.0) {
            return Err(ControllerError::InvalidThreshold(self.threshold_pct));
        }
        if !(self.hard_timeout_s > 0.0 && self.hard_timeout_s.is_finite()) {
            return Err(ControllerError::InvalidTimeout(self.hard_timeout_s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    None,
    Reactive,
    Proactive,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::None, StrategyKind::Reactive, StrategyKind::Proactive];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::None => "none",
            StrategyKind::Reactive => "reactive",
            StrategyKind::Proactive => "proactive",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = ControllerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(StrategyKind::None),
            "reactive" => Ok(StrategyKind::Reactive),
            "proactive" => Ok(StrategyKind::Proactive),
            other => Err(ControllerError::UnknownStrategy(other.into())),
        }
    }
}

/// Links flagged in one polling interval, ascending and without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BottleneckList(Vec<LinkId>);

impl BottleneckList {
    pub fn links(&self) -> &[LinkId] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.0.binary_search(&link).is_ok()
    }

    pub fn to_set(&self) -> BTreeSet<LinkId> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<LinkId> for BottleneckList {
    fn from_iter<I: IntoIterator<Item = LinkId>>(iter: I) -> Self {
        let set: BTreeSet<LinkId> = iter.into_iter().collect();
        BottleneckList(set.into_iter().collect())
    }
}

/// Percentage of a port's capacity used over an interval, clamped to [0, 100].
pub fn port_utilization(tx_bytes_delta: f64, port_speed_bps: f64, interval_s: f64) -> Result<f64, ControllerError> {
    if !(interval_s > 0.0) {
        return Err(ControllerError::InvalidInterval(interval_s));
    }
    if !(port_speed_bps > 0.0) {
        return Err(ControllerError::InvalidPortSpeed(port_speed_bps));
    }
    let u = (tx_bytes_delta * 8.0 * 100.0) / (port_speed_bps * interval_s);
    Ok(u.clamp(0.0, 100.0))
}

/// Counter movement of one port between two snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortDelta {
    pub link: LinkId,
    pub speed_bps: f64,
    pub tx_bytes: f64,
    pub drop_bytes: f64,
}

/// Pairs snapshots by link. A port missing from `prev` counts from zero.
pub fn port_deltas(prev: &[PortStatsSnapshot], cur: &[PortStatsSnapshot]) -> Vec<PortDelta> {
    let before: BTreeMap<LinkId, &PortStatsSnapshot> = prev.iter().map(|p| (p.link, p)).collect();
    cur.iter()
        .map(|c| {
            let (tx0, drop0) = before.get(&c.link).map(|p| (p.tx_bytes, p.drop_bytes)).unwrap_or((0.0, 0.0));
            PortDelta {
                link: c.link,
                speed_bps: c.speed_bps,
                tx_bytes: (c.tx_bytes - tx0).max(0.0),
                drop_bytes: (c.drop_bytes - drop0).max(0.0),
            }
        })
        .collect()
}

/// Links whose egress utilization over the interval meets the threshold.
pub fn identify_bottlenecks(deltas: &[PortDelta], interval_s: f64, cfg: &MonitorConfig) -> Result<BottleneckList, ControllerError> {
    let mut out = Vec::new();
    for d in deltas {
        if port_utilization(d.tx_bytes, d.speed_bps, interval_s)? >= cfg.threshold_pct {
            out.push(d.link);
        }
    }
    Ok(out.into_iter().collect())
}

/// Flow with the largest cumulative byte count among those routed over
/// `link`; ties go to the smaller flow id.
pub fn select_largest_flow(link: LinkId, stats: &[FlowCounters], routes: &BTreeMap<FlowId, Path>) -> Option<FlowId> {
    stats
        .iter()
        .filter(|c| routes.get(&c.flow_id).is_some_and(|p| p.contains(link)))
        .fold(None::<&FlowCounters>, |best, c| match best {
            Some(b) if b.byte_count >= c.byte_count && (b.byte_count > c.byte_count || b.flow_id < c.flow_id) => Some(b),
            _ => Some(c),
        })
        .map(|c| c.flow_id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ActionOutcome {
    Rerouted { from: Option<Path>, to: Path },
    NoAlternatePath,
    Rejected { reason: RejectReason },
    NoFlowOnLink,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerouteAction {
    pub at_s: f64,
    pub strategy: StrategyKind,
    /// Bottleneck (proactive) or loss-detected (reactive) link.
    pub link: LinkId,
    pub flow: Option<FlowId>,
    pub outcome: ActionOutcome,
}

impl RerouteAction {
    pub fn new_path(&self) -> Option<&Path> {
        match &self.outcome {
            ActionOutcome::Rerouted { to, .. } => Some(to),
            _ => None,
        }
    }
}

/// Routing controller for one simulation run.
#[derive(Debug, Clone)]
pub struct Controller {
    strategy: StrategyKind,
    cfg: MonitorConfig,
    bayes: BayesParams,
    interval_ticks: u64,
    prev_ports: Vec<PortStatsSnapshot>,
    prev_flows: Vec<FlowCounters>,
    last_poll_tick: u64,
    last_bottlenecks: BottleneckList,
}

impl Controller {
    pub fn new(strategy: StrategyKind, cfg: MonitorConfig, bayes: BayesParams, state: &SimState) -> Result<Controller, ControllerError> {
        cfg.validate()?;
        bayes.validate()?;
        Ok(Controller {
            strategy,
            cfg,
            bayes,
            interval_ticks: state.secs_to_ticks(cfg.interval_s).max(1),
            prev_ports: state.port_stats_snapshot(),
            prev_flows: state.flow_stats_snapshot(),
            last_poll_tick: state.tick(),
            last_bottlenecks: BottleneckList::default(),
        })
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    pub fn config(&self) -> &MonitorConfig {
        &self.cfg
    }

    pub fn last_bottlenecks(&self) -> &BottleneckList {
        &self.last_bottlenecks
    }

    /// Whether the proactive poll runs before the tick starting now.
    pub fn is_poll_tick(&self, tick: u64) -> bool {
        tick > 0 && tick % self.interval_ticks == 0
    }

    /// Runs whatever the strategy does before the tick starting at the
    /// state's current clock.
    pub fn on_tick(&mut self, state: &SimState) -> Vec<RerouteAction> {
        match self.strategy {
            StrategyKind::None => Vec::new(),
            StrategyKind::Proactive if self.is_poll_tick(state.tick()) => self.proactive_tick(state),
            StrategyKind::Proactive => Vec::new(),
            StrategyKind::Reactive if state.tick() > 0 => self.reactive_tick(state),
            StrategyKind::Reactive => Vec::new(),
        }
    }

    /// Polls all ports, rebuilds the bottleneck list and tries to move the
    /// largest flow off each bottleneck link through admission control.
    pub fn proactive_tick(&mut self, state: &SimState) -> Vec<RerouteAction> {
        let now = state.clock_s();
        let elapsed = (state.tick() - self.last_poll_tick) as f64 * state.tick_s();
        let ports = state.port_stats_snapshot();
        let flows = state.flow_stats_snapshot();
        let deltas = port_deltas(&self.prev_ports, &ports);
        let flow_rate = flow_rates(&self.prev_flows, &flows, elapsed);
        self.prev_ports = ports;
        self.prev_flows = flows.clone();
        self.last_poll_tick = state.tick();
        if elapsed <= 0.0 {
            self.last_bottlenecks = BottleneckList::default();
            return Vec::new();
        }

        let bl = identify_bottlenecks(&deltas, elapsed, &self.cfg).unwrap_or_default();
        self.last_bottlenecks = bl.clone();
        if bl.is_empty() {
            return Vec::new();
        }

        let topo = state.topology();
        let Ok(overlay) = topo.virtual_overlay(&bl.to_set()) else {
            return Vec::new();
        };
        let mut link_tx_bps: Vec<f64> = deltas.iter().map(|d| d.tx_bytes * 8.0 / elapsed).collect();
        let mut routes = state.active_routes();
        // Entries that expired at this boundary move their flow back to the
        // default route; project that move onto the measured load.
        let prev_tick = state.tick().saturating_sub(1);
        for (fid, now_path) in &routes {
            let Some(before) = state.route_at(*fid, prev_tick) else { continue };
            if before == now_path {
                continue;
            }
            let rate = flow_rate.get(fid).copied().unwrap_or(0.0);
            for &l in &before.links {
                link_tx_bps[l.index()] = (link_tx_bps[l.index()] - rate).max(0.0);
            }
            for &l in &now_path.links {
                link_tx_bps[l.index()] += rate;
            }
        }
        let mut actions = Vec::new();

        for &link in bl.links() {
            let Some(fid) = select_largest_flow(link, &flows, &routes) else {
                actions.push(self.action(now, link, None, ActionOutcome::NoFlowOnLink));
                continue;
            };
            let flow = state.flow(fid).expect("routed flow exists");
            let Some(alt) = overlay.shortest_path(flow.src_host, flow.dst_host).ok().flatten() else {
                actions.push(self.action(now, link, Some(fid), ActionOutcome::NoAlternatePath));
                continue;
            };

            let measured = flow_rate.get(&fid).copied().unwrap_or(0.0);
            let requested = if measured > 0.0 { measured } else { flow.requested_bps() };
            let current = routes.get(&fid).cloned();
            let evidence: BTreeMap<LinkId, LinkEvidence> = topo
                .links()
                .iter()
                .map(|l| {
                    let own = match &current {
                        Some(p) if p.contains(l.id) => measured,
                        _ => 0.0,
                    };
                    let tx = (link_tx_bps[l.id.index()] - own).max(0.0);
                    let ev = LinkEvidence {
                        link_id: l.id,
                        pu: (tx / l.capacity_bps).clamp(0.0, 1.0),
                        rb_bps: residual_bandwidth(l.capacity_bps, tx, requested),
                    };
                    (l.id, ev)
                })
                .collect();

            let decision = admit_flow(&alt, flow, &evidence, &self.bayes, &overlay, ImpassableList::new());
            match decision.outcome {
                AdmissionOutcome::Admitted(path) => {
                    if let Some(old) = &current {
                        for &l in &old.links {
                            link_tx_bps[l.index()] = (link_tx_bps[l.index()] - measured).max(0.0);
                        }
                    }
                    for &l in &path.links {
                        link_tx_bps[l.index()] += requested;
                    }
                    routes.insert(fid, path.clone());
                    actions.push(self.action(now, link, Some(fid), ActionOutcome::Rerouted { from: current, to: path }));
                }
                AdmissionOutcome::Rejected(reason) => {
                    actions.push(self.action(now, link, Some(fid), ActionOutcome::Rejected { reason }));
                }
            }
        }
        actions
    }

    /// Treats every link that dropped traffic since the previous tick as a
    /// bottleneck and moves its largest flow to the shortest path avoiding
    /// that link, with no admission check.
    pub fn reactive_tick(&mut self, state: &SimState) -> Vec<RerouteAction> {
        let now = state.clock_s();
        let ports = state.port_stats_snapshot();
        let lossy: BottleneckList = port_deltas(&self.prev_ports, &ports)
            .iter()
            .filter(|d| d.drop_bytes > 0.0)
            .map(|d| d.link)
            .collect();
        self.prev_ports = ports;
        self.last_poll_tick = state.tick();
        self.last_bottlenecks = lossy.clone();
        if lossy.is_empty() {
            return Vec::new();
        }

        // Candidates come from the routes that carried the observed loss; a
        // flow moves at most once per tick.
        let routes = state.active_routes();
        let mut flows = state.flow_stats_snapshot();
        let topo = state.topology();
        let mut actions = Vec::new();
        for &link in lossy.links() {
            let Some(fid) = select_largest_flow(link, &flows, &routes) else {
                actions.push(self.action(now, link, None, ActionOutcome::NoFlowOnLink));
                continue;
            };
            flows.retain(|c| c.flow_id != fid);
            let flow = state.flow(fid).expect("routed flow exists");
            let alt = topo
                .virtual_overlay(&BTreeSet::from([link]))
                .ok()
                .and_then(|o| o.shortest_path(flow.src_host, flow.dst_host).ok().flatten());
            match alt {
                Some(path) => {
                    let from = routes.get(&fid).cloned();
                    actions.push(self.action(now, link, Some(fid), ActionOutcome::Rerouted { from, to: path }));
                }
                None => actions.push(self.action(now, link, Some(fid), ActionOutcome::NoAlternatePath)),
            }
        }
        actions
    }

    fn action(&self, at_s: f64, link: LinkId, flow: Option<FlowId>, outcome: ActionOutcome) -> RerouteAction {
        RerouteAction { at_s, strategy: self.strategy, link, flow, outcome }
    }
}

/// Delivered rate of each flow over the interval, in bits per second.
fn flow_rates(prev: &[FlowCounters], cur: &[FlowCounters], elapsed: f64) -> BTreeMap<FlowId, f64> {
    if elapsed <= 0.0 {
        return BTreeMap::new();
    }
    let before: BTreeMap<FlowId, f64> = prev.iter().map(|c| (c.flow_id, c.byte_count)).collect();
    cur.iter()
        .map(|c| {
            let b0 = before.get(&c.flow_id).copied().unwrap_or(0.0);
            (c.flow_id, (c.byte_count - b0).max(0.0) * 8.0 / elapsed)
        })
        .collect()
}
