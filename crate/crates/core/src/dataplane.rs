//! Fixed-step fluid dataplane.
//!
//! Each tick every active flow offers `requested_bps` along its route. A link
//! carrying offered load above its capacity scales every crossing flow by
//! `capacity / offered`; a flow is delivered at its offered rate times the
//! smallest scale factor on its path, and the shortfall is booked as drops on
//! that most-constrained link. Per-hop delay is the propagation delay plus a
//! queueing term `q_coeff * u / (1 - u)` with utilization `u` clamped to 0.99.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::topology::{LinkId, NodeId, Path, Topology};

pub const DEFAULT_TICK_S: f64 = 0.1;
pub const DEFAULT_Q_COEFF_MS: f64 = 1.0;
pub const MAX_UTILIZATION: f64 = 0.99;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlowId(pub u32);

impl fmt::Display for FlowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataplaneError {
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("duplicate flow id {0}")]
    DuplicateFlow(FlowId),
    #[error("unknown flow {0}")]
    UnknownFlow(FlowId),
    #[error("path does not connect the endpoints of flow {0}")]
    PathMismatch(FlowId),
    #[error("hard timeout must be positive, got {0}")]
    InvalidTimeout(f64),
    #[error("tick must be positive and finite, got {0}")]
    InvalidTick(f64),
}

/// Offered traffic demand between two hosts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: FlowId,
    pub src_host: NodeId,
    pub dst_host: NodeId,
    pub rate_pps: f64,
    pub packet_bytes: f64,
    pub start_s: f64,
    pub end_s: f64,
}

impl Flow {
    pub fn new(
        id: FlowId,
        src_host: NodeId,
        dst_host: NodeId,
        rate_pps: f64,
        packet_bytes: f64,
        start_s: f64,
        end_s: f64,
    ) -> Result<Flow, DataplaneError> {
        let bad = |m: &str| Err(DataplaneError::InvalidFlow(alloc::format!("{id}: {m}")));
        if !(rate_pps > 0.0 && rate_pps.is_finite()) {
            return bad("rate must be positive");
        }
        if !(packet_bytes > 0.0 && packet_bytes.is_finite()) {
            return bad("packet size must be positive");
        }
        if !(start_s >= 0.0 && start_s < end_s && end_s.is_finite()) {
            return bad("lifetime must satisfy 0 <= start < end");
        }
        if src_host == dst_host {
            return bad("source and destination coincide");
        }
        Ok(Flow { id, src_host, dst_host, rate_pps, packet_bytes, start_s, end_s })
    }

    pub fn requested_bps(&self) -> f64 {
        self.rate_pps * self.packet_bytes * 8.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

/// Installed route for one direction of a flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTableEntry {
    pub flow_id: FlowId,
    pub direction: Direction,
    pub path: Path,
    pub installed_at_s: f64,
    pub hard_timeout_s: f64,
    installed_tick: u64,
    expiry_tick: u64,
}

impl FlowTableEntry {
    pub fn expires_at_s(&self) -> f64 {
        self.installed_at_s + self.hard_timeout_s
    }

    /// Whether the entry routes traffic in the tick starting at `tick`.
    pub fn governs(&self, tick: u64) -> bool {
        self.installed_tick <= tick && tick < self.expiry_tick
    }
}

/// Cumulative egress counters of one port (one directed link).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PortCounters {
    pub tx_bytes: f64,
    pub drop_bytes: f64,
}

/// Per-port counter reading, the in-process stand-in for a port stats reply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortStatsSnapshot {
    pub link: LinkId,
    pub switch: NodeId,
    pub speed_bps: f64,
    pub tx_bytes: f64,
    pub drop_bytes: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowCounters {
    pub flow_id: FlowId,
    pub byte_count: f64,
    pub dropped_bytes: f64,
    pub packets_sent: f64,
    pub packets_delivered: f64,
    pub delay_weighted_sum_ms: f64,
}

impl FlowCounters {
    pub fn offered_bytes(&self) -> f64 {
        self.byte_count + self.dropped_bytes
    }

    pub fn packets_dropped(&self) -> f64 {
        self.packets_sent - self.packets_delivered
    }

    /// Delivered-byte-weighted mean path delay.
    pub fn mean_delay_ms(&self) -> Option<f64> {
        (self.byte_count > 0.0).then(|| self.delay_weighted_sum_ms / self.byte_count)
    }
}

/// What happened to one flow during one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTick {
    pub flow_id: FlowId,
    pub offered_bytes: f64,
    pub delivered_bytes: f64,
    pub dropped_bytes: f64,
    /// Link the drops were booked on; `None` when nothing dropped or the flow
    /// had no route.
    pub drop_link: Option<LinkId>,
    pub delay_ms: f64,
    pub routed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSummary {
    pub clock_s: f64,
    pub flows: Vec<FlowTick>,
    /// Delivered rate crossing each link, indexed by link id.
    pub link_carried_bps: Vec<f64>,
    pub unroutable: Vec<FlowId>,
    pub expired: Vec<FlowId>,
}

pub(crate) fn secs_to_ticks(secs: f64, tick_s: f64) -> u64 {
    let t = secs / tick_s;
    if t <= 0.0 {
        0
    } else {
        (t + 0.5) as u64
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    topology: Topology,
    flows: Vec<Flow>,
    flow_ticks: Vec<(u64, u64)>,
    flow_counters: Vec<FlowCounters>,
    ports: Vec<PortCounters>,
    table: BTreeMap<(FlowId, Direction), FlowTableEntry>,
    default_routes: BTreeMap<FlowId, Option<Path>>,
    tick: u64,
    tick_s: f64,
    q_coeff_ms: f64,
    /// Reserved for stochastic traffic models; the fluid model ignores it.
    seed: u64,
}

impl SimState {
    pub fn new(
        topology: Topology,
        mut flows: Vec<Flow>,
        tick_s: f64,
        q_coeff_ms: f64,
        seed: u64,
    ) -> Result<SimState, DataplaneError> {
        if !(tick_s > 0.0 && tick_s.is_finite()) {
            return Err(DataplaneError::InvalidTick(tick_s));
        }
        flows.sort_by_key(|f| f.id);
        for w in flows.windows(2) {
            if w[0].id == w[1].id {
                return Err(DataplaneError::DuplicateFlow(w[0].id));
            }
        }
        let mut default_routes = BTreeMap::new();
        for f in &flows {
            let route = topology
                .shortest_path(f.src_host, f.dst_host)
                .map_err(|e| DataplaneError::InvalidFlow(alloc::format!("{}: {e}", f.id)))?;
            default_routes.insert(f.id, route);
        }
        let flow_ticks = flows
            .iter()
            .map(|f| (secs_to_ticks(f.start_s, tick_s), secs_to_ticks(f.end_s, tick_s)))
            .collect();
        let flow_counters = flows
            .iter()
            .map(|f| FlowCounters { flow_id: f.id, ..Default::default() })
            .collect();
        let ports = vec![PortCounters::default(); topology.links().len()];
        Ok(SimState {
            topology,
            flows,
            flow_ticks,
            flow_counters,
            ports,
            table: BTreeMap::new(),
            default_routes,
            tick: 0,
            tick_s,
            q_coeff_ms,
            seed,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn flow(&self, id: FlowId) -> Option<&Flow> {
        self.flow_index(id).map(|i| &self.flows[i])
    }

    fn flow_index(&self, id: FlowId) -> Option<usize> {
        self.flows.binary_search_by_key(&id, |f| f.id).ok()
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn tick_s(&self) -> f64 {
        self.tick_s
    }

    pub fn clock_s(&self) -> f64 {
        self.tick as f64 * self.tick_s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn secs_to_ticks(&self, secs: f64) -> u64 {
        secs_to_ticks(secs, self.tick_s)
    }

    /// Whether the flow sends during the tick starting at the current clock.
    pub fn is_active(&self, id: FlowId) -> bool {
        self.flow_index(id).is_some_and(|i| self.active_at(i, self.tick))
    }

    fn active_at(&self, idx: usize, tick: u64) -> bool {
        let (start, end) = self.flow_ticks[idx];
        start <= tick && tick < end
    }

    pub fn active_flows(&self) -> impl Iterator<Item = &Flow> {
        self.flows.iter().enumerate().filter(|(i, _)| self.active_at(*i, self.tick)).map(|(_, f)| f)
    }

    pub fn default_route(&self, id: FlowId) -> Option<&Path> {
        self.default_routes.get(&id).and_then(Option::as_ref)
    }

    pub fn entry(&self, id: FlowId, direction: Direction) -> Option<&FlowTableEntry> {
        self.table.get(&(id, direction))
    }

    pub fn flow_table(&self) -> impl Iterator<Item = &FlowTableEntry> {
        self.table.values()
    }

    /// Route the flow's traffic takes in the next tick: a governing forward
    /// entry, otherwise the default hop-count shortest path.
    pub fn current_route(&self, id: FlowId) -> Option<&Path> {
        self.route_at(id, self.tick)
    }

    /// Route the installed table gives the flow at `tick`. Entries replaced
    /// since then are not remembered.
    pub fn route_at(&self, id: FlowId, tick: u64) -> Option<&Path> {
        match self.table.get(&(id, Direction::Forward)) {
            Some(e) if e.governs(tick) => Some(&e.path),
            _ => self.default_route(id),
        }
    }

    /// Current routes of every active flow.
    pub fn active_routes(&self) -> BTreeMap<FlowId, Path> {
        self.active_flows()
            .filter_map(|f| self.current_route(f.id).map(|p| (f.id, p.clone())))
            .collect()
    }

    /// Installs `path` for the flow and its reverse for the return direction,
    /// replacing earlier entries. Traffic follows it from the next tick.
    pub fn install_flow_entry(
        &mut self,
        flow_id: FlowId,
        path: Path,
        hard_timeout_s: f64,
    ) -> Result<(), DataplaneError> {
        let flow = self.flow(flow_id).ok_or(DataplaneError::UnknownFlow(flow_id))?;
        if path.src != flow.src_host || path.dst != flow.dst_host || !path.is_valid_in(&self.topology) {
            return Err(DataplaneError::PathMismatch(flow_id));
        }
        if !(hard_timeout_s > 0.0 && hard_timeout_s.is_finite()) {
            return Err(DataplaneError::InvalidTimeout(hard_timeout_s));
        }
        let installed_tick = self.tick;
        let expiry_tick = installed_tick + secs_to_ticks(hard_timeout_s, self.tick_s).max(1);
        let reverse = path.reversed();
        for (direction, path) in [(Direction::Forward, path), (Direction::Reverse, reverse)] {
            self.table.insert(
                (flow_id, direction),
                FlowTableEntry {
                    flow_id,
                    direction,
                    path,
                    installed_at_s: self.clock_s(),
                    hard_timeout_s,
                    installed_tick,
                    expiry_tick,
                },
            );
        }
        Ok(())
    }

    pub fn port_stats_snapshot(&self) -> Vec<PortStatsSnapshot> {
        self.topology
            .links()
            .iter()
            .zip(&self.ports)
            .map(|(l, c)| PortStatsSnapshot {
                link: l.id,
                switch: l.src,
                speed_bps: l.capacity_bps,
                tx_bytes: c.tx_bytes,
                drop_bytes: c.drop_bytes,
            })
            .collect()
    }

    pub fn flow_stats_snapshot(&self) -> Vec<FlowCounters> {
        self.flow_counters.clone()
    }

    pub fn flow_counters(&self, id: FlowId) -> Option<&FlowCounters> {
        self.flow_index(id).map(|i| &self.flow_counters[i])
    }

    /// Advances the simulation by one tick.
    pub fn step(&mut self) -> TickSummary {
        let tick = self.tick;
        let clock_s = self.clock_s();

        let mut expired = Vec::new();
        self.table.retain(|&(flow, dir), e| {
            let keep = tick < e.expiry_tick;
            if !keep && dir == Direction::Forward {
                expired.push(flow);
            }
            keep
        });

        let n_links = self.topology.links().len();
        let mut offered_bps = vec![0.0; n_links];
        let mut routes: Vec<(usize, Option<Path>)> = Vec::new();
        for i in 0..self.flows.len() {
            if !self.active_at(i, tick) {
                continue;
            }
            let route = self.current_route(self.flows[i].id).cloned();
            if let Some(p) = &route {
                let rate = self.flows[i].requested_bps();
                for &l in &p.links {
                    offered_bps[l.index()] += rate;
                }
            }
            routes.push((i, route));
        }

        let scale: Vec<f64> = self
            .topology
            .links()
            .iter()
            .zip(&offered_bps)
            .map(|(l, &off)| if off > l.capacity_bps { l.capacity_bps / off } else { 1.0 })
            .collect();

        let mut carried_bps = vec![0.0; n_links];
        let mut ticks = Vec::with_capacity(routes.len());
        let mut unroutable = Vec::new();
        for (i, route) in &routes {
            let flow = &self.flows[*i];
            let offered_bytes = flow.requested_bps() * self.tick_s / 8.0;
            let Some(path) = route else {
                unroutable.push(flow.id);
                ticks.push(FlowTick {
                    flow_id: flow.id,
                    offered_bytes,
                    delivered_bytes: 0.0,
                    dropped_bytes: offered_bytes,
                    drop_link: None,
                    delay_ms: 0.0,
                    routed: false,
                });
                continue;
            };
            let mut f = 1.0;
            let mut arg_min = None;
            for &l in &path.links {
                if scale[l.index()] < f {
                    f = scale[l.index()];
                    arg_min = Some(l);
                }
            }
            let delivered_bytes = offered_bytes * f;
            let dropped_bytes = offered_bytes - delivered_bytes;
            let delivered_bps = flow.requested_bps() * f;
            for &l in &path.links {
                carried_bps[l.index()] += delivered_bps;
            }
            ticks.push(FlowTick {
                flow_id: flow.id,
                offered_bytes,
                delivered_bytes,
                dropped_bytes,
                drop_link: arg_min,
                delay_ms: 0.0,
                routed: true,
            });
        }

        let hop_delay: Vec<f64> = self
            .topology
            .links()
            .iter()
            .zip(&carried_bps)
            .map(|(l, &c)| {
                let u = (c / l.capacity_bps).min(MAX_UTILIZATION);
                l.prop_delay_ms + self.q_coeff_ms * u / (1.0 - u)
            })
            .collect();

        for (t, (i, route)) in ticks.iter_mut().zip(&routes) {
            let flow = &self.flows[*i];
            let counters = &mut self.flow_counters[*i];
            counters.packets_sent += t.offered_bytes / flow.packet_bytes;
            counters.packets_delivered += t.delivered_bytes / flow.packet_bytes;
            counters.byte_count += t.delivered_bytes;
            counters.dropped_bytes += t.dropped_bytes;
            let Some(path) = route else { continue };
            t.delay_ms = path.links.iter().map(|l| hop_delay[l.index()]).sum();
            counters.delay_weighted_sum_ms += t.delay_ms * t.delivered_bytes;
            for &l in &path.links {
                self.ports[l.index()].tx_bytes += t.delivered_bytes;
            }
            if let Some(l) = t.drop_link {
                self.ports[l.index()].drop_bytes += t.dropped_bytes;
            }
        }

        self.tick += 1;
        TickSummary { clock_s, flows: ticks, link_carried_bps: carried_bps, unroutable, expired }
    }
}
