//! Deterministic fluid network simulator with an embedded SDN controller.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. It contains:
//!
//! - [`topology`]: the directed link graph, weight overlays used to exclude
//!   bottleneck links, and a deterministic Dijkstra.
//! - [`dataplane`]: a fixed-step fluid model of flows over the graph, with port
//!   and flow counters and flow tables carrying hard timeouts.
//! - [`admission`]: residual-bandwidth screening and the link-availability
//!   posterior used to admit a flow onto an alternate path.
//! - [`controller`]: port monitoring, bottleneck identification and the three
//!   routing strategies (none, reactive loss-triggered, proactive).
//! - [`metrics`]: packet loss, throughput and delay aggregates and the per-run
//!   report.
//! - [`engine`]: the loop that drives a controller against a dataplane.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod admission;
pub mod controller;
pub mod dataplane;
pub mod engine;
pub mod metrics;
pub mod topology;

pub use admission::{AdmissionDecision, AdmissionOutcome, BayesParams, ImpassableList, LinkEvidence};
pub use controller::{BottleneckList, Controller, MonitorConfig, RerouteAction, StrategyKind};
pub use dataplane::{Flow, FlowCounters, FlowId, FlowTableEntry, PortStatsSnapshot, SimState};
pub use engine::{RunOutcome, SimConfig, Simulation};
pub use metrics::{FlowMetrics, RunReport};
pub use topology::{Link, LinkId, NodeId, NodeKind, Path, Topology, TopologySpec, Weight};
