//! Loss, throughput and delay metrics and the per-run report.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::controller::{RerouteAction, StrategyKind};
use crate::dataplane::{FlowCounters, FlowId, SimState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("dropped count {dropped} exceeds sent count {sent}")]
    CounterInversion { dropped: f64, sent: f64 },
    #[error("no values to average")]
    EmptyInput,
    #[error("no traffic was delivered")]
    NoDeliveredTraffic,
    #[error("simulation time must be positive, got {0}")]
    InvalidDuration(f64),
}

/// `100 * dropped / sent`; zero when nothing was sent.
pub fn packet_loss_pct(dropped: f64, sent: f64) -> Result<f64, MetricsError> {
    if dropped > sent || dropped < 0.0 {
        return Err(MetricsError::CounterInversion { dropped, sent });
    }
    if sent == 0.0 {
        return Ok(0.0);
    }
    Ok(100.0 * dropped / sent)
}

fn mean(values: &[f64]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

pub fn average_packet_loss(per_flow_loss_pct: &[f64]) -> Result<f64, MetricsError> {
    mean(per_flow_loss_pct)
}

/// Total delivered bits over `total_sim_time_s * n`, in bits per second.
pub fn average_throughput(delivered_bits: &[f64], total_sim_time_s: f64, n: usize) -> Result<f64, MetricsError> {
    if n == 0 {
        return Err(MetricsError::EmptyInput);
    }
    if !(total_sim_time_s > 0.0) {
        return Err(MetricsError::InvalidDuration(total_sim_time_s));
    }
    Ok(delivered_bits.iter().sum::<f64>() / (total_sim_time_s * n as f64))
}

/// Mean delay over `(delay_ms, delivered_bytes)` samples, weighted by bytes.
pub fn end_to_end_delay(samples: &[(f64, f64)]) -> Result<f64, MetricsError> {
    let weight: f64 = samples.iter().map(|s| s.1).sum();
    if !(weight > 0.0) {
        return Err(MetricsError::NoDeliveredTraffic);
    }
    Ok(samples.iter().map(|(d, w)| d * w).sum::<f64>() / weight)
}

/// Delay of one flow from its accumulated counters.
pub fn flow_delay(c: &FlowCounters) -> Result<f64, MetricsError> {
    c.mean_delay_ms().ok_or(MetricsError::NoDeliveredTraffic)
}

pub fn average_delay(per_flow_delay_ms: &[f64]) -> Result<f64, MetricsError> {
    mean(per_flow_delay_ms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMetrics {
    pub flow_id: FlowId,
    pub src: String,
    pub dst: String,
    pub offered_bps: f64,
    pub loss_pct: f64,
    pub throughput_bps: f64,
    /// `None` when the flow delivered nothing.
    pub mean_delay_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub strategy: StrategyKind,
    pub n_flows: usize,
    pub duration_s: f64,
    pub avg_loss_pct: f64,
    pub avg_throughput_bps: f64,
    /// Mean over flows that delivered traffic.
    pub avg_delay_ms: f64,
    pub flows: Vec<FlowMetrics>,
    /// Flows left out of the delay average because they delivered nothing.
    pub no_traffic_flows: Vec<FlowId>,
    pub actions: Vec<RerouteAction>,
}

/// Assembles the report of a finished run. Empty inputs give zero averages.
pub fn build_report(
    state: &SimState,
    scenario: &str,
    strategy: StrategyKind,
    duration_s: f64,
    actions: Vec<RerouteAction>,
) -> RunReport {
    let topo = state.topology();
    let mut flows = Vec::with_capacity(state.flows().len());
    let mut no_traffic_flows = Vec::new();
    for (flow, c) in state.flows().iter().zip(state.flow_stats_snapshot()) {
        // Counters come from the dataplane and cannot invert.
        let loss_pct = packet_loss_pct(c.packets_dropped().max(0.0), c.packets_sent).unwrap_or(0.0);
        let mean_delay_ms = flow_delay(&c).ok();
        if mean_delay_ms.is_none() {
            no_traffic_flows.push(flow.id);
        }
        flows.push(FlowMetrics {
            flow_id: flow.id,
            src: topo.name(flow.src_host).to_string(),
            dst: topo.name(flow.dst_host).to_string(),
            offered_bps: flow.requested_bps(),
            loss_pct,
            throughput_bps: if duration_s > 0.0 { c.byte_count * 8.0 / duration_s } else { 0.0 },
            mean_delay_ms,
        });
    }
    let losses: Vec<f64> = flows.iter().map(|f| f.loss_pct).collect();
    let bits: Vec<f64> = state.flow_stats_snapshot().iter().map(|c| c.byte_count * 8.0).collect();
    let delays: Vec<f64> = flows.iter().filter_map(|f| f.mean_delay_ms).collect();
    RunReport {
        scenario: scenario.to_string(),
        strategy,
        n_flows: flows.len(),
        duration_s,
        avg_loss_pct: average_packet_loss(&losses).unwrap_or(0.0),
        avg_throughput_bps: average_throughput(&bits, duration_s, flows.len()).unwrap_or(0.0),
        avg_delay_ms: average_delay(&delays).unwrap_or(0.0),
        flows,
        no_traffic_flows,
        actions,
    }
}
