//! Simulation loop: controller decisions are applied between dataplane ticks.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::admission::BayesParams;
use crate::controller::{Controller, ControllerError, MonitorConfig, RerouteAction, StrategyKind};
use crate::dataplane::{self, DataplaneError, Flow, SimState, TickSummary};
use crate::metrics::{build_report, RunReport};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Dataplane(#[from] DataplaneError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error("duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub duration_s: f64,
    pub tick_s: f64,
    pub q_coeff_ms: f64,
    pub strategy: StrategyKind,
    pub monitor: MonitorConfig,
    pub bayes: BayesParams,
    pub seed: u64,
    /// Keep every [`TickSummary`] in the outcome.
    pub record_trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration_s: 60.0,
            tick_s: dataplane::DEFAULT_TICK_S,
            q_coeff_ms: dataplane::DEFAULT_Q_COEFF_MS,
            strategy: StrategyKind::None,
            monitor: MonitorConfig::default(),
            bayes: BayesParams::default(),
            seed: 0,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    state: SimState,
    controller: Controller,
    config: SimConfig,
    total_ticks: u64,
    actions: Vec<RerouteAction>,
    trace: Vec<TickSummary>,
}

impl Simulation {
    pub fn new(topology: Topology, flows: Vec<Flow>, config: SimConfig) -> Result<Simulation, EngineError> {
        if !(config.duration_s > 0.0 && config.duration_s.is_finite()) {
            return Err(EngineError::InvalidDuration(config.duration_s));
        }
        let state = SimState::new(topology, flows, config.tick_s, config.q_coeff_ms, config.seed)?;
        let controller = Controller::new(config.strategy, config.monitor, config.bayes, &state)?;
        let total_ticks = state.secs_to_ticks(config.duration_s);
        Ok(Simulation { state, controller, config, total_ticks, actions: Vec::new(), trace: Vec::new() })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn actions(&self) -> &[RerouteAction] {
        &self.actions
    }

    pub fn is_finished(&self) -> bool {
        self.state.tick() >= self.total_ticks
    }

    /// Runs the controller, installs its reroutes and advances one tick.
    /// Returns `None` once the configured duration has elapsed.
    pub fn step(&mut self) -> Option<TickSummary> {
        if self.is_finished() {
            return None;
        }
        let actions = self.controller.on_tick(&self.state);
        for a in &actions {
            if let (Some(flow), Some(path)) = (a.flow, a.new_path()) {
                self.state
                    .install_flow_entry(flow, path.clone(), self.config.monitor.hard_timeout_s)
                    .expect("controller paths connect their flow's endpoints");
            }
        }
        self.actions.extend(actions);
        let summary = self.state.step();
        if self.config.record_trace {
            self.trace.push(summary.clone());
        }
        Some(summary)
    }

    pub fn run(mut self) -> RunOutcome {
        while self.step().is_some() {}
        RunOutcome { state: self.state, actions: self.actions, trace: self.trace, config: self.config }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SimState,
    pub actions: Vec<RerouteAction>,
    pub trace: Vec<TickSummary>,
    pub config: SimConfig,
}

impl RunOutcome {
    pub fn report(&self, scenario: &str) -> RunReport {
        build_report(&self.state, scenario, self.config.strategy, self.config.duration_s, self.actions.clone())
    }

    /// Delivered bits per second of each flow over `[from_s, to_s)`, from the
    /// recorded trace.
    pub fn windowed_throughput_bps(&self, from_s: f64, to_s: f64) -> Vec<(crate::dataplane::FlowId, f64)> {
        let mut acc: alloc::collections::BTreeMap<_, f64> =
            self.state.flows().iter().map(|f| (f.id, 0.0)).collect();
        for t in self.trace.iter().filter(|t| t.clock_s >= from_s - 1e-9 && t.clock_s < to_s - 1e-9) {
            for ft in &t.flows {
                *acc.entry(ft.flow_id).or_default() += ft.delivered_bytes * 8.0;
            }
        }
        acc.into_iter().map(|(id, bits)| (id, bits / (to_s - from_s))).collect()
    }
}
