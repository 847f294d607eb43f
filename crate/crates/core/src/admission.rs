//! Flow admission onto an alternate path.
//!
//! Each link on a candidate path is screened on residual bandwidth first. A
//! link with positive residual bandwidth is then judged by the posterior
//! probability that it is available given the positive residual and the port
//! utilization observed over the last monitoring window:
//!
//! ```text
//! pu' = clamp(pu, eps, 1 - eps)
//! n1  = P(RB+ | LA=1) * (1 - pu') * P(LA)
//! n0  = P(RB+ | LA=0) * pu'       * (1 - P(LA))
//! P(LA=1 | RB+, PU) = n1 / (n1 + n0)
//! ```
//!
//! The link is available when the posterior exceeds its complement. Links that
//! fail either test go on the impassable list and the path is recomputed
//! around them until every link passes or no path is left.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataplane::Flow;
use crate::topology::{LinkId, Path, Topology};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdmissionError {
    #[error("posterior requested for link {0} whose residual bandwidth is not positive")]
    PreconditionViolated(LinkId),
    #[error("invalid Bayes parameter {name}: {value}")]
    InvalidParams { name: &'static str, value: f64 },
    #[error("port utilization {0} outside [0, 1]")]
    InvalidEvidence(f64),
}

/// Prior and likelihood table of the link-availability model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesParams {
    pub prior_la: f64,
    pub lik_rb_pos_given_la1: f64,
    pub lik_rb_pos_given_la0: f64,
    pub pu_eps: f64,
}

impl Default for BayesParams {
    fn default() -> Self {
        BayesParams { prior_la: 0.5, lik_rb_pos_given_la1: 0.9, lik_rb_pos_given_la0: 0.6, pu_eps: 0.01 }
    }
}

impl BayesParams {
    pub fn validate(&self) -> Result<(), AdmissionError> {
        let open_unit = |name, value: f64| {
            if value > 0.0 && value < 1.0 {
                Ok(())
            } else {
                Err(AdmissionError::InvalidParams { name, value })
            }
        };
        open_unit("prior_la", self.prior_la)?;
        open_unit("lik_rb_pos_given_la1", self.lik_rb_pos_given_la1)?;
        open_unit("lik_rb_pos_given_la0", self.lik_rb_pos_given_la0)?;
        if !(self.pu_eps > 0.0 && self.pu_eps < 0.5) {
            return Err(AdmissionError::InvalidParams { name: "pu_eps", value: self.pu_eps });
        }
        Ok(())
    }
}

/// Observed state of one link for one admission attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkEvidence {
    pub link_id: LinkId,
    /// Utilization over the observation window, as a fraction.
    pub pu: f64,
    /// Residual bandwidth after placing the requested flow; may be negative.
    pub rb_bps: f64,
}

/// `(capacity - measured_tx) - requested`, all in bits per second.
pub fn residual_bandwidth(capacity_bps: f64, measured_tx_bps: f64, requested_bps: f64) -> f64 {
    (capacity_bps - measured_tx_bps) - requested_bps
}

/// `P(RB)`: 1 when the residual is strictly positive, 0 otherwise.
pub fn p_rb(rb_bps: f64) -> f64 {
    if rb_bps > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    /// Normalized `P(LA=1 | RB+, PU)`.
    pub value: f64,
    /// Unnormalized ratio `P(RB,PU|LA) P(LA) / (P(RB) P(PU))` evaluated at the
    /// clamped utilization. Informational only; it can exceed 1.
    pub literal: f64,
    pub available: bool,
}

pub fn posterior_link_availability(ev: &LinkEvidence, p: &BayesParams) -> Result<Posterior, AdmissionError> {
    if !(ev.rb_bps > 0.0) {
        return Err(AdmissionError::PreconditionViolated(ev.link_id));
    }
    if !(0.0..=1.0).contains(&ev.pu) {
        return Err(AdmissionError::InvalidEvidence(ev.pu));
    }
    let pu = ev.pu.clamp(p.pu_eps, 1.0 - p.pu_eps);
    let n1 = p.lik_rb_pos_given_la1 * (1.0 - pu) * p.prior_la;
    let n0 = p.lik_rb_pos_given_la0 * pu * (1.0 - p.prior_la);
    let value = n1 / (n1 + n0);
    Ok(Posterior { value, literal: n1 / (p_rb(ev.rb_bps) * pu), available: value > 1.0 - value })
}

/// Links ruled out during one admission attempt.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImpassableList(BTreeSet<LinkId>);

impl ImpassableList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, link: LinkId) -> bool {
        self.0.insert(link)
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.0.contains(&link)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> &BTreeSet<LinkId> {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LinkVerdict {
    InsufficientBandwidth { link: LinkId, rb_bps: f64 },
    Available { link: LinkId, posterior: f64 },
    Unavailable { link: LinkId, posterior: f64 },
    /// No evidence supplied for the link; it is treated as impassable.
    NoEvidence { link: LinkId },
}

impl LinkVerdict {
    pub fn link(&self) -> LinkId {
        match *self {
            LinkVerdict::InsufficientBandwidth { link, .. }
            | LinkVerdict::Available { link, .. }
            | LinkVerdict::Unavailable { link, .. }
            | LinkVerdict::NoEvidence { link } => link,
        }
    }

    pub fn is_available(&self) -> bool {
        matches!(self, LinkVerdict::Available { .. })
    }
}

/// Per-link verdicts for one candidate path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionRound {
    pub path: Path,
    pub verdicts: Vec<LinkVerdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    NoAdmissiblePath,
    PathMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissionOutcome {
    Admitted(Path),
    Rejected(RejectReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionDecision {
    pub outcome: AdmissionOutcome,
    pub rounds: Vec<AdmissionRound>,
    pub impassable: ImpassableList,
}

impl AdmissionDecision {
    pub fn admitted(&self) -> Option<&Path> {
        match &self.outcome {
            AdmissionOutcome::Admitted(p) => Some(p),
            AdmissionOutcome::Rejected(_) => None,
        }
    }
}

fn judge(link: LinkId, evidence: &BTreeMap<LinkId, LinkEvidence>, p: &BayesParams) -> LinkVerdict {
    let Some(ev) = evidence.get(&link) else {
        return LinkVerdict::NoEvidence { link };
    };
    if !(ev.rb_bps > 0.0) {
        return LinkVerdict::InsufficientBandwidth { link, rb_bps: ev.rb_bps };
    }
    match posterior_link_availability(ev, p) {
        Ok(post) if post.available => LinkVerdict::Available { link, posterior: post.value },
        Ok(post) => LinkVerdict::Unavailable { link, posterior: post.value },
        Err(_) => LinkVerdict::NoEvidence { link },
    }
}

/// Decides whether `flow` may move onto `alt_path`, searching around failing
/// links as needed.
///
/// `topology` should already carry the exclusions that produced `alt_path`
/// (the bottleneck list); links added to `il` are excluded on top of them.
pub fn admit_flow(
    alt_path: &Path,
    flow: &Flow,
    evidence: &BTreeMap<LinkId, LinkEvidence>,
    p: &BayesParams,
    topology: &Topology,
    mut il: ImpassableList,
) -> AdmissionDecision {
    let mut rounds = Vec::new();
    if alt_path.src != flow.src_host || alt_path.dst != flow.dst_host || !alt_path.is_valid_in(topology) {
        return AdmissionDecision {
            outcome: AdmissionOutcome::Rejected(RejectReason::PathMismatch),
            rounds,
            impassable: il,
        };
    }

    let mut path = alt_path.clone();
    loop {
        let verdicts: Vec<LinkVerdict> = path.links.iter().map(|&l| judge(l, evidence, p)).collect();
        let mut grew = false;
        for v in verdicts.iter().filter(|v| !v.is_available()) {
            grew |= il.insert(v.link());
        }
        let all_available = verdicts.iter().all(LinkVerdict::is_available);
        rounds.push(AdmissionRound { path: path.clone(), verdicts });
        if all_available {
            return AdmissionDecision { outcome: AdmissionOutcome::Admitted(path), rounds, impassable: il };
        }
        // A failing link already in the list would mean the path ignored the
        // exclusions it was computed under.
        debug_assert!(grew);
        let next = topology
            .virtual_overlay(il.as_set())
            .ok()
            .and_then(|t| t.shortest_path(flow.src_host, flow.dst_host).ok().flatten());
        match next {
            Some(next) if grew => path = next,
            _ => {
                return AdmissionDecision {
                    outcome: AdmissionOutcome::Rejected(RejectReason::NoAdmissiblePath),
                    rounds,
                    impassable: il,
                }
            }
        }
    }
}
