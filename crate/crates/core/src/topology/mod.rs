//! Network graph: nodes, directed capacity-weighted links, exclusion overlays
//! and shortest paths.
//!
//! Every physical cable is stored as two directed links that share a
//! [`CableId`]. Cable `c` yields link `2c` (declared direction) and link
//! `2c + 1` (reverse), so [`Topology::reverse`] is a bit flip.

mod builtin;

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use serde::{Deserialize, Serialize};

pub use builtin::{builtin, BUILTIN_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u16);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkId(pub u32);

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn cable(self) -> CableId {
        CableId(self.0 / 2)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CableId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Switch,
    Host,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
}

/// Link weight: a non-negative real or the distinguished infinite value that
/// removes the link from path computation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(f64);

impl Weight {
    pub const INFINITE: Weight = Weight(f64::INFINITY);
    pub const UNIT: Weight = Weight(1.0);

    /// `None` for negative or NaN inputs. `+inf` maps to [`Weight::INFINITE`].
    pub fn new(value: f64) -> Option<Weight> {
        if value >= 0.0 {
            Some(Weight(value))
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::UNIT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub cable: CableId,
    pub src: NodeId,
    pub dst: NodeId,
    pub capacity_bps: f64,
    /// Base weight. Overlays never modify it; see [`Topology::weight`].
    pub weight: Weight,
    pub prop_delay_ms: f64,
}

/// A loop-free chain of links. The empty path is valid when `src == dst`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub src: NodeId,
    pub dst: NodeId,
    pub links: Vec<LinkId>,
}

impl Path {
    pub fn empty(node: NodeId) -> Path {
        Path { src: node, dst: node, links: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.links.contains(&link)
    }

    /// Node sequence from `src` to `dst`.
    pub fn nodes(&self, topo: &Topology) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.links.len() + 1);
        out.push(self.src);
        for &l in &self.links {
            out.push(topo.links[l.index()].dst);
        }
        out
    }

    /// The same route walked backwards over the paired reverse links.
    pub fn reversed(&self) -> Path {
        Path {
            src: self.dst,
            dst: self.src,
            links: self.links.iter().rev().map(|&l| Topology::reverse(l)).collect(),
        }
    }

    /// Sum of effective weights under `topo`'s overlay.
    pub fn weight(&self, topo: &Topology) -> f64 {
        self.links.iter().fold(0.0, |acc, &l| acc + topo.weight(l).value())
    }

    /// Checks chaining, endpoints and loop-freedom against `topo`.
    pub fn is_valid_in(&self, topo: &Topology) -> bool {
        let mut at = self.src;
        let mut seen = BTreeSet::new();
        seen.insert(at);
        for &l in &self.links {
            let Some(link) = topo.link(l) else { return false };
            if link.src != at || !seen.insert(link.dst) {
                return false;
            }
            at = link.dst;
        }
        at == self.dst
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("malformed topology: {0}")]
    MalformedTopology(String),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

fn malformed(msg: impl Into<String>) -> TopologyError {
    TopologyError::MalformedTopology(msg.into())
}

/// Declarative description a [`Topology`] is loaded from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub nodes: Vec<NodeSpec>,
    pub cables: Vec<CableSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    pub kind: NodeKind,
}

/// One physical cable; loading generates both directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableSpec {
    pub a: String,
    pub b: String,
    pub capacity_bps: f64,
    pub prop_delay_ms: f64,
    pub weight: f64,
}

impl TopologySpec {
    pub fn switch(&mut self, name: &str) -> &mut Self {
        self.nodes.push(NodeSpec { name: name.to_string(), kind: NodeKind::Switch });
        self
    }

    pub fn host(&mut self, name: &str) -> &mut Self {
        self.nodes.push(NodeSpec { name: name.to_string(), kind: NodeKind::Host });
        self
    }

    pub fn cable(&mut self, a: &str, b: &str, capacity_bps: f64, prop_delay_ms: f64) -> &mut Self {
        self.cables.push(CableSpec {
            a: a.to_string(),
            b: b.to_string(),
            capacity_bps,
            prop_delay_ms,
            weight: 1.0,
        });
        self
    }

    /// Overrides the capacity of the cable joining `a` and `b` (either order).
    /// Returns false when no such cable exists.
    pub fn set_capacity(&mut self, a: &str, b: &str, capacity_bps: f64) -> bool {
        let mut hit = false;
        for c in &mut self.cables {
            if (c.a == a && c.b == b) || (c.a == b && c.b == a) {
                c.capacity_bps = capacity_bps;
                hit = true;
            }
        }
        hit
    }

    /// Sets the capacity of every switch-to-switch cable.
    pub fn set_core_capacity(&mut self, capacity_bps: f64) {
        let hosts = self.host_names();
        for c in &mut self.cables {
            if !hosts.contains(&c.a) && !hosts.contains(&c.b) {
                c.capacity_bps = capacity_bps;
            }
        }
    }

    /// Sets the capacity of every host access cable.
    pub fn set_access_capacity(&mut self, capacity_bps: f64) {
        let hosts = self.host_names();
        for c in &mut self.cables {
            if hosts.contains(&c.a) || hosts.contains(&c.b) {
                c.capacity_bps = capacity_bps;
            }
        }
    }

    fn host_names(&self) -> BTreeSet<String> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Host)
            .map(|n| n.name.clone())
            .collect()
    }
}

/// Validated network graph. Immutable once loaded; overlays are copies.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<Node>,
    links: Vec<Link>,
    /// Outgoing links per node, ascending by id.
    adjacency: Vec<Vec<LinkId>>,
    by_name: BTreeMap<String, NodeId>,
    excluded: BTreeSet<LinkId>,
}

impl Topology {
    pub fn load(spec: &TopologySpec) -> Result<Topology, TopologyError> {
        if spec.nodes.is_empty() {
            return Err(malformed("empty node list"));
        }
        if spec.nodes.len() > u16::MAX as usize {
            return Err(malformed("too many nodes"));
        }
        let mut by_name = BTreeMap::new();
        let mut nodes = Vec::with_capacity(spec.nodes.len());
        for (i, n) in spec.nodes.iter().enumerate() {
            if n.name.is_empty() {
                return Err(malformed("node with empty name"));
            }
            let id = NodeId(i as u16);
            if by_name.insert(n.name.clone(), id).is_some() {
                return Err(malformed(alloc::format!("duplicate node '{}'", n.name)));
            }
            nodes.push(Node { id, name: n.name.clone(), kind: n.kind });
        }

        let mut links = Vec::with_capacity(spec.cables.len() * 2);
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut seen_pairs = BTreeSet::new();
        for (c, cable) in spec.cables.iter().enumerate() {
            let resolve = |name: &str| {
                by_name
                    .get(name)
                    .copied()
                    .ok_or_else(|| malformed(alloc::format!("link references unknown node '{name}'")))
            };
            let a = resolve(&cable.a)?;
            let b = resolve(&cable.b)?;
            if a == b {
                return Err(malformed(alloc::format!("self-loop on '{}'", cable.a)));
            }
            if !seen_pairs.insert((a.min(b), a.max(b))) {
                return Err(malformed(alloc::format!(
                    "duplicate link '{}'-'{}'",
                    cable.a, cable.b
                )));
            }
            if !(cable.capacity_bps > 0.0 && cable.capacity_bps.is_finite()) {
                return Err(malformed(alloc::format!(
                    "link '{}'-'{}' needs a positive capacity",
                    cable.a, cable.b
                )));
            }
            if !(cable.prop_delay_ms >= 0.0 && cable.prop_delay_ms.is_finite()) {
                return Err(malformed(alloc::format!(
                    "link '{}'-'{}' has an invalid propagation delay",
                    cable.a, cable.b
                )));
            }
            let weight = Weight::new(cable.weight).ok_or_else(|| {
                malformed(alloc::format!("link '{}'-'{}' has a negative weight", cable.a, cable.b))
            })?;
            let cable_id = CableId(c as u32);
            for (k, (src, dst)) in [(a, b), (b, a)].into_iter().enumerate() {
                let id = LinkId((2 * c + k) as u32);
                adjacency[src.index()].push(id);
                links.push(Link {
                    id,
                    cable: cable_id,
                    src,
                    dst,
                    capacity_bps: cable.capacity_bps,
                    weight,
                    prop_delay_ms: cable.prop_delay_ms,
                });
            }
        }
        for adj in &mut adjacency {
            adj.sort();
        }

        let topo = Topology { nodes, links, adjacency, by_name, excluded: BTreeSet::new() };
        for node in &topo.nodes {
            if node.kind == NodeKind::Host {
                let out = &topo.adjacency[node.id.index()];
                if out.len() != 1 || topo.nodes[topo.links[out[0].index()].dst.index()].kind != NodeKind::Switch {
                    return Err(malformed(alloc::format!(
                        "host '{}' must attach to exactly one switch",
                        node.name
                    )));
                }
            }
        }
        Ok(topo)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(id.index())
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn outgoing(&self, node: NodeId) -> &[LinkId] {
        self.adjacency.get(node.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn hosts(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Host)
    }

    /// Switch a host is attached to.
    pub fn attached_switch(&self, host: NodeId) -> Option<NodeId> {
        let node = self.node(host)?;
        if node.kind != NodeKind::Host {
            return None;
        }
        self.outgoing(host).first().map(|l| self.links[l.index()].dst)
    }

    pub fn reverse(link: LinkId) -> LinkId {
        LinkId(link.0 ^ 1)
    }

    /// Link joining `src` to `dst`, if any.
    pub fn link_between(&self, src: NodeId, dst: NodeId) -> Option<LinkId> {
        self.outgoing(src).iter().copied().find(|&l| self.links[l.index()].dst == dst)
    }

    /// Effective weight: infinite for excluded links, the base weight otherwise.
    pub fn weight(&self, link: LinkId) -> Weight {
        if self.excluded.contains(&link) {
            Weight::INFINITE
        } else {
            self.links.get(link.index()).map(|l| l.weight).unwrap_or(Weight::INFINITE)
        }
    }

    pub fn excluded(&self) -> &BTreeSet<LinkId> {
        &self.excluded
    }

    /// Copy of this topology with every link in `excluded` weighted infinite,
    /// on top of any exclusions already present.
    pub fn virtual_overlay(&self, excluded: &BTreeSet<LinkId>) -> Result<Topology, TopologyError> {
        if let Some(&bad) = excluded.iter().find(|l| l.index() >= self.links.len()) {
            return Err(TopologyError::UnknownLink(bad));
        }
        let mut out = self.clone();
        out.excluded.extend(excluded.iter().copied());
        Ok(out)
    }

    /// Copy with every exclusion removed; base weights are untouched by overlays.
    pub fn clear_overlay(&self) -> Topology {
        let mut out = self.clone();
        out.excluded.clear();
        out
    }

    /// Minimum-weight path from `src` to `dst`, ignoring infinite-weight links.
    ///
    /// Ties between equal-weight paths go to the lexicographically smallest
    /// link-id sequence. `Ok(None)` when `dst` is unreachable.
    pub fn shortest_path(&self, src: NodeId, dst: NodeId) -> Result<Option<Path>, TopologyError> {
        for n in [src, dst] {
            if n.index() >= self.nodes.len() {
                return Err(TopologyError::UnknownNode(n));
            }
        }
        if src == dst {
            return Ok(Some(Path::empty(src)));
        }

        // Labels are (distance, link sequence); both orderings are monotone
        // under extension, so the first label popped for a node is final.
        let n = self.nodes.len();
        let mut best: Vec<Option<Label>> = vec![None; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        let start = Label { dist: 0.0, links: Vec::new(), node: src };
        best[src.index()] = Some(start.clone());
        heap.push(Reverse(start));

        while let Some(Reverse(label)) = heap.pop() {
            let u = label.node;
            if settled[u.index()] {
                continue;
            }
            if best[u.index()].as_ref() != Some(&label) {
                continue;
            }
            settled[u.index()] = true;
            if u == dst {
                return Ok(Some(Path { src, dst, links: label.links }));
            }
            for &l in &self.adjacency[u.index()] {
                let w = self.weight(l);
                if w.is_infinite() {
                    continue;
                }
                let v = self.links[l.index()].dst;
                if settled[v.index()] {
                    continue;
                }
                let mut links = label.links.clone();
                links.push(l);
                let cand = Label { dist: label.dist + w.value(), links, node: v };
                let better = match &best[v.index()] {
                    None => true,
                    Some(cur) => cand < *cur,
                };
                if better {
                    best[v.index()] = Some(cand.clone());
                    heap.push(Reverse(cand));
                }
            }
        }
        Ok(None)
    }

    /// Shortest path between two hosts by name, for scenario code.
    pub fn shortest_path_by_name(&self, src: &str, dst: &str) -> Result<Option<Path>, TopologyError> {
        let s = self
            .node_by_name(src)
            .ok_or_else(|| malformed(alloc::format!("unknown node '{src}'")))?;
        let d = self
            .node_by_name(dst)
            .ok_or_else(|| malformed(alloc::format!("unknown node '{dst}'")))?;
        self.shortest_path(s, d)
    }

    pub fn name(&self, id: NodeId) -> &str {
        self.node(id).map(|n| n.name.as_str()).unwrap_or("?")
    }

    /// `"A->B"` style label for a link.
    pub fn link_label(&self, id: LinkId) -> String {
        match self.link(id) {
            Some(l) => alloc::format!("{}->{}", self.name(l.src), self.name(l.dst)),
            None => id.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Label {
    dist: f64,
    links: Vec<LinkId>,
    node: NodeId,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then_with(|| self.links.cmp(&other.links))
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
