//! Topology files: a `[nodes]` list of `name [switch|host]` and a `[links]`
//! list of `src, dst, capacity_mbps, prop_delay_ms[, weight]`. Every link
//! line becomes a bidirectional cable.

use std::path::Path;

use flowgate_core::topology::{builtin, CableSpec, NodeKind, TopologySpec};

use crate::error::{Error, ParseError, Result};
use crate::sections::{fields, number, Document, Entry};

pub fn parse_topology(text: &str) -> Result<TopologySpec, ParseError> {
    let doc = Document::parse(text)?;
    doc.expect_sections(&["nodes", "links"])?;
    let mut spec = TopologySpec::default();

    let nodes = doc.section("nodes").ok_or_else(|| ParseError::new(1, "missing [nodes] section"))?;
    for line in &nodes.lines {
        let Entry::Item(item) = &line.entry else {
            return Err(ParseError::new(line.number, "expected 'name [switch|host]'"));
        };
        let mut words = item.split_whitespace();
        let name = words.next().unwrap_or_default();
        let kind = match words.next() {
            None | Some("switch") => NodeKind::Switch,
            Some("host") => NodeKind::Host,
            Some(other) => return Err(ParseError::new(line.number, format!("unknown node kind '{other}'"))),
        };
        if words.next().is_some() {
            return Err(ParseError::new(line.number, "trailing text after node kind"));
        }
        match kind {
            NodeKind::Switch => spec.switch(name),
            NodeKind::Host => spec.host(name),
        };
    }

    if let Some(links) = doc.section("links") {
        for line in &links.lines {
            let Entry::Item(item) = &line.entry else {
                return Err(ParseError::new(line.number, "expected 'src, dst, capacity_mbps, prop_delay_ms'"));
            };
            let f = fields(item);
            if !(4..=5).contains(&f.len()) {
                return Err(ParseError::new(line.number, format!("expected 4 or 5 fields, got {}", f.len())));
            }
            let capacity_mbps = number(line.number, "capacity_mbps", f[2])?;
            let prop_delay_ms = number(line.number, "prop_delay_ms", f[3])?;
            let weight = match f.get(4) {
                Some(w) => number(line.number, "weight", w)?,
                None => 1.0,
            };
            spec.cables.push(CableSpec {
                a: f[0].to_string(),
                b: f[1].to_string(),
                capacity_bps: capacity_mbps * 1e6,
                prop_delay_ms,
                weight,
            });
        }
    }
    Ok(spec)
}

/// Resolves a topology reference: a built-in name, or a file path relative
/// to `base_dir`.
pub fn resolve_topology(reference: &str, base_dir: &Path) -> Result<TopologySpec> {
    if let Some(spec) = builtin(reference) {
        return Ok(spec);
    }
    let path = base_dir.join(reference);
    let text = std::fs::read_to_string(&path).map_err(|source| Error::Read { path: path.clone(), source })?;
    parse_topology(&text).map_err(|source| Error::Parse { path, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowgate_core::Topology;

    #[test]
    fn parses_nodes_and_links() {
        let text = "[nodes]\nA switch\nB\nH1 host\n[links]\nA, B, 20, 1.0\nH1, A, 1000, 0.1, 2\n";
        let spec = parse_topology(text).unwrap();
        assert_eq!(spec.nodes.len(), 3);
        assert_eq!(spec.nodes[1].kind, NodeKind::Switch);
        assert_eq!(spec.cables[0].capacity_bps, 20e6);
        assert_eq!(spec.cables[1].weight, 2.0);
        let t = Topology::load(&spec).unwrap();
        assert_eq!(t.links().len(), 4);
    }

    #[test]
    fn reports_bad_lines() {
        assert_eq!(parse_topology("[nodes]\nA router\n").unwrap_err().line, 2);
        assert_eq!(parse_topology("[nodes]\nA\nB\n[links]\nA, B, fast, 1\n").unwrap_err().line, 5);
        assert_eq!(parse_topology("[nodes]\nA\n[links]\nA, B\n").unwrap_err().line, 4);
        assert!(parse_topology("[links]\nA, B, 1, 1\n").is_err());
        assert_eq!(parse_topology("[nodes]\nA\n[extra]\n").unwrap_err().line, 3);
    }

    #[test]
    fn dangling_link_caught_at_load() {
        let spec = parse_topology("[nodes]\nA\n[links]\nA, Z, 10, 1\n").unwrap();
        assert!(Topology::load(&spec).is_err());
    }
}
