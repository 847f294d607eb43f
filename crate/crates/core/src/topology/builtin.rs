//! Named topologies shipped with the simulator.

use alloc::format;

use super::TopologySpec;

pub const BUILTIN_NAMES: &[&str] = &["abilene", "triangle", "line2"];

const MBPS: f64 = 1e6;

/// Backbone links run at 20 Mbps with 1 ms propagation delay. Host access
/// links run at 1 Gbps with 0.1 ms so that they never become the bottleneck.
pub const CORE_CAPACITY_BPS: f64 = 20.0 * MBPS;
pub const CORE_DELAY_MS: f64 = 1.0;
pub const ACCESS_CAPACITY_BPS: f64 = 1000.0 * MBPS;
pub const ACCESS_DELAY_MS: f64 = 0.1;

/// Abilene backbone as published in the Internet Topology Zoo: 11 PoPs and
/// 14 bidirectional links.
///
/// Switches are lettered so that host `Hn` hangs off the n-th letter:
///
/// | switch | PoP          | switch | PoP            |
/// |--------|--------------|--------|----------------|
/// | A      | Houston      | G      | Washington DC  |
/// | B      | Los Angeles  | H      | Seattle        |
/// | C      | Kansas City  | I      | Indianapolis   |
/// | D      | Atlanta      | J      | New York       |
/// | E      | Sunnyvale    | K      | Chicago        |
/// | F      | Denver       |        |                |
const ABILENE_CABLES: &[(&str, &str)] = &[
    ("A", "B"),
    ("A", "C"),
    ("A", "D"),
    ("B", "E"),
    ("C", "F"),
    ("C", "I"),
    ("D", "G"),
    ("D", "I"),
    ("E", "F"),
    ("E", "H"),
    ("F", "H"),
    ("G", "J"),
    ("I", "K"),
    ("J", "K"),
];

const ABILENE_SWITCHES: &[&str] = &["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K"];

fn with_hosts(spec: &mut TopologySpec, switches: &[&str], cables: &[(&str, &str)]) {
    for s in switches {
        spec.switch(s);
    }
    for i in 1..=switches.len() {
        spec.host(&format!("H{i}"));
    }
    for (a, b) in cables {
        spec.cable(a, b, CORE_CAPACITY_BPS, CORE_DELAY_MS);
    }
    for (i, s) in switches.iter().enumerate() {
        spec.cable(&format!("H{}", i + 1), s, ACCESS_CAPACITY_BPS, ACCESS_DELAY_MS);
    }
}

/// Looks up a built-in topology by name.
pub fn builtin(name: &str) -> Option<TopologySpec> {
    let mut spec = TopologySpec::default();
    match name {
        "abilene" => with_hosts(&mut spec, ABILENE_SWITCHES, ABILENE_CABLES),
        "triangle" => with_hosts(&mut spec, &["A", "B", "C"], &[("A", "B"), ("A", "C"), ("C", "B")]),
        "line2" => with_hosts(&mut spec, &["A", "B"], &[("A", "B")]),
        _ => return None,
    }
    Some(spec)
}
