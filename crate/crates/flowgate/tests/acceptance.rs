//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use flowgate::Scenario;
use flowgate_core::admission::{
    admit_flow, posterior_link_availability, AdmissionOutcome, BayesParams, ImpassableList, LinkEvidence, LinkVerdict,
    RejectReason,
};
use flowgate_core::controller::{identify_bottlenecks, port_utilization, MonitorConfig, PortDelta};
use flowgate_core::topology::{builtin, CableSpec, LinkId, NodeId, Topology, TopologySpec};
use flowgate_core::{Flow, FlowId, RunReport, SimConfig, SimState, Simulation, StrategyKind};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Slack for `<=` comparisons between strategies; strict `<` needs a margin
/// larger than this.
const CMP_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "port utilization grid", limit: Duration::from_secs(1), check: utilization_grid },
        Criterion { id: 2, title: "bottleneck threshold boundary", limit: Duration::from_secs(1), check: threshold_boundary },
        Criterion { id: 3, title: "shortest path vs enumeration", limit: Duration::from_secs(10), check: dijkstra_oracle },
        Criterion { id: 4, title: "posterior vs enumeration", limit: Duration::from_secs(1), check: bayes_oracle },
        Criterion { id: 5, title: "conservation and capacity", limit: Duration::from_secs(5), check: conservation },
        Criterion { id: 6, title: "single-flow rate trend", limit: Duration::from_secs(10), check: single_flow_trend },
        Criterion { id: 7, title: "multi-flow scaling trend", limit: Duration::from_secs(30), check: multi_flow_trend },
        Criterion { id: 8, title: "hard-timeout law", limit: Duration::from_secs(1), check: hard_timeout_law },
        Criterion { id: 9, title: "admission recursion", limit: Duration::from_secs(1), check: admission_recursion },
        Criterion { id: 10, title: "deterministic reports", limit: Duration::from_secs(10), check: determinism },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow: limit {:?}", c.limit)),
            Err(e) => (false, e),
        };
        println!(
            "[{}] criterion {:>2} {:<32} {:>8.3}s  {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            took.as_secs_f64(),
            detail
        );
        if !ok {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close_rel(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn utilization_grid() -> Outcome {
    let mut n = 0;
    for tx in [0.0f64, 8.75e6, 12.5e6] {
        for mbps in [10.0f64, 20.0] {
            // bytes * 8 bits * 100 % / (bits per second * 10 s)
            let want = (tx * 8.0 * 100.0 / (mbps * 1e6 * 10.0)).min(100.0);
            let got = port_utilization(tx, mbps * 1e6, 10.0).map_err(|e| e.to_string())?;
            ensure(close_rel(got, want, 1e-12) || (got == 0.0 && want == 0.0), || {
                format!("tx={tx} speed={mbps}Mbps: {got} != {want}")
            })?;
            n += 1;
        }
    }
    let spot = [(8.75e6, 10.0, 70.0), (12.5e6, 10.0, 100.0), (8.75e6, 20.0, 35.0), (12.5e6, 20.0, 50.0)];
    for (tx, mbps, want) in spot {
        let got = port_utilization(tx, mbps * 1e6, 10.0).unwrap();
        ensure(close_rel(got, want, 1e-12), || format!("tx={tx} speed={mbps}Mbps: {got} != {want}"))?;
    }
    Ok(format!("{n} grid points within 1e-12"))
}

fn threshold_boundary() -> Outcome {
    let cfg = MonitorConfig::default();
    let delta = |link: u32, tx_bytes: f64| PortDelta { link: LinkId(link), speed_bps: 10e6, tx_bytes, drop_bytes: 0.0 };
    // 8,750,000 B is exactly 70% of 10 Mbps over 10 s; 8,748,750 B is 69.99%.
    let deltas = [delta(0, 8_750_000.0), delta(1, 8_748_750.0)];
    ensure(port_utilization(deltas[1].tx_bytes, 10e6, 10.0).unwrap() == 69.99, || "69.99% fixture is off".into())?;
    let bl = identify_bottlenecks(&deltas, 10.0, &cfg).map_err(|e| e.to_string())?;
    ensure(bl.links() == [LinkId(0)], || format!("expected only the 70% port flagged, got {:?}", bl.links()))?;
    Ok("70.00% flagged, 69.99% not".into())
}

fn random_graph(rng: &mut StdRng) -> TopologySpec {
    let n = rng.random_range(2..=8);
    let mut spec = TopologySpec::default();
    for i in 0..n {
        spec.switch(&format!("S{i}"));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.45) {
                spec.cables.push(CableSpec {
                    a: format!("S{a}"),
                    b: format!("S{b}"),
                    capacity_bps: 1e6,
                    prop_delay_ms: 1.0,
                    weight: rng.random_range(0..4) as f64,
                });
            }
        }
    }
    spec
}

/// Minimum total weight over all simple paths avoiding `excluded`.
fn enumerate_best(t: &Topology, at: NodeId, dst: NodeId, excluded: &BTreeSet<LinkId>, seen: &mut Vec<NodeId>) -> Option<f64> {
    if at == dst {
        return Some(0.0);
    }
    let mut best: Option<f64> = None;
    for l in t.links().iter().filter(|l| l.src == at && !excluded.contains(&l.id)) {
        if seen.contains(&l.dst) {
            continue;
        }
        seen.push(l.dst);
        if let Some(rest) = enumerate_best(t, l.dst, dst, excluded, seen) {
            let w = l.weight.value() + rest;
            best = Some(best.map_or(w, |b| b.min(w)));
        }
        seen.pop();
    }
    best
}

fn dijkstra_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut reachable, mut excluded_total) = (0, 0);
    for case in 0..200 {
        let t = Topology::load(&random_graph(&mut rng)).map_err(|e| e.to_string())?;
        let n = t.nodes().len() as u16;
        let src = NodeId(rng.random_range(0..n));
        let dst = NodeId(rng.random_range(0..n));
        let excluded: BTreeSet<LinkId> = t.links().iter().filter(|_| rng.random_bool(0.25)).map(|l| l.id).collect();
        excluded_total += excluded.len();
        let overlay = t.virtual_overlay(&excluded).map_err(|e| e.to_string())?;
        let got = overlay.shortest_path(src, dst).map_err(|e| e.to_string())?;
        let want = enumerate_best(&t, src, dst, &excluded, &mut vec![src]);
        match (&got, want) {
            (None, None) => {}
            (Some(p), Some(w)) => {
                reachable += 1;
                ensure(p.is_valid_in(&t) && p.src == src && p.dst == dst, || format!("case {case}: invalid path"))?;
                ensure(p.weight(&t) == w, || format!("case {case}: weight {} != {w}", p.weight(&t)))?;
                ensure(p.links.iter().all(|l| !excluded.contains(l)), || format!("case {case}: used an excluded link"))?;
            }
            _ => return Err(format!("case {case}: reachability disagrees ({got:?} vs {want:?})")),
        }
    }
    Ok(format!("200 graphs, {reachable} reachable pairs, {excluded_total} excluded links"))
}

fn bayes_oracle() -> Outcome {
    let sets = [
        BayesParams::default(),
        BayesParams { prior_la: 0.7, lik_rb_pos_given_la1: 0.8, lik_rb_pos_given_la0: 0.3, pu_eps: 0.01 },
        BayesParams { prior_la: 0.3, lik_rb_pos_given_la1: 0.95, lik_rb_pos_given_la0: 0.5, pu_eps: 0.05 },
    ];
    let mut points = 0;
    for p in &sets {
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let pu = i as f64 * 0.05;
            for rb in [-1.0, 0.0, 1.0] {
                let ev = LinkEvidence { link_id: LinkId(0), pu, rb_bps: rb };
                let got = posterior_link_availability(&ev, p);
                if rb <= 0.0 {
                    ensure(got.is_err(), || format!("pu={pu} rb={rb}: non-positive residual was evaluated"))?;
                    points += 1;
                    continue;
                }
                // Joint over LA in {0, 1}, conditioned on RB+ and the clamped PU.
                let u = pu.max(p.pu_eps).min(1.0 - p.pu_eps);
                let j1 = p.prior_la * p.lik_rb_pos_given_la1 * (1.0 - u);
                let j0 = (1.0 - p.prior_la) * p.lik_rb_pos_given_la0 * u;
                let post = j1 / (j0 + j1);
                let got = got.map_err(|e| e.to_string())?;
                ensure((got.value - post).abs() <= 1e-12, || format!("{p:?} pu={pu}: {} != {post}", got.value))?;
                ensure(got.available == (j1 > j0), || format!("{p:?} pu={pu}: availability differs"))?;
                ensure(got.value <= prev, || format!("{p:?}: posterior rises at pu={pu}"))?;
                prev = got.value;
                points += 1;
            }
        }
    }
    Ok(format!("{points} grid points within 1e-12, monotone in pu"))
}

fn conservation() -> Outcome {
    let base = Scenario::load(&scenarios().join("s2_multi_flow.cfg")).map_err(|e| e.to_string())?;
    let mut ticks = 0;
    for strategy in StrategyKind::ALL {
        let mut s = base.clone();
        s.config.strategy = strategy;
        s.config.record_trace = true;
        let out = s.run().map_err(|e| e.to_string())?;
        let topo = out.state.topology();
        for t in &out.trace {
            for f in &t.flows {
                let err = (f.offered_bytes - f.delivered_bytes - f.dropped_bytes).abs();
                ensure(err <= 1e-9 * f.offered_bytes, || {
                    format!("{strategy} t={}: flow {} off by {err}", t.clock_s, f.flow_id)
                })?;
            }
            for (l, &c) in topo.links().iter().zip(&t.link_carried_bps) {
                ensure(c <= l.capacity_bps * (1.0 + 1e-9), || {
                    format!("{strategy} t={}: {} carries {c}", t.clock_s, topo.link_label(l.id))
                })?;
            }
            ticks += 1;
        }
    }
    Ok(format!("{ticks} ticks over 3 strategies"))
}

fn single_flow_trend() -> Outcome {
    let base = Scenario::load(&scenarios().join("s1_single_flow.cfg")).map_err(|e| e.to_string())?;
    let run = |pps: f64, strategy: StrategyKind| -> Result<(f64, f64), String> {
        let mut s = base.clone();
        s.flows.iter_mut().for_each(|f| f.rate_pps = pps);
        s.config.strategy = strategy;
        s.config.record_trace = true;
        let out = s.run().map_err(|e| e.to_string())?;
        let steady = out.windowed_throughput_bps(10.0, s.config.duration_s)[0].1;
        Ok((out.report(&s.name).avg_loss_pct, steady))
    };
    let mut rows = Vec::new();
    for pps in [1000.0, 2000.0, 3000.0, 4000.0, 5000.0, 10000.0] {
        let offered = pps * 1000.0 * 8.0;
        let (none_loss, none_thr) = run(pps, StrategyKind::None)?;
        let (pro_loss, pro_thr) = run(pps, StrategyKind::Proactive)?;
        let none_want = offered.min(10e6);
        let pro_want = offered.min(20e6);
        ensure(close_rel(none_thr, none_want, 0.02), || format!("{pps} pps none: {none_thr} vs {none_want}"))?;
        ensure(close_rel(pro_thr, pro_want, 0.02), || format!("{pps} pps proactive: {pro_thr} vs {pro_want}"))?;
        ensure(pro_loss <= none_loss + CMP_TOL, || format!("{pps} pps: proactive loss {pro_loss} > none {none_loss}"))?;
        if pps >= 2000.0 {
            ensure(pro_loss < none_loss - CMP_TOL, || format!("{pps} pps: proactive loss {pro_loss} not below {none_loss}"))?;
        }
        rows.push(format!("{pps}:{none_loss:.1}/{pro_loss:.1}%"));
    }
    Ok(format!("loss none/proactive {}", rows.join(" ")))
}

fn multi_flow_trend() -> Outcome {
    let base = Scenario::load(&scenarios().join("s2_multi_flow.cfg")).map_err(|e| e.to_string())?;
    let run = |n: usize, strategy: StrategyKind| -> Result<RunReport, String> {
        let mut s = base.clone();
        s.flows.truncate(n);
        s.config.strategy = strategy;
        Ok(s.run().map_err(|e| e.to_string())?.report(&s.name))
    };
    let mut violations = Vec::new();
    for n in 1..=10 {
        let none = run(n, StrategyKind::None)?;
        let re = run(n, StrategyKind::Reactive)?;
        let pro = run(n, StrategyKind::Proactive)?;
        let (rl, pl) = (re.avg_loss_pct, pro.avg_loss_pct);
        let (rt, pt) = (re.avg_throughput_bps / 1e6, pro.avg_throughput_bps / 1e6);
        let (rd, pd) = (re.avg_delay_ms, pro.avg_delay_ms);
        if pl > rl + CMP_TOL {
            violations.push(format!("n={n} loss {pl:.3} > {rl:.3}"));
        }
        if n >= 8 && pl >= rl - CMP_TOL {
            violations.push(format!("n={n} loss {pl:.3} not < {rl:.3}"));
        }
        if n >= 8 && pt < rt - CMP_TOL {
            violations.push(format!("n={n} throughput {pt:.3} < {rt:.3} Mbps"));
        }
        if n >= 9 && pd > rd + CMP_TOL {
            violations.push(format!("n={n} delay {pd:.2} > {rd:.2} ms"));
        }
        if n <= 4 {
            let losses = [none.avg_loss_pct, rl, pl];
            let thr = [none.avg_throughput_bps, re.avg_throughput_bps, pro.avg_throughput_bps];
            let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
            if spread(&losses) > 1.0 {
                violations.push(format!("n={n} loss spread {:.3} points", spread(&losses)));
            }
            if spread(&thr) > 0.01 * thr.iter().cloned().fold(0.0, f64::max) {
                violations.push(format!("n={n} throughput spread above 1%"));
            }
        }
    }
    if violations.is_empty() {
        Ok("all flow counts follow the expected ordering".into())
    } else {
        Err(violations.join("; "))
    }
}

fn hard_timeout_law() -> Outcome {
    let topo = Topology::load(&builtin("abilene").unwrap()).unwrap();
    let (h1, h2) = (topo.node_by_name("H1").unwrap(), topo.node_by_name("H2").unwrap());
    let ab = topo.link_between(topo.node_by_name("A").unwrap(), topo.node_by_name("B").unwrap()).unwrap();
    let alt = topo.virtual_overlay(&[ab].into_iter().collect()).unwrap().shortest_path(h1, h2).unwrap().unwrap();
    let mut rng = StdRng::seed_from_u64(0x7105);
    let mut checked = 0;
    for _ in 0..100 {
        let install_tick = rng.random_range(0..50u64);
        let timeout_ticks = rng.random_range(1..80u64);
        let flow = Flow::new(FlowId(1), h1, h2, 500.0, 1000.0, 0.0, 60.0).unwrap();
        let mut st = SimState::new(topo.clone(), vec![flow], 0.1, 1.0, 0).unwrap();
        let default = st.default_route(FlowId(1)).unwrap().clone();
        for _ in 0..install_tick {
            st.step();
        }
        st.install_flow_entry(FlowId(1), alt.clone(), timeout_ticks as f64 * 0.1).map_err(|e| e.to_string())?;
        for _ in 0..timeout_ticks + 20 {
            let k = st.tick();
            let inside = k >= install_tick && k < install_tick + timeout_ticks;
            let route = st.current_route(FlowId(1)).unwrap();
            ensure(route == if inside { &alt } else { &default }, || {
                format!("install@{install_tick} timeout {timeout_ticks} ticks: wrong route at tick {k}")
            })?;
            let summary = st.step();
            let used_alt = summary.link_carried_bps[alt.links[1].index()] > 0.0;
            ensure(used_alt == inside, || format!("traffic disagrees with the table at tick {k}"))?;
            checked += 1;
        }
    }
    Ok(format!("100 random entries, {checked} ticks checked"))
}

/// Switches S X Y Z W T; S-T direct plus detours S-X-T, S-Y-T, S-Z-W-T.
/// Hosts Hs/Hd at the ends and Hx/Hy/Hw for background load.
fn admission_fixture(detour_mbps: f64) -> Topology {
    let mut spec = TopologySpec::default();
    for s in ["S", "X", "Y", "Z", "W", "T"] {
        spec.switch(s);
    }
    for h in ["Hs", "Hd", "Hx", "Hy", "Hw"] {
        spec.host(h);
    }
    let m = 1e6;
    spec.cable("S", "T", 20.0 * m, 1.0)
        .cable("S", "X", 20.0 * m, 1.0)
        .cable("X", "T", detour_mbps * m, 1.0)
        .cable("S", "Y", 20.0 * m, 1.0)
        .cable("Y", "T", detour_mbps * m, 1.0)
        .cable("S", "Z", 20.0 * m, 1.0)
        .cable("Z", "W", 20.0 * m, 1.0)
        .cable("W", "T", detour_mbps * m, 1.0);
    for (h, s) in [("Hs", "S"), ("Hd", "T"), ("Hx", "X"), ("Hy", "Y"), ("Hw", "W")] {
        spec.cable(h, s, 1000.0 * m, 0.1);
    }
    Topology::load(&spec).unwrap()
}

fn admission_recursion() -> Outcome {
    let topo = admission_fixture(20.0);
    let node = |n: &str| topo.node_by_name(n).unwrap();
    let link = |a: &str, b: &str| topo.link_between(node(a), node(b)).unwrap();
    let flow = Flow::new(FlowId(1), node("Hs"), node("Hd"), 1000.0, 1000.0, 0.0, 60.0).unwrap();
    let overlay = topo.virtual_overlay(&[link("S", "T")].into_iter().collect()).unwrap();
    let first = overlay.shortest_path(flow.src_host, flow.dst_host).unwrap().unwrap();
    ensure(first.contains(link("X", "T")), || "first alternate should run through X".into())?;

    // X->T already carries 14 Mbps: 20 - 14 - 8 < 0.
    let evidence = |busy: &dyn Fn(LinkId) -> Option<(f64, f64)>| -> BTreeMap<LinkId, LinkEvidence> {
        topo.links()
            .iter()
            .map(|l| {
                let (pu, rb_bps) = busy(l.id).unwrap_or((0.0, l.capacity_bps - flow.requested_bps()));
                (l.id, LinkEvidence { link_id: l.id, pu, rb_bps })
            })
            .collect()
    };
    let xt = link("X", "T");
    let ev = evidence(&|l| (l == xt).then_some((0.7, 20e6 - 14e6 - 8e6)));
    let d = admit_flow(&first, &flow, &ev, &BayesParams::default(), &overlay, ImpassableList::new());
    ensure(d.rounds.len() == 2, || format!("expected 2 rounds, got {}", d.rounds.len()))?;
    ensure(
        d.rounds[0].verdicts.iter().any(|v| matches!(v, LinkVerdict::InsufficientBandwidth { link, .. } if *link == xt)),
        || "first round should fail X->T on residual bandwidth".into(),
    )?;
    ensure(d.impassable.as_set() == &[xt].into_iter().collect::<BTreeSet<_>>(), || format!("IL {:?}", d.impassable))?;
    let admitted = d.admitted().ok_or_else(|| format!("expected admission, got {:?}", d.outcome))?;
    ensure(admitted.contains(link("Y", "T")) && !admitted.contains(xt), || "second alternate should run through Y".into())?;

    // Every core link at 90% with a sliver of residual: nothing is admissible.
    let congested = evidence(&|l| (topo.link(l).unwrap().capacity_bps == 20e6).then_some((0.9, 1.0)));
    let d = admit_flow(&first, &flow, &congested, &BayesParams::default(), &overlay, ImpassableList::new());
    ensure(d.outcome == AdmissionOutcome::Rejected(RejectReason::NoAdmissiblePath), || format!("{:?}", d.outcome))?;
    let mut il = BTreeSet::new();
    for (i, r) in d.rounds.iter().enumerate() {
        ensure(r.path.links.iter().all(|l| !il.contains(l)), || format!("round {i} reuses an impassable link"))?;
        let before = il.len();
        il.extend(r.verdicts.iter().filter(|v| !v.is_available()).map(|v| v.link()));
        ensure(il.len() > before, || format!("IL did not grow in round {i}"))?;
    }
    ensure(&il == d.impassable.as_set(), || "IL differs from the failing links".into())?;

    // In a running network: every detour ends on a 100 Mbps link at 65%
    // utilization, so the 16 Mbps flow on S-T must stay where it is.
    let topo = admission_fixture(100.0);
    let node = |n: &str| topo.node_by_name(n).unwrap();
    let mk = |id, src, mbps: f64| Flow::new(FlowId(id), node(src), node("Hd"), mbps * 125.0, 1000.0, 0.0, 60.0).unwrap();
    let flows = vec![mk(1, "Hs", 16.0), mk(2, "Hx", 65.0), mk(3, "Hy", 65.0), mk(4, "Hw", 65.0)];
    let cfg = SimConfig { strategy: StrategyKind::Proactive, ..SimConfig::default() };
    let mut sim = Simulation::new(topo.clone(), flows, cfg).map_err(|e| e.to_string())?;
    let default = sim.state().current_route(FlowId(1)).unwrap().clone();
    while sim.step().is_some() {
        ensure(sim.state().current_route(FlowId(1)) == Some(&default), || "flow left its route".into())?;
    }
    let rejected = sim
        .actions()
        .iter()
        .filter(|a| matches!(a.outcome, flowgate_core::controller::ActionOutcome::Rejected { .. }))
        .count();
    ensure(rejected == sim.actions().len() && rejected > 0, || format!("actions {:?}", sim.actions()))?;
    Ok(format!("IL {{X->T}} then admitted via Y; congested case rejected; {rejected} rejections in the live run"))
}

fn determinism() -> Outcome {
    let mut compared = 0;
    for cfg in ["s1_single_flow.cfg", "s2_multi_flow.cfg"] {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let status = Command::new(env!("CARGO_BIN_EXE_flowgate"))
                .args(["run", "--scenario"])
                .arg(scenarios().join(cfg))
                .arg("--out-dir")
                .arg(dir.path())
                .env_remove("FLOWGATE_STRATEGY")
                .env_remove("FLOWGATE_FORMAT")
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || format!("{cfg}: {}", String::from_utf8_lossy(&status.stderr)))?;
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
                .map_err(|e| e.to_string())?
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
                })
                .collect();
            files.sort();
            outputs.push(files);
        }
        ensure(outputs[0].len() == 2, || format!("{cfg}: expected CSV and JSON, got {}", outputs[0].len()))?;
        ensure(outputs[0] == outputs[1], || format!("{cfg}: outputs differ between runs"))?;
        compared += outputs[0].len();
    }
    Ok(format!("{compared} report files byte-identical across two runs"))
}
