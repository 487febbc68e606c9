//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use tm_core::check::{validate, CheckCode};
use tm_core::dot::{export_chronology_dot, export_dot};
use tm_core::engine::{check_chronology, detect_events, init_simulation, EventOccurrence, Scenario, Trace, Violation};
use tm_core::inventory::*;
use tm_core::model::{legal_stage_edge, Model, StageKind};
use tm_core::text::{emit, parse, Severity};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const MAX_TICKS: u64 = 10_000;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > limit {
        Err(format!("{detail}; took {took:?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail} in {took:?}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn simulate<'m>(model: &'m Model, sc: &Scenario) -> (Trace, tm_core::engine::SimState<'m>) {
    let mut sim = init_simulation(model, sc).expect("scenario initialises");
    let trace = sim.run(MAX_TICKS);
    (trace, sim)
}

fn names(occ: &[EventOccurrence]) -> Vec<&str> {
    occ.iter().map(|o| o.event.as_str()).collect()
}

fn adjacency() -> Outcome {
    let start = Instant::now();
    use StageKind::*;
    let intra = [
        (Transfer, Receive),
        (Receive, Process),
        (Receive, Release),
        (Process, Release),
        (Create, Process),
        (Create, Release),
        (Release, Transfer),
    ];
    let mut checked = 0;
    for from in StageKind::ALL {
        for to in StageKind::ALL {
            for cross in [false, true] {
                let want = if cross {
                    (from, to) == (Transfer, Transfer)
                } else {
                    intra.contains(&(from, to))
                };
                ensure(legal_stage_edge(from, to, cross) == want, || {
                    format!("{from} -> {to} (cross={cross}) should be {}", if want { "legal" } else { "illegal" })
                })?;
                checked += 1;
            }
        }
    }
    ensure(checked == 50, || format!("checked {checked} combinations"))?;
    within(start, Duration::from_secs(1), "50 combinations match, 7 intra + 1 cross legal".into())
}

fn corpus_clean() -> Outcome {
    let start = Instant::now();
    let findings = validate(&build_inventory_model());
    let errors = findings.iter().filter(|f| f.severity == Severity::Error).count();
    ensure(errors == 0, || format!("inventory model has {errors} errors: {findings:?}"))?;
    let warnings = findings.len() - errors;

    let dir = root().join("fixtures/check");
    let mut hits: Vec<(CheckCode, Vec<String>)> = CheckCode::ALL.iter().map(|c| (*c, Vec::new())).collect();
    for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let model = parse(&text).map_err(|d| format!("{}: {d:?}", path.display()))?;
        let codes: BTreeSet<CheckCode> = validate(&model).into_iter().map(|f| f.code).collect();
        for (code, files) in hits.iter_mut() {
            if codes.contains(code) {
                files.push(path.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    }
    for (code, files) in &hits {
        ensure(files.len() == 1, || format!("{code} triggered by {files:?}, want exactly one fixture"))?;
    }
    within(
        start,
        Duration::from_secs(1),
        format!("inventory model: 0 errors, {warnings} warnings; 8 codes each hit by one fixture"),
    )
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0x7e57);
    for i in 0..200 {
        let text = random_model_text(&mut rng);
        let m = parse(&text).map_err(|d| format!("generated model {i} does not parse: {d:?}\n{text}"))?;
        let printed = emit(&m);
        let again = parse(&printed).map_err(|d| format!("emitted model {i} does not parse: {d:?}\n{printed}"))?;
        ensure(again == m, || format!("model {i} changed on round trip\n{text}\n---\n{printed}"))?;
    }
    let prev_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut crashes = 0;
    for _ in 0..200 {
        use rand::RngExt;
        let len = rng.random_range(0..256);
        let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        let text = String::from_utf8_lossy(&bytes).into_owned();
        if panic::catch_unwind(|| parse(&text)).is_err() {
            crashes += 1;
        }
    }
    panic::set_hook(prev_hook);
    ensure(crashes == 0, || format!("{crashes} of 200 random inputs crashed the parser"))?;
    within(start, Duration::from_secs(10), "200 models round-trip, 200 random byte strings parsed without panicking".into())
}

fn three_cases() -> Outcome {
    let start = Instant::now();
    let model = build_inventory_model();
    let cases = [
        ("above", 100, 20, 30, OutcomeKind::FullDelivery, 70, 0),
        ("partial", 25, 20, 10, OutcomeKind::PartialDelivery, 20, 1),
        ("below", 20, 20, 5, OutcomeKind::Queued, 20, 1),
    ];
    let mut summary = Vec::new();
    for (name, current, minimum, qty, kind, stock, queue) in cases {
        let mut oracle = InventoryState::new(current, minimum, 200);
        let expected = oracle
            .handle_request(Request::new("r", "item", qty, "dept"))
            .map_err(|e| e.to_string())?;
        ensure(expected.kind == kind && oracle.current_stock == stock && oracle.queue.len() == queue, || {
            format!("{name}: oracle gave {expected:?}, stock {}, queue {}", oracle.current_stock, oracle.queue.len())
        })?;

        let (_, sim) = simulate(&model, &single_request(current as i64, minimum as i64, qty as i64));
        let got = outcome_of(&sim, qty);
        let sim_stock = sim.var("current_stock");
        let sim_queue = sim.var("queued_count");
        ensure(
            got == expected && sim_stock == stock as i64 && sim_queue == queue as i64,
            || format!("{name}: simulation gave {got:?}, stock {sim_stock}, queue {sim_queue}; oracle {expected:?}"),
        )?;
        summary.push(format!("{kind:?} stock {stock} queue {queue}"));
    }
    within(start, Duration::from_secs(1), summary.join(", "))
}

fn event_chronology() -> Outcome {
    let start = Instant::now();
    let model = build_inventory_model();
    let expected: [(&str, &[&str]); 3] = [
        ("above_min", &["E1", "E2", "E3", "E4", "E5", "E6", "E7"]),
        ("partial", &["E1", "E2", "E3", "E4", "E5", "E8", "E9"]),
        ("below_min", &["E1", "E2", "E10", "E11"]),
    ];
    for (name, want) in expected {
        let (trace, _) = simulate(&model, &scenario(name).unwrap());
        let occ = detect_events(&model, &trace);
        ensure(names(&occ) == want, || format!("{name}: events {:?}, want {want:?}", names(&occ)))?;
        let v = check_chronology(&model.chronology, &occ);
        ensure(v.is_empty(), || format!("{name}: unexpected violations {v:?}"))?;
    }

    // Play the above-minimum trace backwards, renumbering ticks.
    let (trace, _) = simulate(&model, &scenario("above_min").unwrap());
    let mut reversed = trace.clone();
    reversed.records.reverse();
    for (i, r) in reversed.records.iter_mut().enumerate() {
        r.time = i as u64 + 1;
    }
    let v = check_chronology(&model.chronology, &detect_events(&model, &reversed));
    ensure(!v.is_empty(), || "reversed trace raised no violation".into())?;

    let tampered = Scenario::parse(&std::fs::read_to_string(root().join("fixtures/tampered.tmrun")).unwrap())
        .map_err(|e| e.to_string())?;
    let (trace, _) = simulate(&model, &tampered);
    let tv = check_chronology(&model.chronology, &detect_events(&model, &trace));
    ensure(!tv.is_empty(), || "tampered scenario raised no violation".into())?;
    within(
        start,
        Duration::from_secs(1),
        format!("3 sequences exact with 0 violations; reversed trace {} violation(s), tampered {}", v.len(), tv.len()),
    )
}

fn replenishment() -> Outcome {
    let start = Instant::now();
    let model = build_inventory_model();
    let oracle = replay(20, 20, &[Op::Request(5), Op::Request(7), Op::Delivery(6)]);
    ensure(oracle.released == [5, 1], || format!("oracle released {:?}", oracle.released))?;
    let residual: Vec<u64> = oracle.state.queue.iter().map(|r| r.outstanding()).collect();
    ensure(residual == [6] && oracle.state.current_stock == 20, || {
        format!("oracle residual {residual:?}, stock {}", oracle.state.current_stock)
    })?;

    let (trace, sim) = simulate(&model, &scenario("replenish").unwrap());
    let released = released_quantities(&model, &trace);
    ensure(released == [5, 1], || format!("simulation released {released:?}"))?;
    ensure(sim.var("pending_total") == 6 && sim.var("queued_count") == 1, || {
        format!("simulation pending {} queued {}", sim.var("pending_total"), sim.var("queued_count"))
    })?;
    ensure(sim.var("current_stock") == 20, || format!("simulation stock {}", sim.var("current_stock")))?;

    let occ = detect_events(&model, &trace);
    let v = check_chronology(&model.chronology, &occ);
    ensure(v.is_empty(), || format!("valid replenishment trace violates {v:?}"))?;

    // Pull the second E5 in ahead of the first E7.
    let first_e7 = occ.iter().find(|o| o.event == "E7").ok_or("no E7")?.time;
    let mut bad = occ.clone();
    let second_e5 = bad.iter_mut().filter(|o| o.event == "E5").nth(1).ok_or("no second E5")?;
    second_e5.time = first_e7 - 1;
    let v = check_chronology(&model.chronology, &bad);
    ensure(v.iter().any(|x| matches!(x, Violation::Join { .. })), || format!("counterexample gave {v:?}"))?;
    within(
        start,
        Duration::from_secs(1),
        "released [5, 1], residual 6, stock 20; join holds, counterexample breaks it".into(),
    )
}

fn conservation() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0xC0FFEE);
    for seq in 0..1000 {
        use rand::RngExt;
        let minimum = rng.random_range(0..50);
        let initial = rng.random_range(minimum..minimum + 100);
        let len = rng.random_range(1..30);
        let ops = random_ops(&mut rng, len);
        let mut state = InventoryState::new(initial, minimum, 200);
        let (mut delivered_in, mut released_out) = (0u64, 0u64);
        for (i, op) in ops.iter().enumerate() {
            let before = state.current_stock;
            match *op {
                Op::Request(q) => {
                    let o = state.handle_request(Request::new(format!("r{i}"), "item", q, "dept")).unwrap();
                    released_out += o.delivered;
                    ensure(before < minimum || state.current_stock >= minimum, || {
                        format!("seq {seq} op {i}: stock fell from {before} to {} under minimum {minimum}", state.current_stock)
                    })?;
                }
                Op::Delivery(q) => {
                    let order: Vec<String> = state.queue.iter().map(|r| r.id.clone()).collect();
                    delivered_in += q;
                    let rel = state.receive_delivery(&Delivery::new("v", q));
                    for (k, (r, n)) in rel.iter().enumerate() {
                        released_out += n;
                        ensure(order.get(k) == Some(&r.id), || format!("seq {seq} op {i}: release order {k} broke FIFO"))?;
                    }
                }
            }
            ensure(initial + delivered_in == state.current_stock + released_out, || {
                format!("seq {seq} op {i}: {initial} + {delivered_in} != {} + {released_out}", state.current_stock)
            })?;
            let pending: u64 = state.queue.iter().map(|r| r.outstanding()).sum();
            ensure(state.pending_total == pending && state.queued_count == state.queue.len() as u64, || {
                format!("seq {seq} op {i}: pending_total {} vs {pending}, queued_count {} vs {}", state.pending_total, state.queued_count, state.queue.len())
            })?;
        }
    }
    within(start, Duration::from_secs(10), "1000 sequences keep stock, floor and queue accounting".into())
}

fn rfq_safety() -> Outcome {
    let start = Instant::now();
    struct Search {
        paths: u64,
        unsafe_paths: u64,
        most_loops: usize,
    }
    fn dfs(state: &RfqState, path: &mut Vec<RfqAction>, s: &mut Search) {
        s.paths += 1;
        if state.phase == RfqPhase::LtsaCreated && !path.contains(&RfqAction::ManagerApprove) {
            s.unsafe_paths += 1;
        }
        let loops = path.windows(2).filter(|w| w == &[RfqAction::TeamLeaderReject, RfqAction::SupervisorModify]).count();
        s.most_loops = s.most_loops.max(loops);
        if path.len() == 12 {
            return;
        }
        for a in RfqAction::ALL {
            if let Ok(next) = state.transition(a) {
                path.push(a);
                dfs(&next, path, s);
                path.pop();
            }
        }
    }
    let mut s = Search {
        paths: 0,
        unsafe_paths: 0,
        most_loops: 0,
    };
    dfs(&RfqState::new("buyer"), &mut Vec::new(), &mut s);
    ensure(s.unsafe_paths == 0, || format!("{} paths reach an LTSA without manager approval", s.unsafe_paths))?;
    ensure(s.most_loops >= 3, || format!("reject/modify loop traversed at most {} times", s.most_loops))?;

    use RfqAction::*;
    let looped = [
        SupervisorIssue,
        TeamLeaderReject,
        SupervisorModify,
        TeamLeaderReject,
        SupervisorModify,
        TeamLeaderReject,
        SupervisorModify,
        TeamLeaderApprove,
        ManagerApprove,
        BuyerDetail,
        CreateLtsa,
    ];
    let end = looped
        .iter()
        .try_fold(RfqState::new("buyer"), |st, a| st.transition(*a))
        .map_err(|e| e.to_string())?;
    ensure(end.phase == RfqPhase::LtsaCreated, || format!("looped path ended in {:?}", end.phase))?;
    within(
        start,
        Duration::from_secs(30),
        format!("{} legal action strings up to length 12, none unsafe; loop reaches {}", s.paths, s.most_loops),
    )
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let model = build_inventory_model();
    let twin = build_inventory_model();
    let mut runs = 0;
    let tampered = Scenario::parse(&std::fs::read_to_string(root().join("fixtures/tampered.tmrun")).unwrap())
        .map_err(|e| e.to_string())?;
    let scenarios: Vec<Scenario> = SCENARIOS
        .iter()
        .map(|(n, _)| scenario(n).unwrap())
        .chain([tampered])
        .collect();
    for sc in &scenarios {
        let a = simulate(&model, sc).0.render(&model);
        let b = simulate(&twin, sc).0.render(&twin);
        ensure(a == b, || "trace differs between runs".into())?;
        runs += 1;
    }
    ensure(export_dot(&model) == export_dot(&twin), || "model DOT differs".into())?;
    ensure(
        export_chronology_dot(&model.chronology) == export_chronology_dot(&twin.chronology),
        || "chronology DOT differs".into(),
    )?;
    within(start, Duration::from_secs(5), format!("{runs} scenarios and both DOT exports byte-identical"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("metamodel legality", adjacency),
        ("corpus cleanliness", corpus_clean),
        ("round-trip", round_trip),
        ("three-case reproduction", three_cases),
        ("event chronology", event_chronology),
        ("replenishment loop", replenishment),
        ("conservation", conservation),
        ("RFQ safety", rfq_safety),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: panicked", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
