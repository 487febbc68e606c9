#![allow(dead_code)]

use std::fmt::Write;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tm_core::engine::Scenario;
use tm_core::inventory::{Delivery, InventoryState, Request, DELIVERY_ENTRY, REQUEST_ENTRY};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const KINDS: [&str; 5] = ["create", "process", "release", "transfer", "receive"];

fn pick<'a, T>(rng: &mut ChaCha8Rng, xs: &'a [T]) -> &'a T {
    &xs[rng.random_range(0..xs.len())]
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    next_machine: usize,
    stages: Vec<(String, &'static str)>,
    out: String,
}

impl Gen<'_> {
    fn machine(&mut self, prefix: &str, depth: usize, pad: &str) {
        let name = format!("M{}", self.next_machine);
        self.next_machine += 1;
        let path = if prefix.is_empty() {
            name.clone()
        } else {
            format!("{prefix}.{name}")
        };
        let mut kinds: Vec<&'static str> = KINDS.iter().copied().filter(|_| self.rng.random_bool(0.6)).collect();
        for i in (1..kinds.len()).rev() {
            let j = self.rng.random_range(0..=i);
            kinds.swap(i, j);
        }
        let _ = writeln!(self.out, "{pad}machine {name} {{");
        if !kinds.is_empty() {
            let _ = writeln!(self.out, "{pad}  stages {};", kinds.join(", "));
        }
        for k in kinds {
            self.stages.push((format!("{path}.{k}"), k));
        }
        if depth < 2 {
            for _ in 0..self.rng.random_range(0..=2) {
                self.machine(&path, depth + 1, &format!("{pad}  "));
            }
        }
        let _ = writeln!(self.out, "{pad}}}");
    }
}

fn description(rng: &mut ChaCha8Rng) -> String {
    const CHARS: [&str; 10] = ["a", "Z", " ", "\\\"", "\\\\", "\\n", "\\t", "é", "ß", "7"];
    (0..rng.random_range(0..12)).map(|_| *pick(rng, &CHARS)).collect()
}

fn operand(rng: &mut ChaCha8Rng, vars: &[String]) -> String {
    match rng.random_range(0..3) {
        0 if !vars.is_empty() => pick(rng, vars).clone(),
        1 => format!("token.f{}", rng.random_range(0..3)),
        _ => rng.random_range(-99..100i64).to_string(),
    }
}

/// Text of a random model that parses and builds. It need not be free of
/// check findings.
pub fn random_model_text(rng: &mut ChaCha8Rng) -> String {
    let mut g = Gen {
        rng,
        next_machine: 0,
        stages: Vec::new(),
        out: String::new(),
    };
    let n = g.rng.random_range(0..1000);
    let _ = writeln!(g.out, "model G{n} {{");
    let things: Vec<String> = (0..g.rng.random_range(1..4)).map(|i| format!("T{i}")).collect();
    for t in &things {
        let _ = writeln!(g.out, "  thing {t};");
    }
    let vars: Vec<String> = (0..g.rng.random_range(0..4)).map(|i| format!("v{i}")).collect();
    for v in &vars {
        if g.rng.random_bool(0.5) {
            let _ = writeln!(g.out, "  var {v} = {};", g.rng.random_range(-50..50));
        } else {
            let _ = writeln!(g.out, "  var {v};");
        }
    }
    for _ in 0..g.rng.random_range(1..4) {
        g.machine("", 0, "  ");
    }

    let stages = std::mem::take(&mut g.stages);
    let rng = g.rng;
    let mut out = g.out;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut arcs: Vec<(String, String)> = Vec::new();
    if stages.len() >= 2 {
        for _ in 0..rng.random_range(0..10) {
            let a = rng.random_range(0..stages.len());
            let b = rng.random_range(0..stages.len());
            if a != b && !pairs.contains(&(a, b)) {
                pairs.push((a, b));
            }
        }
    }
    // The first few arcs are flows and the rest triggers, so every arc has
    // distinct endpoints and an arc region names exactly one of them.
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (from, to) = (&stages[*a].0, &stages[*b].0);
        arcs.push((from.clone(), to.clone()));
        if i < 6 {
            let _ = writeln!(out, "  flow {}: {from} -> {to};", pick(rng, &things));
            continue;
        }
        let _ = write!(out, "  trigger {from} -> {to}");
        if rng.random_bool(0.6) {
            let ops = ["<", "<=", "==", ">=", ">"];
            let rhs = if rng.random_bool(0.5) {
                rng.random_range(-9..10i64).to_string()
            } else {
                format!("w{}", rng.random_range(0..3))
            };
            let _ = write!(out, " when w{} {} {rhs}", rng.random_range(0..3), pick(rng, &ops));
        }
        out.push_str(";\n");
    }

    let actionable: Vec<&String> = stages
        .iter()
        .filter(|(_, k)| matches!(*k, "create" | "process"))
        .map(|(p, _)| p)
        .collect();
    if !actionable.is_empty() {
        for _ in 0..rng.random_range(0..3) {
            let _ = writeln!(out, "  action {} {{", pick(rng, &actionable));
            for _ in 0..rng.random_range(0..3) {
                let target = if !vars.is_empty() && rng.random_bool(0.5) {
                    pick(rng, &vars).clone()
                } else {
                    format!("token.f{}", rng.random_range(0..3))
                };
                let a = operand(rng, &vars);
                let value = match rng.random_range(0..3) {
                    0 => a,
                    1 => format!("{a} + {}", operand(rng, &vars)),
                    _ => format!("{a} - {}", operand(rng, &vars)),
                };
                let _ = writeln!(out, "    {target} = {value};");
            }
            out.push_str("  }\n");
        }
    }

    let nevents = rng.random_range(0..5);
    for i in 0..nevents {
        let mut region = Vec::new();
        for _ in 0..rng.random_range(0..3) {
            if !arcs.is_empty() && rng.random_bool(0.4) {
                let (a, b) = pick(rng, &arcs);
                region.push(format!("{a} -> {b}"));
            } else if !stages.is_empty() {
                region.push(pick(rng, &stages).0.clone());
            }
        }
        let _ = writeln!(
            out,
            "  event E{i} \"{}\" over {{ {} }};",
            description(rng),
            region.join(", ")
        );
    }
    if nevents >= 2 {
        out.push_str("  chronology {\n");
        for _ in 0..rng.random_range(0..4) {
            let a = rng.random_range(0..nevents - 1);
            let b = rng.random_range(a + 1..nevents);
            let _ = writeln!(out, "    E{a} -> E{b};");
        }
        if rng.random_bool(0.5) {
            let members: Vec<String> = (0..nevents).filter(|_| rng.random_bool(0.5)).map(|i| format!("E{i}")).collect();
            if !members.is_empty() {
                let tail = if rng.random_bool(0.5) { " then loop" } else { "" };
                let _ = writeln!(out, "    par {{ {} }}{tail};", members.join(", "));
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// One step of an inventory workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Request(u64),
    Delivery(u64),
}

pub fn random_ops(rng: &mut ChaCha8Rng, len: usize) -> Vec<Op> {
    (0..len)
        .map(|_| {
            let q = rng.random_range(1..=100);
            if rng.random_bool(0.6) {
                Op::Request(q)
            } else {
                Op::Delivery(q)
            }
        })
        .collect()
}

/// The same workload as a simulation scenario, one injection per op, each
/// far enough apart that the model settles in between.
pub fn ops_scenario(current: u64, minimum: u64, ops: &[Op]) -> Scenario {
    let mut sc = Scenario::default()
        .set("current_stock", current as i64)
        .set("minimum", minimum as i64);
    for (i, op) in ops.iter().enumerate() {
        let tick = 1000 * i as u64;
        sc = match *op {
            Op::Request(q) => sc.inject("Request", REQUEST_ENTRY, tick, &[("qty", q as i64)]),
            Op::Delivery(q) => sc.inject("Item", DELIVERY_ENTRY, tick, &[("qty", q as i64)]),
        };
    }
    sc
}

/// Result of replaying a workload directly against the domain operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub state: InventoryState,
    /// Quantities issued to requesters, in order.
    pub released: Vec<u64>,
    pub received: u64,
}

pub fn replay(current: u64, minimum: u64, ops: &[Op]) -> Replay {
    let mut state = InventoryState::new(current, minimum, 200);
    let mut released = Vec::new();
    let mut received = 0;
    for (i, op) in ops.iter().enumerate() {
        match *op {
            Op::Request(q) => {
                let o = state
                    .handle_request(Request::new(format!("r{i}"), "item", q, "dept"))
                    .expect("positive quantity");
                if o.delivered > 0 {
                    released.push(o.delivered);
                }
            }
            Op::Delivery(q) => {
                received += q;
                released.extend(state.receive_delivery(&Delivery::new("vendor", q)).into_iter().map(|(_, n)| n));
            }
        }
    }
    Replay {
        state,
        released,
        received,
    }
}
