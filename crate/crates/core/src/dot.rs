//! Graphviz export of models and event chronologies.

use std::fmt::Write;

use crate::model::{Chronology, MachineId, Model};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Machines become nested clusters and stages become nodes labelled with
/// their kind. Flows are solid edges labelled with the thing, triggers are
/// dashed edges labelled with their guard.
pub fn export_dot(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&model.name));
    out.push_str("  compound=true;\n  node [shape=box];\n");
    for &root in &model.roots {
        write_machine(model, root, 1, &mut out);
    }
    for id in model.flow_ids() {
        let f = model.flow(id);
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&model.stage_path(f.from)),
            quote(&model.stage_path(f.to)),
            quote(&model.thing(f.thing).name)
        );
    }
    for id in model.trigger_ids() {
        let t = model.trigger(id);
        let guard = t.guard.as_ref().map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed, label={}];",
            quote(&model.stage_path(t.from)),
            quote(&model.stage_path(t.to)),
            quote(&guard)
        );
    }
    out.push_str("}\n");
    out
}

fn write_machine(model: &Model, id: MachineId, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let m = model.machine(id);
    let _ = writeln!(out, "{pad}subgraph {} {{", quote(&format!("cluster_{}", model.machine_path(id))));
    let _ = writeln!(out, "{pad}  label={};", quote(&m.name));
    for &s in &m.stages {
        let _ = writeln!(
            out,
            "{pad}  {} [label={}];",
            quote(&model.stage_path(s)),
            quote(model.stage(s).kind.as_str())
        );
    }
    for &sub in &m.submachines {
        write_machine(model, sub, depth + 1, out);
    }
    let _ = writeln!(out, "{pad}}}");
}

/// Events become nodes and sequence edges become edges. Each parallel group
/// gets its members ranked side by side and joined by a bar node; a looping
/// group also gets a dashed back-edge from the bar to its members.
pub fn export_chronology_dot(chrono: &Chronology) -> String {
    let mut out = String::from("digraph chronology {\n  rankdir=TB;\n  node [shape=ellipse];\n");
    for name in chrono.alphabet() {
        let _ = writeln!(out, "  {};", quote(name));
    }
    for (a, b) in &chrono.edges {
        let _ = writeln!(out, "  {} -> {};", quote(a), quote(b));
    }
    for (i, g) in chrono.parallel_groups.iter().enumerate() {
        let join = quote(&format!("join{i}"));
        let members: Vec<String> = g.members.iter().map(|m| quote(m)).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", members.join("; "));
        let _ = writeln!(
            out,
            "  {join} [shape=box, style=filled, fillcolor=black, label=\"\", height=0.08, width=2];"
        );
        for m in &members {
            let _ = writeln!(out, "  {m} -> {join};");
        }
        if g.then_loop {
            for m in &members {
                let _ = writeln!(out, "  {join} -> {m} [style=dashed, constraint=false, label=\"loop\"];");
            }
        }
    }
    out.push_str("}\n");
    out
}
