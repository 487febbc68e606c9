use std::fmt::Write;

use crate::model::*;

/// Renders a model in canonical form: two-space indentation, one arc per
/// line, LF line endings.
pub fn emit(model: &Model) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "model {} {{", model.name);
    for t in &model.things {
        let _ = writeln!(w, "  thing {};", t.name);
    }
    for v in &model.vars {
        if v.initial == 0 {
            let _ = writeln!(w, "  var {};", v.name);
        } else {
            let _ = writeln!(w, "  var {} = {};", v.name, v.initial);
        }
    }
    for &root in &model.roots {
        emit_machine(model, root, 1, w);
    }
    for f in &model.flows {
        let _ = writeln!(
            w,
            "  flow {}: {} -> {};",
            model.thing(f.thing).name,
            model.stage_path(f.from),
            model.stage_path(f.to)
        );
    }
    for t in &model.triggers {
        let _ = write!(
            w,
            "  trigger {} -> {}",
            model.stage_path(t.from),
            model.stage_path(t.to)
        );
        if let Some(g) = &t.guard {
            let _ = write!(w, " when {g}");
        }
        w.push_str(";\n");
    }
    for a in &model.actions {
        let _ = writeln!(w, "  action {} {{", model.stage_path(a.stage));
        for e in &a.effects {
            let _ = writeln!(w, "    {} = {};", e.target, e.value);
        }
        w.push_str("  }\n");
    }
    for e in &model.events {
        let region: Vec<String> = e.region.iter().map(|r| model.region_label(*r)).collect();
        let _ = writeln!(
            w,
            "  event {} \"{}\" over {{ {} }};",
            e.name,
            escape(&e.description),
            region.join(", ")
        );
    }
    let chrono = &model.chronology;
    if !chrono.is_empty() {
        w.push_str("  chronology {\n");
        for (a, b) in &chrono.edges {
            let _ = writeln!(w, "    {a} -> {b};");
        }
        for g in &chrono.parallel_groups {
            let _ = write!(w, "    par {{ {} }}", g.members.join(", "));
            w.push_str(if g.then_loop { " then loop;\n" } else { ";\n" });
        }
        w.push_str("  }\n");
    }
    w.push_str("}\n");
    out
}

fn emit_machine(model: &Model, id: MachineId, depth: usize, w: &mut String) {
    let pad = "  ".repeat(depth);
    let m = model.machine(id);
    if m.stages.is_empty() && m.submachines.is_empty() {
        let _ = writeln!(w, "{pad}machine {} {{}}", m.name);
        return;
    }
    let _ = writeln!(w, "{pad}machine {} {{", m.name);
    if !m.stages.is_empty() {
        let kinds: Vec<&str> = m
            .stages
            .iter()
            .map(|s| model.stage(*s).kind.as_str())
            .collect();
        let _ = writeln!(w, "{pad}  stages {};", kinds.join(", "));
    }
    for &sub in &m.submachines {
        emit_machine(model, sub, depth + 1, w);
    }
    let _ = writeln!(w, "{pad}}}");
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}
