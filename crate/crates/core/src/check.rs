//! Static well-formedness checks over a built [`Model`].

use std::collections::BTreeSet;
use std::fmt;

use crate::model::*;
use crate::text::Severity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckCode {
    IllegalStageEdge,
    MixedStreams,
    NonTransferBoundary,
    TriggerSameFlow,
    DanglingStage,
    UnreachableStage,
    GuardUndeclaredVar,
    EventEmptyRegion,
}

impl CheckCode {
    pub const ALL: [CheckCode; 8] = [
        CheckCode::IllegalStageEdge,
        CheckCode::MixedStreams,
        CheckCode::NonTransferBoundary,
        CheckCode::TriggerSameFlow,
        CheckCode::DanglingStage,
        CheckCode::UnreachableStage,
        CheckCode::GuardUndeclaredVar,
        CheckCode::EventEmptyRegion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckCode::IllegalStageEdge => "ILLEGAL_STAGE_EDGE",
            CheckCode::MixedStreams => "MIXED_STREAMS",
            CheckCode::NonTransferBoundary => "NON_TRANSFER_BOUNDARY",
            CheckCode::TriggerSameFlow => "TRIGGER_SAME_FLOW",
            CheckCode::DanglingStage => "DANGLING_STAGE",
            CheckCode::UnreachableStage => "UNREACHABLE_STAGE",
            CheckCode::GuardUndeclaredVar => "GUARD_UNDECLARED_VAR",
            CheckCode::EventEmptyRegion => "EVENT_EMPTY_REGION",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            CheckCode::DanglingStage | CheckCode::UnreachableStage => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for CheckCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The model element a finding is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Stage(StageId),
    Flow(FlowId),
    Trigger(TriggerId),
    Event(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub code: CheckCode,
    pub severity: Severity,
    pub element: Element,
    /// Rendered element, e.g. `A.release->A.receive`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.code, self.severity, self.location, self.message
        )
    }
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

/// Runs every check. The result is empty iff the model is well formed, and
/// is ordered by (machine path, element order, code).
pub fn validate(model: &Model) -> Vec<Finding> {
    let mut out: Vec<((String, usize), Finding)> = Vec::new();
    let nflows = model.flows.len();
    let ntriggers = model.triggers.len();
    let machine_of = |s: StageId| model.machine_path(model.stage(s).machine);
    let arc_label = |a: StageId, b: StageId| {
        format!("{}->{}", model.stage_path(a), model.stage_path(b))
    };

    let mut push = |key: (String, usize), code: CheckCode, element: Element, location: String, message: String| {
        out.push((
            key,
            Finding {
                code,
                severity: code.severity(),
                element,
                location,
                message,
            },
        ));
    };

    for id in model.flow_ids() {
        let f = model.flow(id);
        let (from, to) = (model.stage(f.from), model.stage(f.to));
        let key = (machine_of(f.from), id.0);
        let loc = arc_label(f.from, f.to);
        let cross = model.is_cross_machine(f.from, f.to);
        if cross && !legal_stage_edge(from.kind, to.kind, true) {
            push(
                key.clone(),
                CheckCode::NonTransferBoundary,
                Element::Flow(id),
                loc.clone(),
                format!(
                    "flow between machines must go transfer -> transfer, not {} -> {}",
                    from.kind, to.kind
                ),
            );
        } else if !cross && !legal_stage_edge(from.kind, to.kind, false) {
            push(
                key.clone(),
                CheckCode::IllegalStageEdge,
                Element::Flow(id),
                loc.clone(),
                format!("{} -> {} is not a legal movement", from.kind, to.kind),
            );
        }
        let thing = &model.thing(f.thing).name;
        for end in [f.from, f.to] {
            if let Some(other) = model.stream(end).filter(|s| *s != f.thing) {
                push(
                    key.clone(),
                    CheckCode::MixedStreams,
                    Element::Flow(id),
                    loc.clone(),
                    format!(
                        "{thing} flow touches {} which carries {}",
                        model.stage_path(end),
                        model.thing(other).name
                    ),
                );
                break;
            }
        }
    }

    let declared: BTreeSet<&str> = model.vars.iter().map(|v| v.name.as_str()).collect();
    for id in model.trigger_ids() {
        let t = model.trigger(id);
        let key = (machine_of(t.from), nflows + id.0);
        let loc = arc_label(t.from, t.to);
        let same_machine = !model.is_cross_machine(t.from, t.to);
        let same_stream = t.from == t.to
            || model
                .stream(t.from)
                .is_some_and(|s| model.stream(t.to) == Some(s));
        if same_machine && same_stream {
            push(
                key.clone(),
                CheckCode::TriggerSameFlow,
                Element::Trigger(id),
                loc.clone(),
                "trigger must lead from one flow to another".into(),
            );
        }
        if let Some(g) = &t.guard {
            let missing: Vec<&str> = g.vars().filter(|v| !declared.contains(v)).collect();
            if !missing.is_empty() {
                push(
                    key,
                    CheckCode::GuardUndeclaredVar,
                    Element::Trigger(id),
                    loc,
                    format!("guard reads undeclared {}", missing.join(", ")),
                );
            }
        }
    }

    let reachable = reachable_stages(model);
    for (i, stage) in model.stages.iter().enumerate() {
        let sid = StageId(i);
        let key = (machine_of(sid), nflows + ntriggers + i);
        let has_incoming = model.flows.iter().any(|f| f.to == sid)
            || model.triggers.iter().any(|t| t.to == sid);
        if matches!(stage.kind, StageKind::Receive | StageKind::Process) && !has_incoming {
            push(
                key,
                CheckCode::DanglingStage,
                Element::Stage(sid),
                model.stage_path(sid),
                format!("{} stage has no incoming arc", stage.kind),
            );
        } else if !reachable[i] {
            push(
                key,
                CheckCode::UnreachableStage,
                Element::Stage(sid),
                model.stage_path(sid),
                "no create stage or import reaches this stage".into(),
            );
        }
    }

    for (i, e) in model.events.iter().enumerate() {
        if e.region.is_empty() {
            push(
                (String::new(), i),
                CheckCode::EventEmptyRegion,
                Element::Event(e.name.clone()),
                e.name.clone(),
                "event region is empty".into(),
            );
        }
    }

    out.sort_by(|(ka, a), (kb, b)| ka.cmp(kb).then(a.code.cmp(&b.code)));
    out.into_iter().map(|(_, f)| f).collect()
}

/// Stages reachable over flows and triggers from create stages and from
/// transfer stages nothing flows into (imports from outside the model).
fn reachable_stages(model: &Model) -> Vec<bool> {
    let mut seen = vec![false; model.stages.len()];
    let mut stack: Vec<StageId> = model
        .stages
        .iter()
        .enumerate()
        .filter(|(i, s)| {
            s.kind == StageKind::Create
                || (s.kind == StageKind::Transfer
                    && !model.flows.iter().any(|f| f.to.0 == *i))
        })
        .map(|(i, _)| StageId(i))
        .collect();
    while let Some(s) = stack.pop() {
        if std::mem::replace(&mut seen[s.0], true) {
            continue;
        }
        let next = model
            .flows
            .iter()
            .filter(|f| f.from == s)
            .map(|f| f.to)
            .chain(model.triggers.iter().filter(|t| t.from == s).map(|t| t.to));
        stack.extend(next.filter(|n| !seen[n.0]));
    }
    seen
}
