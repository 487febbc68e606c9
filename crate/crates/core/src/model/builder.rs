use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::*;

/// Unresolved, name-based description of a model, as produced by the parser
/// or assembled by hand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelDecl {
    pub name: String,
    pub span: SourceSpan,
    pub things: Vec<ThingDecl>,
    pub vars: Vec<VarDecl>,
    pub machines: Vec<MachineDecl>,
    pub flows: Vec<FlowDecl>,
    pub triggers: Vec<TriggerDecl>,
    pub actions: Vec<ActionDecl>,
    pub events: Vec<EventDecl>,
    pub chronology: ChronologyDecl,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ThingDecl {
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub initial: Option<i64>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MachineDecl {
    pub name: String,
    pub span: SourceSpan,
    pub stages: Vec<(StageKind, SourceSpan)>,
    pub submachines: Vec<MachineDecl>,
}

/// A dotted stage reference such as `Inventory.FullIssue.create`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathRef {
    pub path: String,
    pub span: SourceSpan,
}

impl PathRef {
    pub fn new(path: impl Into<String>) -> Self {
        PathRef {
            path: path.into(),
            span: SourceSpan::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowDecl {
    pub thing: String,
    pub thing_span: SourceSpan,
    pub from: PathRef,
    pub to: PathRef,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriggerDecl {
    pub from: PathRef,
    pub to: PathRef,
    pub guard: Option<Guard>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionDecl {
    pub stage: PathRef,
    pub effects: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionDecl {
    Stage(PathRef),
    Arc(PathRef, PathRef),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventDecl {
    pub name: String,
    pub description: String,
    pub span: SourceSpan,
    pub region: Vec<RegionDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeDecl {
    pub before: String,
    pub after: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupDecl {
    pub members: Vec<String>,
    pub then_loop: bool,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChronologyDecl {
    pub edges: Vec<EdgeDecl>,
    pub groups: Vec<GroupDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a model must contain at least one machine")]
    EmptyModel { span: SourceSpan },
    #[error("duplicate {kind} `{name}`")]
    DuplicateIdentifier {
        kind: &'static str,
        name: String,
        span: SourceSpan,
    },
    #[error("unresolved {kind} `{name}`")]
    UnresolvedReference {
        kind: &'static str,
        name: String,
        span: SourceSpan,
    },
    #[error("flow from `{path}` to itself")]
    SelfLoop { path: String, span: SourceSpan },
    #[error("action attached to `{path}`; actions belong on create or process stages")]
    ActionStage { path: String, span: SourceSpan },
    #[error("chronology sequence edges form a cycle through `{event}`")]
    CyclicChronology { event: String, span: SourceSpan },
}

impl ModelError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ModelError::EmptyModel { span }
            | ModelError::DuplicateIdentifier { span, .. }
            | ModelError::UnresolvedReference { span, .. }
            | ModelError::SelfLoop { span, .. }
            | ModelError::ActionStage { span, .. }
            | ModelError::CyclicChronology { span, .. } => *span,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ModelError::EmptyModel { .. } => "EmptyModel",
            ModelError::DuplicateIdentifier { .. } => "DuplicateIdentifier",
            ModelError::UnresolvedReference { .. } => "UnresolvedReference",
            ModelError::SelfLoop { .. } => "SelfLoop",
            ModelError::ActionStage { .. } => "ActionStage",
            ModelError::CyclicChronology { .. } => "CyclicChronology",
        }
    }
}

fn dup(kind: &'static str, name: &str, span: SourceSpan) -> ModelError {
    ModelError::DuplicateIdentifier {
        kind,
        name: name.to_owned(),
        span,
    }
}

fn unresolved(kind: &'static str, name: &str, span: SourceSpan) -> ModelError {
    ModelError::UnresolvedReference {
        kind,
        name: name.to_owned(),
        span,
    }
}

/// Resolves names, allocates ids, and cross-links a model description.
///
/// Guards may name undeclared variables and event regions may be empty;
/// both are reported by the checker rather than rejected here.
pub fn build_model(decl: &ModelDecl) -> Result<Model, ModelError> {
    if decl.machines.is_empty() {
        return Err(ModelError::EmptyModel { span: decl.span });
    }

    let mut things = Vec::new();
    for t in &decl.things {
        if things.iter().any(|x: &ThingType| x.name == t.name) {
            return Err(dup("thing", &t.name, t.span));
        }
        things.push(ThingType {
            name: t.name.clone(),
        });
    }

    let mut vars = Vec::new();
    for v in &decl.vars {
        if vars.iter().any(|x: &GlobalVar| x.name == v.name) {
            return Err(dup("variable", &v.name, v.span));
        }
        vars.push(GlobalVar {
            name: v.name.clone(),
            initial: v.initial.unwrap_or(0),
        });
    }

    let mut tree = Tree::default();
    let mut seen = BTreeSet::new();
    for m in &decl.machines {
        if !seen.insert(m.name.as_str()) {
            return Err(dup("machine", &m.name, m.span));
        }
        let id = tree.add(m, None, "")?;
        tree.roots.push(id);
    }

    let resolve = |p: &PathRef| -> Result<StageId, ModelError> {
        tree.index
            .get(&p.path)
            .copied()
            .ok_or_else(|| unresolved("stage", &p.path, p.span))
    };

    let mut flows = Vec::new();
    for f in &decl.flows {
        let thing = things
            .iter()
            .position(|t| t.name == f.thing)
            .map(ThingId)
            .ok_or_else(|| unresolved("thing", &f.thing, f.thing_span))?;
        let from = resolve(&f.from)?;
        let to = resolve(&f.to)?;
        if from == to {
            return Err(ModelError::SelfLoop {
                path: f.from.path.clone(),
                span: f.from.span,
            });
        }
        flows.push(FlowArc { from, to, thing });
    }

    let mut triggers = Vec::new();
    for t in &decl.triggers {
        triggers.push(TriggerArc {
            from: resolve(&t.from)?,
            to: resolve(&t.to)?,
            guard: t.guard.clone(),
        });
    }

    let declared = |name: &str| vars.iter().any(|v| v.name == name);
    let mut actions = Vec::new();
    for a in &decl.actions {
        let stage = resolve(&a.stage)?;
        if !matches!(
            tree.stages[stage.0].kind,
            StageKind::Create | StageKind::Process
        ) {
            return Err(ModelError::ActionStage {
                path: a.stage.path.clone(),
                span: a.stage.span,
            });
        }
        for eff in &a.effects {
            let mut names = Vec::new();
            if let Target::Var(v) = &eff.target {
                names.push(v);
            }
            let operands: Vec<&Operand> = match &eff.value {
                Expr::Value(x) => vec![x],
                Expr::Add(x, y) | Expr::Sub(x, y) => vec![x, y],
            };
            names.extend(operands.into_iter().filter_map(|o| match o {
                Operand::Var(v) => Some(v),
                _ => None,
            }));
            if let Some(bad) = names.into_iter().find(|n| !declared(n)) {
                return Err(unresolved("variable", bad, a.stage.span));
            }
        }
        actions.push(Action {
            stage,
            effects: a.effects.clone(),
        });
    }

    let mut events: Vec<EventSpec> = Vec::new();
    for e in &decl.events {
        if events.iter().any(|x| x.name == e.name) {
            return Err(dup("event", &e.name, e.span));
        }
        let mut region = Vec::new();
        for r in &e.region {
            let rr = match r {
                RegionDecl::Stage(p) => RegionRef::Stage(resolve(p)?),
                RegionDecl::Arc(a, b) => {
                    let (from, to) = (resolve(a)?, resolve(b)?);
                    if let Some(i) = flows.iter().position(|f| f.from == from && f.to == to) {
                        RegionRef::Flow(FlowId(i))
                    } else if let Some(i) =
                        triggers.iter().position(|t| t.from == from && t.to == to)
                    {
                        RegionRef::Trigger(TriggerId(i))
                    } else {
                        let name = format!("{} -> {}", a.path, b.path);
                        return Err(unresolved("arc", &name, a.span));
                    }
                }
            };
            if !region.contains(&rr) {
                region.push(rr);
            }
        }
        events.push(EventSpec {
            name: e.name.clone(),
            description: e.description.clone(),
            region,
        });
    }

    let chronology = build_chronology(&decl.chronology, &events)?;

    let mut streams = vec![None; tree.stages.len()];
    for f in &flows {
        for s in [f.from, f.to] {
            streams[s.0].get_or_insert(f.thing);
        }
    }

    Ok(Model {
        name: decl.name.clone(),
        machines: tree.machines,
        roots: tree.roots,
        stages: tree.stages,
        things,
        flows,
        triggers,
        vars,
        actions,
        events,
        chronology,
        stage_index: tree.index,
        streams,
    })
}

fn build_chronology(
    decl: &ChronologyDecl,
    events: &[EventSpec],
) -> Result<Chronology, ModelError> {
    let known = |n: &str| events.iter().any(|e| e.name == n);
    let mut chrono = Chronology::default();
    for e in &decl.edges {
        for n in [&e.before, &e.after] {
            if !known(n) {
                return Err(unresolved("event", n, e.span));
            }
        }
        chrono.edges.push((e.before.clone(), e.after.clone()));
    }
    for g in &decl.groups {
        if let Some(n) = g.members.iter().find(|n| !known(n)) {
            return Err(unresolved("event", n, g.span));
        }
        chrono.parallel_groups.push(ParallelGroup {
            members: g.members.clone(),
            then_loop: g.then_loop,
        });
    }

    // Kahn's algorithm; anything left over sits on a cycle.
    let mut indegree: BTreeMap<&str, usize> = BTreeMap::new();
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in &chrono.edges {
        indegree.entry(a).or_insert(0);
        *indegree.entry(b).or_insert(0) += 1;
        succ.entry(a).or_default().push(b);
    }
    let mut ready: Vec<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    while let Some(n) = ready.pop() {
        for m in succ.get(n).into_iter().flatten() {
            let d = indegree.get_mut(m).expect("edge endpoint");
            *d -= 1;
            if *d == 0 {
                ready.push(m);
            }
        }
        indegree.remove(n);
    }
    if let Some((n, _)) = indegree.iter().find(|(_, d)| **d > 0) {
        let span = decl
            .edges
            .iter()
            .find(|e| e.after == *n)
            .map(|e| e.span)
            .unwrap_or_default();
        return Err(ModelError::CyclicChronology {
            event: n.to_string(),
            span,
        });
    }
    Ok(chrono)
}

#[derive(Default)]
struct Tree {
    machines: Vec<Machine>,
    roots: Vec<MachineId>,
    stages: Vec<Stage>,
    index: HashMap<String, StageId>,
}

impl Tree {
    fn add(
        &mut self,
        decl: &MachineDecl,
        parent: Option<MachineId>,
        prefix: &str,
    ) -> Result<MachineId, ModelError> {
        let id = MachineId(self.machines.len());
        let path = if prefix.is_empty() {
            decl.name.clone()
        } else {
            format!("{prefix}.{}", decl.name)
        };
        self.machines.push(Machine {
            name: decl.name.clone(),
            parent,
            submachines: Vec::new(),
            stages: Vec::new(),
        });

        for (kind, span) in &decl.stages {
            let key = format!("{path}.{kind}");
            if self.index.contains_key(&key) {
                return Err(dup("stage", &key, *span));
            }
            let sid = StageId(self.stages.len());
            self.stages.push(Stage {
                machine: id,
                kind: *kind,
            });
            self.index.insert(key, sid);
            self.machines[id.0].stages.push(sid);
        }

        let mut seen = BTreeSet::new();
        for sub in &decl.submachines {
            if !seen.insert(sub.name.as_str()) {
                return Err(dup("machine", &format!("{path}.{}", sub.name), sub.span));
            }
            let child = self.add(sub, Some(id), &path)?;
            self.machines[id.0].submachines.push(child);
        }
        Ok(id)
    }
}
