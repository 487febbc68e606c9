//! The static Thinging Machine model.
//!
//! A [`Model`] is a tree of machines, each holding a subset of the five
//! stages, plus the typed flow arcs and guarded trigger arcs that connect
//! those stages. Models are immutable once built; see [`build_model`].

mod builder;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

pub use builder::{
    build_model, ActionDecl, ChronologyDecl, EdgeDecl, EventDecl, FlowDecl, GroupDecl,
    MachineDecl, ModelDecl, ModelError, PathRef, RegionDecl, ThingDecl, TriggerDecl, VarDecl,
};

pub use crate::span::SourceSpan;

/// One of the five stages a thing can be in within a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl StageKind {
    pub const ALL: [StageKind; 5] = [
        StageKind::Create,
        StageKind::Process,
        StageKind::Release,
        StageKind::Transfer,
        StageKind::Receive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageKind::Create => "create",
            StageKind::Process => "process",
            StageKind::Release => "release",
            StageKind::Transfer => "transfer",
            StageKind::Receive => "receive",
        }
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown stage kind `{0}`")]
pub struct UnknownStageKind(pub String);

impl FromStr for StageKind {
    type Err = UnknownStageKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StageKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownStageKind(s.to_owned()))
    }
}

/// Whether a flow may move a thing directly from `from` to `to`.
///
/// Inside one machine things enter through transfer/receive or emerge at
/// create, may be processed, and leave through release/transfer. Between
/// machines the only crossing is transfer to transfer.
pub fn legal_stage_edge(from: StageKind, to: StageKind, cross_machine: bool) -> bool {
    use StageKind::*;
    if cross_machine {
        return matches!((from, to), (Transfer, Transfer));
    }
    matches!(
        (from, to),
        (Transfer, Receive)
            | (Receive, Process)
            | (Receive, Release)
            | (Process, Release)
            | (Create, Process)
            | (Create, Release)
            | (Release, Transfer)
    )
}

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

id_type!(MachineId);
id_type!(StageId);
id_type!(ThingId);
id_type!(FlowId);
id_type!(TriggerId);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub parent: Option<MachineId>,
    pub submachines: Vec<MachineId>,
    /// Stages in declaration order; at most one per kind.
    pub stages: Vec<StageId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stage {
    pub machine: MachineId,
    pub kind: StageKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThingType {
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub from: StageId,
    pub to: StageId,
    pub thing: ThingId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerArc {
    pub from: StageId,
    pub to: StageId,
    pub guard: Option<Guard>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardOperand {
    Var(String),
    Int(i64),
}

/// A comparison over global variables that gates a trigger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    pub var: String,
    pub op: CmpOp,
    pub rhs: GuardOperand,
}

impl Guard {
    /// Undeclared variables read as zero; the checker reports them.
    pub fn eval(&self, vars: &BTreeMap<String, i64>) -> bool {
        let lhs = vars.get(&self.var).copied().unwrap_or(0);
        let rhs = match &self.rhs {
            GuardOperand::Var(v) => vars.get(v).copied().unwrap_or(0),
            GuardOperand::Int(i) => *i,
        };
        self.op.apply(lhs, rhs)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        let rhs = match &self.rhs {
            GuardOperand::Var(v) => Some(v.as_str()),
            GuardOperand::Int(_) => None,
        };
        std::iter::once(self.var.as_str()).chain(rhs)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.var, self.op.as_str())?;
        match &self.rhs {
            GuardOperand::Var(v) => f.write_str(v),
            GuardOperand::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalVar {
    pub name: String,
    pub initial: i64,
}

/// A value read by an action: a global, a payload field of the token, or a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Var(String),
    Field(String),
    Int(i64),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => f.write_str(v),
            Operand::Field(p) => write!(f, "token.{p}"),
            Operand::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Value(Operand),
    Add(Operand, Operand),
    Sub(Operand, Operand),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Value(a) => write!(f, "{a}"),
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => write!(f, "{a} - {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Var(String),
    Field(String),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Var(v) => f.write_str(v),
            Target::Field(p) => write!(f, "token.{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub target: Target,
    pub value: Expr,
}

/// Assignments executed when a token arrives at a create or process stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub stage: StageId,
    pub effects: Vec<Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionRef {
    Stage(StageId),
    Flow(FlowId),
    Trigger(TriggerId),
}

/// A named region of the model whose activity constitutes an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpec {
    pub name: String,
    pub description: String,
    pub region: Vec<RegionRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelGroup {
    pub members: Vec<String>,
    pub then_loop: bool,
}

/// Ordering constraints over event names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chronology {
    pub edges: Vec<(String, String)>,
    pub parallel_groups: Vec<ParallelGroup>,
}

impl Chronology {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.parallel_groups.is_empty()
    }

    /// Every event name the chronology mentions, in first-mention order.
    pub fn alphabet(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        let names = self
            .edges
            .iter()
            .flat_map(|(a, b)| [a.as_str(), b.as_str()])
            .chain(
                self.parallel_groups
                    .iter()
                    .flat_map(|g| g.members.iter().map(String::as_str)),
            );
        for n in names {
            if !seen.contains(&n) {
                seen.push(n);
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub machines: Vec<Machine>,
    pub roots: Vec<MachineId>,
    pub stages: Vec<Stage>,
    pub things: Vec<ThingType>,
    pub flows: Vec<FlowArc>,
    pub triggers: Vec<TriggerArc>,
    pub vars: Vec<GlobalVar>,
    pub actions: Vec<Action>,
    pub events: Vec<EventSpec>,
    pub chronology: Chronology,
    stage_index: HashMap<String, StageId>,
    streams: Vec<Option<ThingId>>,
}

impl Model {
    pub fn machine(&self, id: MachineId) -> &Machine {
        &self.machines[id.0]
    }

    pub fn stage(&self, id: StageId) -> Stage {
        self.stages[id.0]
    }

    pub fn thing(&self, id: ThingId) -> &ThingType {
        &self.things[id.0]
    }

    pub fn thing_id(&self, name: &str) -> Option<ThingId> {
        self.things.iter().position(|t| t.name == name).map(ThingId)
    }

    pub fn var(&self, name: &str) -> Option<&GlobalVar> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn event(&self, name: &str) -> Option<&EventSpec> {
        self.events.iter().find(|e| e.name == name)
    }

    /// Dotted path of a machine from its root, e.g. `Inventory.FullIssue`.
    pub fn machine_path(&self, id: MachineId) -> String {
        let mut parts = vec![self.machine(id).name.as_str()];
        let mut cur = self.machine(id).parent;
        while let Some(p) = cur {
            parts.push(self.machine(p).name.as_str());
            cur = self.machine(p).parent;
        }
        parts.reverse();
        parts.join(".")
    }

    pub fn stage_path(&self, id: StageId) -> String {
        let s = self.stage(id);
        format!("{}.{}", self.machine_path(s.machine), s.kind)
    }

    pub fn resolve_stage(&self, path: &str) -> Option<StageId> {
        self.stage_index.get(path).copied()
    }

    /// The thing type carried by a stage: the thing of the first flow arc
    /// (in declaration order) touching it. `None` for stages no flow touches.
    pub fn stream(&self, id: StageId) -> Option<ThingId> {
        self.streams[id.0]
    }

    pub fn is_cross_machine(&self, from: StageId, to: StageId) -> bool {
        self.stage(from).machine != self.stage(to).machine
    }

    pub fn flow_ids(&self) -> impl Iterator<Item = FlowId> {
        (0..self.flows.len()).map(FlowId)
    }

    pub fn trigger_ids(&self) -> impl Iterator<Item = TriggerId> {
        (0..self.triggers.len()).map(TriggerId)
    }

    pub fn flow(&self, id: FlowId) -> FlowArc {
        self.flows[id.0]
    }

    pub fn trigger(&self, id: TriggerId) -> &TriggerArc {
        &self.triggers[id.0]
    }

    pub fn actions_at(&self, stage: StageId) -> impl Iterator<Item = &Action> {
        self.actions.iter().filter(move |a| a.stage == stage)
    }

    pub fn initial_vars(&self) -> BTreeMap<String, i64> {
        self.vars
            .iter()
            .map(|v| (v.name.clone(), v.initial))
            .collect()
    }

    /// Human-readable form of a region element.
    pub fn region_label(&self, r: RegionRef) -> String {
        match r {
            RegionRef::Stage(s) => self.stage_path(s),
            RegionRef::Flow(f) => {
                let a = self.flow(f);
                format!("{} -> {}", self.stage_path(a.from), self.stage_path(a.to))
            }
            RegionRef::Trigger(t) => {
                let a = self.trigger(t);
                format!("{} -> {}", self.stage_path(a.from), self.stage_path(a.to))
            }
        }
    }
}
