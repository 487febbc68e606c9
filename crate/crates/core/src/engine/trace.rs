use std::collections::BTreeMap;
use std::fmt::{self, Write};

use crate::model::{FlowId, Model, RegionRef, StageId, ThingId, TriggerId};

/// Simulation time, counted in steps.
pub type LogicalTime = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verb {
    Arrive,
    Depart,
    Create,
    Decreate,
}

impl Verb {
    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Arrive => "arrive",
            Verb::Depart => "depart",
            Verb::Create => "create",
            Verb::Decreate => "decreate",
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The arc a record was caused by, when there is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Via {
    Flow(FlowId),
    Trigger(TriggerId),
}

impl Via {
    pub fn matches(self, r: RegionRef) -> bool {
        match (self, r) {
            (Via::Flow(a), RegionRef::Flow(b)) => a == b,
            (Via::Trigger(a), RegionRef::Trigger(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: LogicalTime,
    pub token: u64,
    pub thing: ThingId,
    pub stage: StageId,
    pub verb: Verb,
    pub vars: BTreeMap<String, i64>,
    /// Set on the arrive record of a flow move, the create record of a
    /// triggered emergence, and the depart record of a triggered release.
    pub via: Option<Via>,
    /// Id of the injected token this token descends from through triggers.
    pub lineage: u64,
}

impl TraceRecord {
    /// Whether this record witnesses a region element: a stage is witnessed
    /// by an arrival, an arc by the record it caused.
    pub fn witnesses(&self, r: RegionRef) -> bool {
        match r {
            RegionRef::Stage(s) => self.stage == s && self.verb == Verb::Arrive,
            _ => self.via.is_some_and(|v| v.matches(r)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// One line per record:
    /// `t=<tick> tok=<id> thing=<name> stage=<path> verb=<verb> vars={k:v,...}`.
    pub fn render(&self, model: &Model) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = write!(
                out,
                "t={} tok={} thing={} stage={} verb={} vars={{",
                r.time,
                r.token,
                model.thing(r.thing).name,
                model.stage_path(r.stage),
                r.verb
            );
            for (i, (k, v)) in r.vars.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{k}:{v}");
            }
            out.push_str("}\n");
        }
        out
    }
}
