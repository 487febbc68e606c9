use std::collections::{BTreeMap, VecDeque};

use crate::check::{has_errors, validate, Finding};
use crate::model::*;

use super::scenario::Scenario;
use super::trace::{LogicalTime, Trace, TraceRecord, Verb, Via};

/// One thing-instance in flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: u64,
    pub thing: ThingId,
    pub payload: BTreeMap<String, i64>,
    pub at: StageId,
    pub since: LogicalTime,
    pub lineage: u64,
    /// Entered its current transfer stage from another machine (or from
    /// outside the model), so it continues inward rather than outward.
    inbound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("model has {} error diagnostic(s)", .0.iter().filter(|f| f.severity == crate::text::Severity::Error).count())]
    InvalidModel(Vec<Finding>),
    #[error("scenario sets undeclared variable `{0}`")]
    ScenarioVarUnknown(String),
    #[error("scenario injects unknown thing `{0}`")]
    UnknownThing(String),
    #[error("scenario injects at unknown stage `{0}`")]
    UnknownStage(String),
    #[error("cannot inject {thing} at {stage}, which carries another thing")]
    StreamMismatch { thing: String, stage: String },
}

/// Raised by [`SimState::step`] when nothing can move; the run is over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no enabled move")]
pub struct NoEnabledMove;

#[derive(Debug, Clone)]
struct PendingInjection {
    thing: ThingId,
    at: StageId,
    tick: LogicalTime,
    payload: BTreeMap<String, i64>,
}

/// A trigger armed by a token arriving at its source stage.
#[derive(Debug, Clone)]
struct Activation {
    trigger: TriggerId,
    thing: ThingId,
    payload: BTreeMap<String, i64>,
    lineage: u64,
}

/// Mutable state of one simulation run over a shared, immutable model.
///
/// Each step performs exactly one movement, chosen in this order:
/// 1. an injection whose tick has come;
/// 2. the oldest armed trigger whose guard holds now (armed triggers whose
///    guard fails, or that target an empty gate, are discarded);
/// 3. de-creation of a token resting on a release or transfer stage with
///    no way out;
/// 4. the head token of the first flow arc, in declaration order, that has
///    a token ready to take it;
/// 5. failing all else, the next pending injection, early.
///
/// A stage that is the target of a trigger and also has incoming flows is a
/// gate: tokens queue there until a trigger firing releases the head one.
/// A trigger into any other stage creates a new token there.
#[derive(Debug, Clone)]
pub struct SimState<'m> {
    model: &'m Model,
    clock: LogicalTime,
    vars: BTreeMap<String, i64>,
    tokens: BTreeMap<u64, Token>,
    queues: Vec<VecDeque<u64>>,
    activations: VecDeque<Activation>,
    pending: VecDeque<PendingInjection>,
    next_id: u64,
    gates: Vec<bool>,
    outgoing: Vec<Vec<FlowId>>,
}

/// Prepares a run: validates the model, applies variable overrides, and
/// queues the scenario's injections in (tick, file order).
pub fn init_simulation<'m>(model: &'m Model, scenario: &Scenario) -> Result<SimState<'m>, SimError> {
    let findings = validate(model);
    if has_errors(&findings) {
        return Err(SimError::InvalidModel(findings));
    }

    let mut vars = model.initial_vars();
    for (k, v) in &scenario.sets {
        match vars.get_mut(k) {
            Some(slot) => *slot = *v,
            None => return Err(SimError::ScenarioVarUnknown(k.clone())),
        }
    }

    let mut pending = Vec::new();
    for inj in &scenario.injections {
        let thing = model
            .thing_id(&inj.thing)
            .ok_or_else(|| SimError::UnknownThing(inj.thing.clone()))?;
        let at = model
            .resolve_stage(&inj.at)
            .ok_or_else(|| SimError::UnknownStage(inj.at.clone()))?;
        if model.stream(at).is_some_and(|s| s != thing) {
            return Err(SimError::StreamMismatch {
                thing: inj.thing.clone(),
                stage: inj.at.clone(),
            });
        }
        pending.push(PendingInjection {
            thing,
            at,
            tick: inj.tick,
            payload: inj.payload.clone(),
        });
    }
    pending.sort_by_key(|p| p.tick);

    let n = model.stages.len();
    let mut gates = vec![false; n];
    for t in &model.triggers {
        if model.flows.iter().any(|f| f.to == t.to) {
            gates[t.to.0] = true;
        }
    }
    let mut outgoing = vec![Vec::new(); n];
    for id in model.flow_ids() {
        outgoing[model.flow(id).from.0].push(id);
    }

    Ok(SimState {
        model,
        clock: 0,
        vars,
        tokens: BTreeMap::new(),
        queues: vec![VecDeque::new(); n],
        activations: VecDeque::new(),
        pending: pending.into(),
        next_id: 1,
        gates,
        outgoing,
    })
}

impl<'m> SimState<'m> {
    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn clock(&self) -> LogicalTime {
        self.clock
    }

    pub fn vars(&self) -> &BTreeMap<String, i64> {
        &self.vars
    }

    pub fn var(&self, name: &str) -> i64 {
        self.vars.get(name).copied().unwrap_or(0)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.tokens.values()
    }

    /// Tokens currently at `stage`, oldest first.
    pub fn tokens_at(&self, stage: StageId) -> impl Iterator<Item = &Token> {
        self.queues[stage.0].iter().map(|id| &self.tokens[id])
    }

    pub fn is_gate(&self, stage: StageId) -> bool {
        self.gates[stage.0]
    }

    /// Runs until nothing can move or the clock reaches `max_ticks`.
    pub fn run(&mut self, max_ticks: LogicalTime) -> Trace {
        let mut trace = Trace::default();
        while self.clock < max_ticks {
            match self.step() {
                Ok(records) => trace.records.extend(records),
                Err(NoEnabledMove) => break,
            }
        }
        trace
    }

    /// Performs one movement and returns the records it produced.
    pub fn step(&mut self) -> Result<Vec<TraceRecord>, NoEnabledMove> {
        let tick = self.clock + 1;
        let mut records = Vec::new();

        if self.pending.front().is_some_and(|p| p.tick <= tick) {
            self.inject(tick, &mut records);
        } else if self.fire_trigger(tick, &mut records) {
        } else if let Some(tok) = self.next_decreation() {
            self.decreate(tok, tick, &mut records);
        } else if let Some((tok, arc)) = self.next_flow_move() {
            self.move_token(tok, arc, None, tick, &mut records);
        } else if !self.pending.is_empty() {
            self.inject(tick, &mut records);
        } else {
            return Err(NoEnabledMove);
        }

        self.clock = tick;
        Ok(records)
    }

    fn record(&self, tok: &Token, verb: Verb, via: Option<Via>, time: LogicalTime) -> TraceRecord {
        TraceRecord {
            time,
            token: tok.id,
            thing: tok.thing,
            stage: tok.at,
            verb,
            vars: self.vars.clone(),
            via,
            lineage: tok.lineage,
        }
    }

    fn inject(&mut self, tick: LogicalTime, records: &mut Vec<TraceRecord>) {
        let p = self.pending.pop_front().expect("pending injection");
        let id = self.next_id;
        let inbound = self.model.stage(p.at).kind == StageKind::Transfer;
        self.spawn(p.thing, p.at, p.payload, id, inbound, None, tick, records);
    }

    #[allow(clippy::too_many_arguments)]
    fn spawn(
        &mut self,
        thing: ThingId,
        at: StageId,
        payload: BTreeMap<String, i64>,
        lineage: u64,
        inbound: bool,
        via: Option<Via>,
        tick: LogicalTime,
        records: &mut Vec<TraceRecord>,
    ) {
        let id = self.next_id;
        self.next_id += 1;
        let tok = Token {
            id,
            thing,
            payload,
            at,
            since: tick,
            lineage,
            inbound,
        };
        records.push(self.record(&tok, Verb::Create, via, tick));
        self.tokens.insert(id, tok);
        self.queues[at.0].push_back(id);
        self.arrive(id, None, tick, records);
    }

    /// Runs the stage's actions for a token that just got there, records the
    /// arrival, then arms the triggers leaving the stage.
    fn arrive(&mut self, id: u64, via: Option<Via>, tick: LogicalTime, records: &mut Vec<TraceRecord>) {
        let model = self.model;
        let mut tok = self.tokens.remove(&id).expect("live token");
        for action in model.actions_at(tok.at) {
            for eff in &action.effects {
                let read = |o: &Operand, vars: &BTreeMap<String, i64>, tok: &Token| match o {
                    Operand::Var(v) => vars.get(v).copied().unwrap_or(0),
                    Operand::Field(f) => tok.payload.get(f).copied().unwrap_or(0),
                    Operand::Int(i) => *i,
                };
                let value = match &eff.value {
                    Expr::Value(a) => read(a, &self.vars, &tok),
                    Expr::Add(a, b) => read(a, &self.vars, &tok).saturating_add(read(b, &self.vars, &tok)),
                    Expr::Sub(a, b) => read(a, &self.vars, &tok).saturating_sub(read(b, &self.vars, &tok)),
                };
                match &eff.target {
                    Target::Var(v) => {
                        self.vars.insert(v.clone(), value);
                    }
                    Target::Field(f) => {
                        tok.payload.insert(f.clone(), value);
                    }
                }
            }
        }
        records.push(self.record(&tok, Verb::Arrive, via, tick));
        for tid in model.trigger_ids() {
            if model.trigger(tid).from == tok.at {
                self.activations.push_back(Activation {
                    trigger: tid,
                    thing: tok.thing,
                    payload: tok.payload.clone(),
                    lineage: tok.lineage,
                });
            }
        }
        self.tokens.insert(id, tok);
    }

    fn fire_trigger(&mut self, tick: LogicalTime, records: &mut Vec<TraceRecord>) -> bool {
        let model = self.model;
        while let Some(act) = self.activations.pop_front() {
            let trig = model.trigger(act.trigger);
            if !trig.guard.as_ref().is_none_or(|g| g.eval(&self.vars)) {
                continue;
            }
            let via = Some(Via::Trigger(act.trigger));
            if self.gates[trig.to.0] {
                let released = self.queues[trig.to.0]
                    .iter()
                    .find_map(|id| self.route(&self.tokens[id]).map(|arc| (*id, arc)));
                if let Some((id, arc)) = released {
                    self.move_token(id, arc, via, tick, records);
                    return true;
                }
                continue;
            }
            let thing = model.stream(trig.to).unwrap_or(act.thing);
            self.spawn(thing, trig.to, act.payload, act.lineage, false, via, tick, records);
            return true;
        }
        false
    }

    /// The flow arc a token would take next, if any. A token at a transfer
    /// stage keeps going the way it came: inward if it crossed a machine
    /// boundary to get there, outward otherwise.
    fn route(&self, tok: &Token) -> Option<FlowId> {
        let is_transfer = self.model.stage(tok.at).kind == StageKind::Transfer;
        self.outgoing[tok.at.0].iter().copied().find(|&f| {
            let arc = self.model.flow(f);
            !is_transfer || self.model.is_cross_machine(arc.from, arc.to) != tok.inbound
        })
    }

    fn next_flow_move(&self) -> Option<(u64, FlowId)> {
        for id in self.model.flow_ids() {
            let from = self.model.flow(id).from;
            if self.gates[from.0] {
                continue;
            }
            if let Some(tok) = self.queues[from.0]
                .iter()
                .find(|t| self.route(&self.tokens[t]) == Some(id))
            {
                return Some((*tok, id));
            }
        }
        None
    }

    fn move_token(&mut self, id: u64, arc: FlowId, depart_via: Option<Via>, tick: LogicalTime, records: &mut Vec<TraceRecord>) {
        let flow = self.model.flow(arc);
        let pos = self.queues[flow.from.0]
            .iter()
            .position(|t| *t == id)
            .expect("token queued at its stage");
        self.queues[flow.from.0].remove(pos);
        records.push(self.record(&self.tokens[&id], Verb::Depart, depart_via, tick));

        let cross = self.model.is_cross_machine(flow.from, flow.to);
        let tok = self.tokens.get_mut(&id).expect("live token");
        tok.at = flow.to;
        tok.since = tick;
        tok.inbound = cross;
        self.queues[flow.to.0].push_back(id);
        self.arrive(id, Some(Via::Flow(arc)), tick, records);
    }

    fn next_decreation(&self) -> Option<u64> {
        self.model.stages.iter().enumerate().find_map(|(i, s)| {
            if self.gates[i] || !matches!(s.kind, StageKind::Release | StageKind::Transfer) {
                return None;
            }
            self.queues[i]
                .iter()
                .find(|t| self.route(&self.tokens[t]).is_none())
                .copied()
        })
    }

    fn decreate(&mut self, id: u64, tick: LogicalTime, records: &mut Vec<TraceRecord>) {
        let tok = self.tokens.remove(&id).expect("live token");
        self.queues[tok.at.0].retain(|t| *t != id);
        records.push(self.record(&tok, Verb::Decreate, None, tick));
    }
}
