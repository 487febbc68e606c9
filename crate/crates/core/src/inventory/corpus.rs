use crate::engine::{Scenario, SimState, Trace, Verb};
use crate::model::Model;

use super::stock::{Outcome, OutcomeKind};

/// Source of `models/inventory.tm`.
pub const INVENTORY_TM: &str = include_str!("../../../../models/inventory.tm");

/// The bundled scenarios, by file stem.
pub const SCENARIOS: [(&str, &str); 4] = [
    ("above_min", include_str!("../../../../scenarios/above_min.tmrun")),
    ("partial", include_str!("../../../../scenarios/partial.tmrun")),
    ("below_min", include_str!("../../../../scenarios/below_min.tmrun")),
    ("replenish", include_str!("../../../../scenarios/replenish.tmrun")),
];

/// Where requisitions and vendor deliveries enter the model.
pub const REQUEST_ENTRY: &str = "RequestingDepartment.Requisition.create";
pub const DELIVERY_ENTRY: &str = "Vendor.create";

const ISSUE_STAGES: [&str; 2] = ["Inventory.FullIssue.create", "Inventory.PartialIssue.create"];

pub fn build_inventory_model() -> Model {
    crate::text::parse(INVENTORY_TM).expect("bundled inventory model parses")
}

pub fn scenario(name: &str) -> Option<Scenario> {
    SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::parse(text).expect("bundled scenario parses"))
}

/// One request against the given stock levels.
pub fn single_request(current: i64, minimum: i64, qty: i64) -> Scenario {
    Scenario::default()
        .set("current_stock", current)
        .set("minimum", minimum)
        .inject("Request", REQUEST_ENTRY, 0, &[("qty", qty)])
}

/// Reads the outcome of a single-request run from the model's counters.
pub fn outcome_of(sim: &SimState<'_>, requested: u64) -> Outcome {
    let delivered = sim.var("delivered_total").max(0) as u64;
    let pending = sim.var("pending_total").max(0) as u64;
    let kind = if delivered == requested && sim.var("queued_count") == 0 {
        OutcomeKind::FullDelivery
    } else if delivered > 0 {
        OutcomeKind::PartialDelivery
    } else {
        OutcomeKind::Queued
    };
    Outcome {
        kind,
        delivered,
        enqueued_pending: pending,
    }
}

/// Quantities issued to requesters, in order. Each issue shows up as the
/// step in `delivered_total` between a token's creation at an issue stage
/// and its arrival there.
pub fn released_quantities(model: &Model, trace: &Trace) -> Vec<i64> {
    let issue: Vec<_> = ISSUE_STAGES
        .iter()
        .filter_map(|p| model.resolve_stage(p))
        .collect();
    trace
        .records
        .windows(2)
        .filter(|w| {
            w[0].verb == Verb::Create
                && w[1].verb == Verb::Arrive
                && w[0].token == w[1].token
                && issue.contains(&w[0].stage)
        })
        .map(|w| w[1].vars["delivered_total"] - w[0].vars["delivered_total"])
        .collect()
}
