//! Deterministic token-flow simulation over a [`Model`](crate::model::Model).

mod chronology;
mod events;
mod scenario;
mod sim;
mod trace;

pub use chronology::{check_chronology, Violation};
pub use events::{detect_events, EventOccurrence};
pub use scenario::{Injection, Scenario, ScenarioParseError};
pub use sim::{init_simulation, NoEnabledMove, SimError, SimState, Token};
pub use trace::{LogicalTime, Trace, TraceRecord, Verb, Via};
