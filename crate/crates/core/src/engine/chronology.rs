use std::collections::BTreeMap;
use std::fmt;

use crate::model::Chronology;

use super::events::EventOccurrence;
use super::trace::LogicalTime;

/// A chronology constraint the observed occurrences break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The `k`-th `after` was seen no later than the `k`-th `before`.
    Order {
        before: String,
        after: String,
        at: LogicalTime,
    },
    /// Round `k + 1` of a parallel group started before round `k` ended.
    Join {
        members: Vec<String>,
        at: LogicalTime,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Order { before, after, .. } => write!(f, "{before}->{after}"),
            Violation::Join { members, .. } => write!(f, "join {{{}}}", members.join(",")),
        }
    }
}

/// Checks occurrences against the declared orderings. Occurrences are
/// paired by index: the k-th of one event against the k-th of another.
/// Events that never occur constrain nothing, and names outside the
/// chronology are ignored.
pub fn check_chronology(chrono: &Chronology, occurrences: &[EventOccurrence]) -> Vec<Violation> {
    let mut ordered: Vec<&EventOccurrence> = occurrences.iter().collect();
    ordered.sort_by_key(|o| o.time);
    let alphabet = chrono.alphabet();
    let mut ranks: BTreeMap<&str, Vec<(usize, LogicalTime)>> = BTreeMap::new();
    for (rank, o) in ordered.iter().enumerate() {
        if alphabet.contains(&o.event.as_str()) {
            ranks.entry(o.event.as_str()).or_default().push((rank, o.time));
        }
    }
    let empty = Vec::new();
    let of = |name: &str| ranks.get(name).unwrap_or(&empty);

    let mut out = Vec::new();
    for (a, b) in &chrono.edges {
        let (ra, rb) = (of(a), of(b));
        if let Some(k) = (0..ra.len().min(rb.len())).find(|&k| ra[k].0 >= rb[k].0) {
            out.push(Violation::Order {
                before: a.clone(),
                after: b.clone(),
                at: rb[k].1,
            });
        }
    }
    for g in &chrono.parallel_groups {
        let rounds = g.members.iter().map(|m| of(m).len()).max().unwrap_or(0);
        for k in 0..rounds.saturating_sub(1) {
            let end = g.members.iter().filter_map(|m| of(m).get(k)).max();
            let start = g.members.iter().filter_map(|m| of(m).get(k + 1)).min();
            if let (Some(end), Some(start)) = (end, start) {
                if start.0 < end.0 {
                    out.push(Violation::Join {
                        members: g.members.clone(),
                        at: start.1,
                    });
                    break;
                }
            }
        }
    }
    out
}
