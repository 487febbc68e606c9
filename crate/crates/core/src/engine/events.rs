use std::collections::BTreeMap;

use crate::model::Model;

use super::trace::{LogicalTime, Trace};

/// One detected occurrence of a named event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventOccurrence {
    pub event: String,
    pub time: LogicalTime,
    /// Indices into the trace of the records that witnessed each region
    /// element, in region order.
    pub witnesses: Vec<usize>,
}

/// Scans a trace for event occurrences.
///
/// Windows are kept per event and per token lineage, so interleaved
/// requests never complete each other's events. Region elements are
/// witnessed in the order they are listed, and a window completes once
/// every element has a witness. Seeing an element a second time before
/// that discards the open window.
pub fn detect_events(model: &Model, trace: &Trace) -> Vec<EventOccurrence> {
    let mut out: Vec<(usize, EventOccurrence)> = Vec::new();
    for (si, spec) in model.events.iter().enumerate() {
        if spec.region.is_empty() {
            continue;
        }
        let mut windows: BTreeMap<u64, Vec<Option<usize>>> = BTreeMap::new();
        for (ri, rec) in trace.records.iter().enumerate() {
            for (ei, elem) in spec.region.iter().enumerate() {
                if !rec.witnesses(*elem) {
                    continue;
                }
                let w = windows
                    .entry(rec.lineage)
                    .or_insert_with(|| vec![None; spec.region.len()]);
                if w[ei].is_some() {
                    w.iter_mut().for_each(|slot| *slot = None);
                }
                if w.iter().take_while(|s| s.is_some()).count() != ei {
                    continue;
                }
                w[ei] = Some(ri);
                if w.iter().all(Option::is_some) {
                    let witnesses = w.iter().map(|s| s.unwrap()).collect();
                    w.iter_mut().for_each(|slot| *slot = None);
                    out.push((
                        si,
                        EventOccurrence {
                            event: spec.name.clone(),
                            time: rec.time,
                            witnesses,
                        },
                    ));
                }
            }
        }
    }
    out.sort_by_key(|(si, o)| (o.time, *si));
    out.into_iter().map(|(_, o)| o).collect()
}
