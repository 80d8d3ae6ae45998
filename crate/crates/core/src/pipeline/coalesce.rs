use std::collections::HashMap;

use super::EventRecord;
use crate::invariant::Tick;

pub const DEFAULT_COALESCE_WINDOW: Tick = 5;

/// A burst of like events folded into one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalescedEvent {
    /// Highest-severity member; the earliest one on ties.
    pub representative: EventRecord,
    pub count: usize,
    pub first_tick: Tick,
    pub last_tick: Tick,
}

impl CoalescedEvent {
    pub fn single(e: EventRecord) -> Self {
        CoalescedEvent {
            first_tick: e.timestamp,
            last_tick: e.timestamp,
            representative: e,
            count: 1,
        }
    }
}

/// Merges events with the same `(source, category)` whose timestamps are at
/// most `window_ticks` after the group's first event. Input must be sorted by
/// timestamp; groups come out in order of their first event.
pub fn coalesce(window: &[EventRecord], window_ticks: Tick) -> Vec<CoalescedEvent> {
    let mut groups: Vec<CoalescedEvent> = Vec::new();
    let mut open: HashMap<(&str, &str), usize> = HashMap::new();
    for e in window {
        let key = (e.source.as_str(), e.category.as_str());
        match open.get(&key) {
            Some(&idx) if e.timestamp - groups[idx].first_tick <= window_ticks => {
                let g = &mut groups[idx];
                g.count += 1;
                g.last_tick = g.last_tick.max(e.timestamp);
                if e.severity > g.representative.severity {
                    g.representative = e.clone();
                }
            }
            _ => {
                open.insert(key, groups.len());
                groups.push(CoalescedEvent::single(e.clone()));
            }
        }
    }
    groups
}
