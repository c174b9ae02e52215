//! Simulation traces and their JSON form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bundle::{EventKind, ModelBundle};

/// Half-open tick interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span(pub u32, pub u32);

impl Span {
    pub fn start(self) -> u32 {
        self.0
    }

    pub fn end(self) -> u32 {
        self.1
    }

    pub fn contains(self, tick: u32) -> bool {
        self.0 <= tick && tick < self.1
    }

    pub fn is_empty(self) -> bool {
        self.1 <= self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTrace {
    pub name: String,
    pub kind: EventKind,
    pub spans: Vec<Span>,
}

impl EventTrace {
    pub fn actual_at(&self, tick: u32) -> bool {
        self.spans.iter().any(|s| s.contains(tick))
    }

    pub fn start(&self) -> Option<u32> {
        self.spans.first().map(|s| s.start())
    }

    pub fn end(&self) -> Option<u32> {
        self.spans.last().map(|s| s.end())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Negation {
    pub tick: u32,
    pub name: String,
    pub target: String,
}

/// What happened in one run: every declared event (in declaration order)
/// with the intervals during which it was actual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub horizon: u32,
    pub events: Vec<EventTrace>,
    pub negations: Vec<Negation>,
}

impl Trace {
    pub fn empty() -> Self {
        Trace {
            horizon: 0,
            events: Vec::new(),
            negations: Vec::new(),
        }
    }

    pub fn event(&self, name: &str) -> Option<&EventTrace> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn actual_at(&self, name: &str, tick: u32) -> bool {
        self.event(name).is_some_and(|e| e.actual_at(tick))
    }

    /// Events actual at each tick `0..horizon`.
    pub fn records(&self) -> Vec<BTreeSet<&str>> {
        (0..self.horizon)
            .map(|t| {
                self.events
                    .iter()
                    .filter(|e| e.actual_at(t))
                    .map(|e| e.name.as_str())
                    .collect()
            })
            .collect()
    }

    /// Whether this trace lists exactly the bundle's events, by name and kind.
    pub fn matches(&self, bundle: &ModelBundle) -> bool {
        self.events.len() == bundle.events.len()
            && self
                .events
                .iter()
                .zip(&bundle.events)
                .all(|(t, e)| t.name == e.name && t.kind == e.kind)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("trace serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        Trace {
            horizon: 4,
            events: vec![
                EventTrace {
                    name: "E1".into(),
                    kind: EventKind::Extended,
                    spans: vec![Span(0, 4)],
                },
                EventTrace {
                    name: "E2".into(),
                    kind: EventKind::Terminating,
                    spans: vec![Span(1, 2)],
                },
            ],
            negations: vec![Negation {
                tick: 3,
                name: "R2".into(),
                target: "E2".into(),
            }],
        }
    }

    #[test]
    fn json_shape_is_stable() {
        let json = sample().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["events"][1]["spans"], serde_json::json!([[1, 2]]));
        assert_eq!(value["events"][0]["kind"], "extended");
        let h = json.find("horizon").unwrap();
        let e = json.find("events").unwrap();
        let n = json.find("negations").unwrap();
        assert!(h < e && e < n);
        assert_eq!(Trace::from_json(&json).unwrap(), sample());
    }

    #[test]
    fn records_per_tick() {
        let t = sample();
        let records = t.records();
        assert_eq!(records.len(), 4);
        assert_eq!(records[1], BTreeSet::from(["E1", "E2"]));
        assert_eq!(records[2], BTreeSet::from(["E1"]));
        assert!(t.actual_at("E2", 1));
        assert!(!t.actual_at("E2", 2));
        assert!(!t.actual_at("nope", 0));
    }
}
