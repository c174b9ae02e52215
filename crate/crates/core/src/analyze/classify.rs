use std::collections::BTreeMap;

use thiserror::Error;

use crate::bundle::ModelBundle;
use crate::diag::{Code, Diagnostic};
use crate::model::ElementId;
use crate::sim::{Span, Trace};

/// Where an element stands: realized in time, mappable to the dynamic level,
/// or outside every event region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OntClass {
    /// Ticks during which some containing event was actual.
    Existent(Vec<Span>),
    Subsistent,
    Neither,
}

impl OntClass {
    pub fn name(&self) -> &'static str {
        match self {
            OntClass::Existent(_) => "existent",
            OntClass::Subsistent => "subsistent",
            OntClass::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("trace does not belong to this bundle: {0}")]
    TraceMismatch(String),
}

impl ClassifyError {
    pub fn code(&self) -> Code {
        Code::TraceMismatch
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new(self.code(), self.to_string())
    }
}

fn check_trace(bundle: &ModelBundle, trace: &Trace) -> Result<(), ClassifyError> {
    if trace.matches(bundle) {
        return Ok(());
    }
    let expected: Vec<&str> = bundle.events.iter().map(|e| e.name.as_str()).collect();
    let found: Vec<&str> = trace.events.iter().map(|e| e.name.as_str()).collect();
    Err(ClassifyError::TraceMismatch(format!(
        "expected events [{}], found [{}]",
        expected.join(", "),
        found.join(", ")
    )))
}

/// Sorts and coalesces overlapping or touching spans.
pub fn merge_spans(mut spans: Vec<Span>) -> Vec<Span> {
    spans.retain(|s| !s.is_empty());
    spans.sort();
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for span in spans {
        match out.last_mut() {
            Some(last) if span.0 <= last.1 => last.1 = last.1.max(span.1),
            _ => out.push(span),
        }
    }
    out
}

/// Classifies every static element. Without a trace nothing is Existent.
pub fn classify_elements(
    bundle: &ModelBundle,
    trace: Option<&Trace>,
) -> Result<BTreeMap<ElementId, OntClass>, ClassifyError> {
    if let Some(trace) = trace {
        check_trace(bundle, trace)?;
    }
    let mut spans: BTreeMap<ElementId, Vec<Span>> = BTreeMap::new();
    let mut covered: BTreeMap<ElementId, bool> = BTreeMap::new();
    for (index, event) in bundle.events.iter().enumerate() {
        let event_spans = trace.map_or(&[][..], |t| t.events[index].spans.as_slice());
        for &id in event.region.elements() {
            covered.insert(id, true);
            spans.entry(id).or_default().extend_from_slice(event_spans);
        }
    }
    Ok(bundle
        .static_model
        .ids()
        .map(|id| {
            let merged = merge_spans(spans.remove(&id).unwrap_or_default());
            let class = if !merged.is_empty() {
                OntClass::Existent(merged)
            } else if covered.contains_key(&id) {
                OntClass::Subsistent
            } else {
                OntClass::Neither
            };
            (id, class)
        })
        .collect())
}

/// Snapshot at one tick: Existent only while some containing event is actual
/// at `tick`, carrying the interval around that tick.
pub fn classify_at(
    bundle: &ModelBundle,
    trace: &Trace,
    tick: u32,
) -> Result<BTreeMap<ElementId, OntClass>, ClassifyError> {
    let overall = classify_elements(bundle, Some(trace))?;
    Ok(overall
        .into_iter()
        .map(|(id, class)| {
            let class = match class {
                OntClass::Existent(spans) => match spans.into_iter().find(|s| s.contains(tick)) {
                    Some(span) => OntClass::Existent(vec![span]),
                    None => OntClass::Subsistent,
                },
                other => other,
            };
            (id, class)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::EventKind;
    use crate::parse::parse_model;
    use crate::sim::EventTrace;

    const TEXT: &str = r#"
model "m" {
  thing A
  thing B
  thing SquareCircle
}
events {
  event E1 region { A }
  event E2 region { A, B.create }
}
"#;

    fn trace() -> Trace {
        Trace {
            horizon: 6,
            events: vec![
                EventTrace {
                    name: "E1".into(),
                    kind: EventKind::Extended,
                    spans: vec![Span(0, 2)],
                },
                EventTrace {
                    name: "E2".into(),
                    kind: EventKind::Extended,
                    spans: vec![Span(2, 3), Span(4, 6)],
                },
            ],
            negations: vec![],
        }
    }

    #[test]
    fn without_trace_nothing_exists() {
        let b = parse_model(TEXT).unwrap();
        let classes = classify_elements(&b, None).unwrap();
        let names: BTreeMap<String, &str> = classes
            .iter()
            .map(|(&id, c)| (b.static_model.path(id), c.name()))
            .collect();
        assert_eq!(names["A"], "subsistent");
        assert_eq!(names["A.create"], "neither");
        assert_eq!(names["B"], "subsistent");
        assert_eq!(names["B.create"], "subsistent");
        assert_eq!(names["SquareCircle"], "neither");
        assert_eq!(names["SquareCircle.create"], "neither");
    }

    #[test]
    fn spans_of_containing_events_merge() {
        let b = parse_model(TEXT).unwrap();
        let classes = classify_elements(&b, Some(&trace())).unwrap();
        let a = ElementId(0);
        assert_eq!(classes[&a], OntClass::Existent(vec![Span(0, 3), Span(4, 6)]));
        let b_create = ElementId(3);
        assert_eq!(classes[&b_create], OntClass::Existent(vec![Span(2, 3), Span(4, 6)]));
    }

    #[test]
    fn snapshot_reverts_to_subsistent() {
        let b = parse_model(TEXT).unwrap();
        let at3 = classify_at(&b, &trace(), 3).unwrap();
        assert_eq!(at3[&ElementId(0)], OntClass::Subsistent);
        let at4 = classify_at(&b, &trace(), 4).unwrap();
        assert_eq!(at4[&ElementId(0)], OntClass::Existent(vec![Span(4, 6)]));
        assert_eq!(at4[&ElementId(4)], OntClass::Neither);
    }

    #[test]
    fn foreign_trace_is_rejected() {
        let b = parse_model(TEXT).unwrap();
        let mut t = trace();
        t.events.pop();
        let err = classify_elements(&b, Some(&t)).unwrap_err();
        assert_eq!(err.code(), Code::TraceMismatch);
    }

    #[test]
    fn merging_spans() {
        assert_eq!(
            merge_spans(vec![Span(5, 7), Span(0, 2), Span(2, 3), Span(6, 9), Span(4, 4)]),
            vec![Span(0, 3), Span(5, 9)]
        );
    }
}
