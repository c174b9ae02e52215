//! A model bundle: the static level plus everything the dynamic level needs
//! (events, negative events, exclusivity, behavior and scenarios).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diag::Position;
use crate::model::{ActionKind, Element, ElementId, StaticModel};
use crate::region::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// Persists once realized (entities and their attributes).
    Extended,
    /// Ends when its first flow-backed successor begins.
    Terminating,
}

impl EventKind {
    pub fn keyword(self) -> &'static str {
        match self {
            EventKind::Extended => "extended",
            EventKind::Terminating => "terminating",
        }
    }

    /// Extended when the region holds nothing but thimacs and create actions.
    pub fn default_for(model: &StaticModel, region: &Region) -> Self {
        let only_entities = region.elements().iter().all(|&id| match model.get(id) {
            Some(Element::Thimac(_)) => true,
            Some(Element::Action(a)) => a.kind == ActionKind::Create,
            _ => false,
        });
        if only_entities {
            EventKind::Extended
        } else {
            EventKind::Terminating
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub name: String,
    pub region: Region,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeEventDef {
    pub name: String,
    pub negates: String,
}

/// Two events that may never be actual at the same tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusivityPair {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredEdge {
    pub pred: String,
    pub succ: String,
    pub temporal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredJoin {
    pub required: Vec<String>,
    pub successor: String,
    pub temporal: bool,
}

/// Behavior as written by the author, before flow support is derived.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BehaviorDecl {
    pub edges: Vec<DeclaredEdge>,
    pub joins: Vec<DeclaredJoin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub name: String,
    /// Events picked at exclusive branch points.
    pub choices: Vec<String>,
    /// Explicit `(tick, event)` injections. When present, only injected
    /// events start without predecessors.
    pub starts: Vec<(u32, String)>,
    pub horizon: Option<u32>,
}

impl Scenario {
    pub fn named(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            ..Scenario::default()
        }
    }

    pub fn choose(mut self, event: impl Into<String>) -> Self {
        self.choices.push(event.into());
        self
    }

    pub fn start(mut self, tick: u32, event: impl Into<String>) -> Self {
        self.starts.push((tick, event.into()));
        self
    }

    pub fn horizon(mut self, horizon: u32) -> Self {
        self.horizon = Some(horizon);
        self
    }
}

/// Where declarations appeared in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceMap {
    pub elements: BTreeMap<ElementId, Position>,
    pub events: BTreeMap<String, Position>,
    pub exclusive: Vec<Position>,
    pub behavior: Vec<Position>,
    pub joins: Vec<Position>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelBundle {
    pub static_model: StaticModel,
    pub events: Vec<EventDef>,
    pub negatives: Vec<NegativeEventDef>,
    pub exclusive: Vec<ExclusivityPair>,
    pub behavior: BehaviorDecl,
    pub scenarios: Vec<Scenario>,
    pub source: SourceMap,
}

impl ModelBundle {
    pub fn new(static_model: StaticModel) -> Self {
        ModelBundle {
            static_model,
            events: Vec::new(),
            negatives: Vec::new(),
            exclusive: Vec::new(),
            behavior: BehaviorDecl::default(),
            scenarios: Vec::new(),
            source: SourceMap::default(),
        }
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e.name == name)
    }

    pub fn event(&self, name: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn negative(&self, name: &str) -> Option<&NegativeEventDef> {
        self.negatives.iter().find(|n| n.name == name)
    }

    pub fn scenario(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }

    pub fn element_position(&self, id: ElementId) -> Option<Position> {
        self.source.elements.get(&id).copied()
    }

    /// Graph isomorphism up to element ids: both bundles describe the same
    /// named thimacs, actions, arcs, bars, event regions, behavior and
    /// scenarios.
    pub fn is_isomorphic(&self, other: &ModelBundle) -> bool {
        signature(self) == signature(other)
    }
}

type ScenarioKey = (String, Vec<String>, Vec<(u32, String)>, Option<u32>);

/// Name-keyed canonical description of a bundle, independent of ids and
/// declaration order.
#[derive(Debug, PartialEq, Eq)]
pub struct Signature {
    name: String,
    elements: Vec<String>,
    events: Vec<(String, EventKind, Vec<String>)>,
    negatives: Vec<(String, String)>,
    exclusive: Vec<(String, String)>,
    edges: Vec<(String, String, bool)>,
    joins: Vec<(Vec<String>, String, bool)>,
    scenarios: Vec<ScenarioKey>,
}

fn element_key(model: &StaticModel, id: ElementId) -> String {
    match model.get(id) {
        Some(Element::Thimac(_)) => format!("thimac {}", model.path(id)),
        Some(Element::Action(a)) => format!(
            "action {} {} {:?}",
            a.kind,
            model.path(id),
            a.label
        ),
        Some(Element::Arrow(a)) => format!(
            "{} {} {} {} {:?}",
            a.kind.keyword(),
            node_key(model, a.src),
            a.kind.symbol(),
            node_key(model, a.dst),
            a.label
        ),
        Some(Element::Negative(n)) => format!(
            "neg {} -o {} {:?}",
            node_key(model, n.src),
            n.target,
            n.label
        ),
        Some(Element::Bar(b)) => {
            let mut required: Vec<String> = b
                .required
                .iter()
                .map(|&arc| arc_source_key(model, arc))
                .collect();
            required.sort();
            format!("bar {} {:?} -> {}", b.name, required, arc_target_key(model, b.out))
        }
        None => format!("missing {}", id.0),
    }
}

fn node_key(model: &StaticModel, id: ElementId) -> String {
    match model.get(id) {
        Some(Element::Bar(b)) => format!("bar:{}", b.name),
        Some(_) => model.path(id),
        None => format!("missing:{}", id.0),
    }
}

fn arc_source_key(model: &StaticModel, arc: ElementId) -> String {
    model
        .arrow(arc)
        .map_or_else(|| format!("missing:{}", arc.0), |a| node_key(model, a.src))
}

fn arc_target_key(model: &StaticModel, arc: ElementId) -> String {
    model
        .arrow(arc)
        .map_or_else(|| format!("missing:{}", arc.0), |a| node_key(model, a.dst))
}

pub fn signature(bundle: &ModelBundle) -> Signature {
    let model = &bundle.static_model;
    let mut elements: Vec<String> = model.ids().map(|id| element_key(model, id)).collect();
    elements.sort();
    let mut events: Vec<_> = bundle
        .events
        .iter()
        .map(|e| {
            let mut keys: Vec<String> = e
                .region
                .elements()
                .iter()
                .map(|&id| element_key(model, id))
                .collect();
            keys.sort();
            (e.name.clone(), e.kind, keys)
        })
        .collect();
    events.sort();
    let mut negatives: Vec<_> = bundle
        .negatives
        .iter()
        .map(|n| (n.name.clone(), n.negates.clone()))
        .collect();
    negatives.sort();
    let mut exclusive: Vec<_> = bundle
        .exclusive
        .iter()
        .map(|p| (p.a.clone(), p.b.clone()))
        .collect();
    exclusive.sort();
    let mut edges: Vec<_> = bundle
        .behavior
        .edges
        .iter()
        .map(|e| (e.pred.clone(), e.succ.clone(), e.temporal))
        .collect();
    edges.sort();
    let mut joins: Vec<_> = bundle
        .behavior
        .joins
        .iter()
        .map(|j| (j.required.clone(), j.successor.clone(), j.temporal))
        .collect();
    joins.sort();
    let mut scenarios: Vec<_> = bundle
        .scenarios
        .iter()
        .map(|s| (s.name.clone(), s.choices.clone(), s.starts.clone(), s.horizon))
        .collect();
    scenarios.sort();
    Signature {
        name: model.name().to_string(),
        elements,
        events,
        negatives,
        exclusive,
        edges,
        joins,
        scenarios,
    }
}
