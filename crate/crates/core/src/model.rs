//! The static level: thimacs, their actions, and the arcs that connect them.
//!
//! Every element carries an [`ElementId`] assigned in declaration order. Names
//! are for people; ids are what arcs, regions and traces refer to.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// Stable identity of a static-model element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The five generic actions of a thimac. Arrive and accept are folded into
/// `Receive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Create,
        ActionKind::Process,
        ActionKind::Release,
        ActionKind::Transfer,
        ActionKind::Receive,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ActionKind::Create => "create",
            ActionKind::Process => "process",
            ActionKind::Release => "release",
            ActionKind::Transfer => "transfer",
            ActionKind::Receive => "receive",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Thimac {
    pub id: ElementId,
    pub name: String,
    pub parent: Option<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub id: ElementId,
    pub kind: ActionKind,
    pub owner: ElementId,
    /// Name unique among the owner's children; defaults to the kind keyword.
    pub name: String,
    pub label: Option<String>,
}

/// Solid (flow) or dashed (trigger) arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArrowKind {
    Flow,
    Trigger,
}

impl ArrowKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ArrowKind::Flow => "flow",
            ArrowKind::Trigger => "trigger",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArrowKind::Flow => "->",
            ArrowKind::Trigger => "~>",
        }
    }
}

/// A flow or trigger arc. Endpoints are actions or join bars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: ElementId,
    pub kind: ArrowKind,
    pub src: ElementId,
    pub dst: ElementId,
    pub label: Option<String>,
}

/// Diamond-headed arc: when its source fires, the named event reverts to
/// potentiality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NegativeArc {
    pub id: ElementId,
    pub src: ElementId,
    pub target: String,
    pub label: Option<String>,
}

/// Thick bar that fires its outgoing arc only once every incoming arc has.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JoinBar {
    pub id: ElementId,
    pub name: String,
    pub required: Vec<ElementId>,
    pub out: ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Thimac(Thimac),
    Action(Action),
    Arrow(Arrow),
    Negative(NegativeArc),
    Bar(JoinBar),
}

impl Element {
    pub fn id(&self) -> ElementId {
        match self {
            Element::Thimac(t) => t.id,
            Element::Action(a) => a.id,
            Element::Arrow(a) => a.id,
            Element::Negative(n) => n.id,
            Element::Bar(b) => b.id,
        }
    }

    pub fn is_arc(&self) -> bool {
        matches!(self, Element::Arrow(_) | Element::Negative(_))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Element::Thimac(_) => "thimac",
            Element::Action(_) => "action",
            Element::Arrow(a) => a.kind.keyword(),
            Element::Negative(_) => "negative arc",
            Element::Bar(_) => "bar",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("element id {0} declared more than once")]
    DuplicateId(ElementId),
}

/// Immutable static model. Elements are kept in id order regardless of the
/// order they were supplied in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticModel {
    name: String,
    elements: BTreeMap<ElementId, Element>,
    children: BTreeMap<ElementId, Vec<ElementId>>,
}

impl StaticModel {
    pub fn new(
        name: impl Into<String>,
        elements: impl IntoIterator<Item = Element>,
    ) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for element in elements {
            let id = element.id();
            if map.insert(id, element).is_some() {
                return Err(ModelError::DuplicateId(id));
            }
        }
        let mut children: BTreeMap<ElementId, Vec<ElementId>> = BTreeMap::new();
        for element in map.values() {
            let parent = match element {
                Element::Thimac(t) => t.parent,
                Element::Action(a) => Some(a.owner),
                _ => None,
            };
            if let Some(parent) = parent {
                children.entry(parent).or_default().push(element.id());
            }
        }
        Ok(StaticModel {
            name: name.into(),
            elements: map,
            children,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        StaticModel {
            name: name.into(),
            elements: BTreeMap::new(),
            children: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, id: ElementId) -> Option<&Element> {
        self.elements.get(&id)
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.elements.contains_key(&id)
    }

    /// Elements in id order.
    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.elements.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements.keys().copied()
    }

    pub fn next_id(&self) -> ElementId {
        self.elements
            .keys()
            .next_back()
            .map_or(ElementId(0), |id| ElementId(id.0 + 1))
    }

    pub fn thimac(&self, id: ElementId) -> Option<&Thimac> {
        match self.elements.get(&id) {
            Some(Element::Thimac(t)) => Some(t),
            _ => None,
        }
    }

    pub fn action(&self, id: ElementId) -> Option<&Action> {
        match self.elements.get(&id) {
            Some(Element::Action(a)) => Some(a),
            _ => None,
        }
    }

    pub fn arrow(&self, id: ElementId) -> Option<&Arrow> {
        match self.elements.get(&id) {
            Some(Element::Arrow(a)) => Some(a),
            _ => None,
        }
    }

    pub fn bar(&self, id: ElementId) -> Option<&JoinBar> {
        match self.elements.get(&id) {
            Some(Element::Bar(b)) => Some(b),
            _ => None,
        }
    }

    pub fn thimacs(&self) -> impl Iterator<Item = &Thimac> + '_ {
        self.elements.values().filter_map(|e| match e {
            Element::Thimac(t) => Some(t),
            _ => None,
        })
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> + '_ {
        self.elements.values().filter_map(|e| match e {
            Element::Action(a) => Some(a),
            _ => None,
        })
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> + '_ {
        self.elements.values().filter_map(|e| match e {
            Element::Arrow(a) => Some(a),
            _ => None,
        })
    }

    pub fn negative_arcs(&self) -> impl Iterator<Item = &NegativeArc> + '_ {
        self.elements.values().filter_map(|e| match e {
            Element::Negative(n) => Some(n),
            _ => None,
        })
    }

    pub fn bars(&self) -> impl Iterator<Item = &JoinBar> + '_ {
        self.elements.values().filter_map(|e| match e {
            Element::Bar(b) => Some(b),
            _ => None,
        })
    }

    /// Child thimacs and actions of a thimac, in id order.
    pub fn children(&self, thimac: ElementId) -> &[ElementId] {
        self.children.get(&thimac).map_or(&[], Vec::as_slice)
    }

    /// Top-level thimacs, plus every arc and bar (which live at model level).
    pub fn top_level(&self) -> impl Iterator<Item = &Element> + '_ {
        self.elements.values().filter(|e| match e {
            Element::Thimac(t) => t.parent.is_none(),
            Element::Action(_) => false,
            _ => true,
        })
    }

    /// The thimac an action belongs to.
    pub fn owner_of(&self, id: ElementId) -> Option<ElementId> {
        self.action(id).map(|a| a.owner)
    }

    /// Flow/trigger endpoints: actions and bars.
    pub fn is_node(&self, id: ElementId) -> bool {
        matches!(
            self.elements.get(&id),
            Some(Element::Action(_)) | Some(Element::Bar(_))
        )
    }

    /// Dotted path of a thimac or action (`Buyer.Order.create`). Other
    /// elements render the way a region item refers to them.
    pub fn path(&self, id: ElementId) -> String {
        match self.elements.get(&id) {
            Some(Element::Thimac(_)) | Some(Element::Action(_)) => {
                let mut segments = Vec::new();
                let mut seen = BTreeSet::new();
                let mut cursor = Some(id);
                while let Some(current) = cursor {
                    if !seen.insert(current) {
                        break;
                    }
                    match self.elements.get(&current) {
                        Some(Element::Thimac(t)) => {
                            segments.push(t.name.as_str());
                            cursor = t.parent;
                        }
                        Some(Element::Action(a)) => {
                            segments.push(a.name.as_str());
                            cursor = Some(a.owner);
                        }
                        _ => break,
                    }
                }
                segments.reverse();
                segments.join(".")
            }
            Some(Element::Bar(b)) => b.name.clone(),
            Some(Element::Arrow(a)) => match &a.label {
                Some(label) => label.clone(),
                None => format!("{} {} {}", self.path(a.src), a.kind.symbol(), self.path(a.dst)),
            },
            Some(Element::Negative(n)) => match &n.label {
                Some(label) => label.clone(),
                None => format!("{} -o {}", self.path(n.src), n.target),
            },
            None => id.to_string(),
        }
    }

    /// Structural hash used to tell regions of different models apart.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.name.hash(&mut hasher);
        for element in self.elements.values() {
            element.hash(&mut hasher);
        }
        hasher.finish()
    }
}

/// Incremental construction with ids handed out in call order.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    name: String,
    elements: Vec<Element>,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ModelBuilder {
            name: name.into(),
            elements: Vec::new(),
        }
    }

    fn next(&self) -> ElementId {
        ElementId(self.elements.len() as u32)
    }

    pub fn thimac(&mut self, name: impl Into<String>, parent: Option<ElementId>) -> ElementId {
        let id = self.next();
        self.elements.push(Element::Thimac(Thimac {
            id,
            name: name.into(),
            parent,
        }));
        id
    }

    /// Adds an action named after its kind.
    pub fn action(&mut self, owner: ElementId, kind: ActionKind) -> ElementId {
        self.named_action(owner, kind, kind.keyword())
    }

    pub fn named_action(
        &mut self,
        owner: ElementId,
        kind: ActionKind,
        name: impl Into<String>,
    ) -> ElementId {
        let id = self.next();
        self.elements.push(Element::Action(Action {
            id,
            kind,
            owner,
            name: name.into(),
            label: None,
        }));
        id
    }

    pub fn arrow(&mut self, kind: ArrowKind, src: ElementId, dst: ElementId) -> ElementId {
        let id = self.next();
        self.elements.push(Element::Arrow(Arrow {
            id,
            kind,
            src,
            dst,
            label: None,
        }));
        id
    }

    pub fn flow(&mut self, src: ElementId, dst: ElementId) -> ElementId {
        self.arrow(ArrowKind::Flow, src, dst)
    }

    pub fn trigger(&mut self, src: ElementId, dst: ElementId) -> ElementId {
        self.arrow(ArrowKind::Trigger, src, dst)
    }

    pub fn negative(&mut self, src: ElementId, target: impl Into<String>) -> ElementId {
        let id = self.next();
        self.elements.push(Element::Negative(NegativeArc {
            id,
            src,
            target: target.into(),
            label: None,
        }));
        id
    }

    /// Declares a bar plus its incoming arcs (one per source) and its outgoing
    /// arc, all of `kind`. Returns the bar id.
    pub fn bar(
        &mut self,
        name: impl Into<String>,
        kind: ArrowKind,
        sources: &[ElementId],
        dst: ElementId,
    ) -> ElementId {
        let bar = self.next();
        let first = bar.0 + 1;
        let required: Vec<ElementId> = (0..sources.len() as u32)
            .map(|i| ElementId(first + i))
            .collect();
        let out = ElementId(first + sources.len() as u32);
        self.elements.push(Element::Bar(JoinBar {
            id: bar,
            name: name.into(),
            required,
            out,
        }));
        for &src in sources {
            self.arrow(kind, src, bar);
        }
        self.arrow(kind, bar, dst);
        bar
    }

    pub fn push(&mut self, element: Element) {
        self.elements.push(element);
    }

    pub fn build(self) -> StaticModel {
        StaticModel::new(self.name, self.elements).expect("builder ids are sequential")
    }
}
