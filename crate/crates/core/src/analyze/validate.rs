use std::collections::{BTreeMap, BTreeSet};

use crate::bundle::ModelBundle;
use crate::diag::{Code, Diagnostic};
use crate::model::{ActionKind, ArrowKind, Element, ElementId, StaticModel};
use crate::region::{Region, RegionError};

/// Whether a flow arc from a `src` stage to a `dst` stage is legal.
///
/// Inside one machine: transfer→receive, receive→{process, release},
/// create→{process, release}, process→release, release→transfer. Between
/// machines only transfer→transfer.
pub fn stage_allowed(src: ActionKind, dst: ActionKind, same_machine: bool) -> bool {
    use ActionKind::*;
    if !same_machine {
        return matches!((src, dst), (Transfer, Transfer));
    }
    matches!(
        (src, dst),
        (Transfer, Receive)
            | (Receive, Process)
            | (Receive, Release)
            | (Create, Process)
            | (Create, Release)
            | (Process, Release)
            | (Release, Transfer)
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mappability {
    Mappable,
    NotMappable(RegionError),
}

impl Mappability {
    pub fn is_mappable(&self) -> bool {
        matches!(self, Mappability::Mappable)
    }
}

/// Checks that a region is a subdiagram of the model: every element exists
/// and every arc's endpoints are inside. Owning thimacs of actions count as
/// implied, matching how regions are built.
pub fn check_region_mappable(model: &StaticModel, region: &Region) -> Mappability {
    for &id in region.elements() {
        let Some(element) = model.get(id) else {
            return Mappability::NotMappable(RegionError::UnknownId(id));
        };
        let endpoints: Vec<ElementId> = match element {
            Element::Arrow(a) => vec![a.src, a.dst],
            Element::Negative(n) => vec![n.src],
            Element::Action(a) if !model.contains(a.owner) => {
                return Mappability::NotMappable(RegionError::UnknownId(a.owner));
            }
            _ => continue,
        };
        for endpoint in endpoints {
            if !region.contains(endpoint) {
                return Mappability::NotMappable(RegionError::Closure { arc: id, endpoint });
            }
        }
    }
    Mappability::Mappable
}

struct Checker<'a> {
    bundle: &'a ModelBundle,
    model: &'a StaticModel,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn push(&mut self, code: Code, element: Option<ElementId>, message: String) {
        let mut d = Diagnostic::new(code, message);
        if let Some(id) = element {
            d = d.on(id).at_opt(self.bundle.element_position(id));
        }
        self.out.push(d);
    }

    fn nesting(&mut self) {
        let model = self.model;
        for thimac in model.thimacs() {
            if let Some(parent) = thimac.parent {
                if model.thimac(parent).is_none() {
                    self.push(
                        Code::UnknownId,
                        Some(thimac.id),
                        format!("thimac `{}` nested in missing thimac {parent}", thimac.name),
                    );
                    continue;
                }
            }
            let mut seen = BTreeSet::from([thimac.id]);
            let mut cursor = thimac.parent;
            while let Some(p) = cursor {
                if !seen.insert(p) {
                    if p == thimac.id {
                        self.push(
                            Code::NestingCycle,
                            Some(thimac.id),
                            format!("thimac `{}` is its own ancestor", thimac.name),
                        );
                    }
                    break;
                }
                cursor = model.thimac(p).and_then(|t| t.parent);
            }
        }
        for action in model.actions() {
            if model.thimac(action.owner).is_none() {
                self.push(
                    Code::UnknownId,
                    Some(action.id),
                    format!("action `{}` belongs to missing thimac {}", action.name, action.owner),
                );
            }
        }
    }

    fn names(&mut self) {
        let model = self.model;
        // Thimacs, bars and arc labels share one global namespace.
        let mut global: BTreeMap<&str, ElementId> = BTreeMap::new();
        for element in model.elements() {
            let name = match element {
                Element::Thimac(t) => Some(t.name.as_str()),
                Element::Bar(b) => Some(b.name.as_str()),
                Element::Arrow(a) => a.label.as_deref(),
                Element::Negative(n) => n.label.as_deref(),
                Element::Action(_) => None,
            };
            let Some(name) = name else { continue };
            if let Some(first) = global.get(name) {
                self.push(
                    Code::DupName,
                    Some(element.id()),
                    format!(
                        "{} name `{name}` already used by {} at {}",
                        element.kind_name(),
                        model.get(*first).map_or("element", Element::kind_name),
                        model.path(*first)
                    ),
                );
            } else {
                global.insert(name, element.id());
            }
        }
        for thimac in model.thimacs() {
            let mut siblings: BTreeSet<&str> = BTreeSet::new();
            for &child in model.children(thimac.id) {
                if let Some(action) = model.action(child) {
                    if !siblings.insert(action.name.as_str()) {
                        self.push(
                            Code::DupName,
                            Some(child),
                            format!(
                                "`{}` declared twice inside `{}`",
                                action.name,
                                model.path(thimac.id)
                            ),
                        );
                    }
                } else if let Some(t) = model.thimac(child) {
                    siblings.insert(t.name.as_str());
                }
            }
        }
    }

    fn arrows(&mut self) {
        let model = self.model;
        let bar_arcs: BTreeSet<ElementId> = model
            .bars()
            .flat_map(|b| b.required.iter().copied().chain([b.out]))
            .collect();
        for arrow in model.arrows() {
            let mut dangling = false;
            for end in [arrow.src, arrow.dst] {
                if !model.is_node(end) {
                    dangling = true;
                    self.push(
                        Code::DanglingArc,
                        Some(arrow.id),
                        format!(
                            "{} arc {} refers to {end}, which is not an action or bar",
                            arrow.kind.keyword(),
                            arrow.id
                        ),
                    );
                }
            }
            if dangling {
                continue;
            }
            if arrow.src == arrow.dst {
                self.push(
                    Code::SelfLoop,
                    Some(arrow.id),
                    format!("arc `{}` loops on itself", model.path(arrow.id)),
                );
                continue;
            }
            let touches_bar = model.bar(arrow.src).is_some() || model.bar(arrow.dst).is_some();
            if touches_bar {
                if !bar_arcs.contains(&arrow.id) {
                    self.push(
                        Code::BarMalformed,
                        Some(arrow.id),
                        format!("arc `{}` touches a bar it is not declared on", model.path(arrow.id)),
                    );
                }
                continue;
            }
            self.connection(arrow.id, arrow.kind, arrow.src, arrow.dst);
        }
    }

    /// Stage and machine-boundary rules for an action-to-action connection.
    fn connection(&mut self, arc: ElementId, kind: ArrowKind, src: ElementId, dst: ElementId) {
        let model = self.model;
        let (Some(s), Some(d)) = (model.action(src), model.action(dst)) else {
            return;
        };
        let same_machine = s.owner == d.owner;
        match kind {
            ArrowKind::Trigger if same_machine => self.push(
                Code::TriggerSameMachine,
                Some(arc),
                format!(
                    "trigger `{} ~> {}` stays inside one machine",
                    model.path(src),
                    model.path(dst)
                ),
            ),
            ArrowKind::Flow if !stage_allowed(s.kind, d.kind, same_machine) => self.push(
                Code::StageOrder,
                Some(arc),
                format!(
                    "flow from {} to {} is not a legal {} stage step (`{} -> {}`)",
                    s.kind,
                    d.kind,
                    if same_machine { "intra-machine" } else { "inter-machine" },
                    model.path(src),
                    model.path(dst)
                ),
            ),
            _ => {}
        }
    }

    fn bars(&mut self) {
        let model = self.model;
        for bar in model.bars() {
            let mut problems = Vec::new();
            if bar.required.len() < 2 {
                problems.push("needs at least two incoming arcs".to_string());
            }
            let out = model.arrow(bar.out);
            match out {
                Some(a) if a.src == bar.id => {}
                _ => problems.push("outgoing arc does not leave the bar".into()),
            }
            let kind = out.map(|a| a.kind);
            let mut sources = Vec::new();
            for &arc in &bar.required {
                match model.arrow(arc) {
                    Some(a) if a.dst == bar.id => {
                        if Some(a.kind) != kind {
                            problems.push(format!("arc {arc} differs in kind from the outgoing arc"));
                        }
                        sources.push(a.src);
                    }
                    _ => problems.push(format!("required arc {arc} does not end at the bar")),
                }
            }
            let declared: BTreeSet<ElementId> =
                bar.required.iter().copied().chain([bar.out]).collect();
            let extra = model
                .arrows()
                .filter(|a| (a.src == bar.id || a.dst == bar.id) && !declared.contains(&a.id))
                .count();
            if extra > 0 {
                problems.push(format!("{extra} undeclared arc(s) touch the bar"));
            }
            if !problems.is_empty() {
                self.push(
                    Code::BarMalformed,
                    Some(bar.id),
                    format!("bar `{}`: {}", bar.name, problems.join("; ")),
                );
                continue;
            }
            let out = out.expect("checked above");
            for src in sources {
                self.connection(bar.id, out.kind, src, out.dst);
            }
        }
    }

    fn negatives(&mut self) {
        let model = self.model;
        for neg in model.negative_arcs() {
            if model.action(neg.src).is_none() {
                self.push(
                    Code::DanglingArc,
                    Some(neg.id),
                    format!("negative arc {} has no source action", neg.id),
                );
            }
            if self.bundle.event(&neg.target).is_none() {
                self.push(
                    Code::UnknownEvent,
                    Some(neg.id),
                    format!("negative arc targets undeclared event `{}`", neg.target),
                );
            }
        }
    }

    fn events(&mut self) {
        let bundle = self.bundle;
        let mut names = BTreeSet::new();
        for event in &bundle.events {
            let pos = bundle.source.events.get(&event.name).copied();
            if !names.insert(event.name.as_str()) {
                self.out.push(
                    Diagnostic::new(Code::DupEvent, format!("event `{}` declared twice", event.name))
                        .at_opt(pos),
                );
            }
            if let Mappability::NotMappable(err) = check_region_mappable(self.model, &event.region)
            {
                self.out.push(
                    Diagnostic::new(err.code(), format!("region of `{}`: {err}", event.name))
                        .at_opt(pos),
                );
            }
        }
        for neg in &bundle.negatives {
            let pos = bundle.source.events.get(&neg.name).copied();
            if !names.insert(neg.name.as_str()) {
                self.out.push(
                    Diagnostic::new(Code::DupEvent, format!("event `{}` declared twice", neg.name))
                        .at_opt(pos),
                );
            }
            if bundle.event(&neg.negates).is_none() {
                self.out.push(
                    Diagnostic::new(
                        Code::UnknownEvent,
                        format!("`{}` negates undeclared event `{}`", neg.name, neg.negates),
                    )
                    .at_opt(pos),
                );
            } else if !self.model.negative_arcs().any(|a| a.target == neg.negates) {
                self.out.push(
                    Diagnostic::new(
                        Code::NegUnbound,
                        format!(
                            "no negative arc targets `{}`, so `{}` can never fire",
                            neg.negates, neg.name
                        ),
                    )
                    .at_opt(pos),
                );
            }
        }
    }
}

/// Static well-formedness. An empty result means the model is well-formed.
pub fn validate_static(bundle: &ModelBundle) -> Vec<Diagnostic> {
    let mut checker = Checker {
        bundle,
        model: &bundle.static_model,
        out: Vec::new(),
    };
    checker.nesting();
    checker.names();
    checker.arrows();
    checker.bars();
    checker.negatives();
    checker.events();
    checker.out
}
