//! Id assignment and name resolution: syntax tree to [`ModelBundle`].

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::bundle::{
    BehaviorDecl, DeclaredEdge, DeclaredJoin, EventDef, EventKind, ExclusivityPair, ModelBundle,
    NegativeEventDef, Scenario,
};
use crate::diag::{Code, Diagnostic, Position};
use crate::model::{
    Action, ActionKind, Arrow, ArrowKind, Element, ElementId, JoinBar, NegativeArc, StaticModel,
    Thimac,
};
use crate::parse::ast::{
    BehaviorItem, EventItem, FileAst, ModelItem, Name, PathAst, RefAst, RegionAst, ScenarioItem,
    ThimacAst, ThimacItem,
};
use crate::region::{make_region, merge_regions, Region, RegionError};

/// Arc declarations waiting for their endpoints to resolve.
enum Pending<'a> {
    Arrow {
        id: ElementId,
        kind: ArrowKind,
        src: &'a PathAst,
        dst: &'a PathAst,
        label: Option<&'a Name>,
    },
    Negative {
        id: ElementId,
        src: &'a PathAst,
        target: &'a Name,
        label: Option<&'a Name>,
    },
    Bar {
        id: ElementId,
        name: &'a Name,
        kind: ArrowKind,
        required: &'a [PathAst],
        dst: &'a PathAst,
    },
}

#[derive(Default)]
struct Names {
    thimacs: HashMap<String, ElementId>,
    bars: HashMap<String, ElementId>,
    labels: HashMap<String, ElementId>,
    children: HashMap<(ElementId, String), ElementId>,
}

impl Names {
    fn resolve(&self, path: &PathAst) -> Result<ElementId, Diagnostic> {
        let unresolved = || {
            Diagnostic::new(
                Code::UnresolvedName,
                format!("cannot resolve `{}`", path.dotted()),
            )
            .at(path.pos())
        };
        let (first, rest) = path.segments.split_first().ok_or_else(unresolved)?;
        let mut current = if let Some(&id) = self.thimacs.get(&first.text) {
            id
        } else if rest.is_empty() {
            return self
                .bars
                .get(&first.text)
                .or_else(|| self.labels.get(&first.text))
                .copied()
                .ok_or_else(unresolved);
        } else {
            return Err(unresolved());
        };
        for segment in rest {
            current = *self
                .children
                .get(&(current, segment.text.clone()))
                .ok_or_else(unresolved)?;
        }
        Ok(current)
    }
}

struct Lowering {
    elements: Vec<Element>,
    names: Names,
    positions: BTreeMap<ElementId, Position>,
    diags: Vec<Diagnostic>,
}

impl Lowering {
    fn next_id(&self) -> ElementId {
        ElementId(self.elements.len() as u32)
    }

    fn thimac(&mut self, ast: &ThimacAst, parent: Option<ElementId>) {
        let id = self.next_id();
        self.elements.push(Element::Thimac(Thimac {
            id,
            name: ast.name.text.clone(),
            parent,
        }));
        self.positions.insert(id, ast.name.pos);
        self.names.thimacs.entry(ast.name.text.clone()).or_insert(id);
        if let Some(parent) = parent {
            self.names
                .children
                .entry((parent, ast.name.text.clone()))
                .or_insert(id);
        }
        if ast.thing {
            self.action(id, ActionKind::Create, None, None, ast.name.pos);
        }
        for item in &ast.body {
            match item {
                ThimacItem::Action {
                    kind,
                    name,
                    label,
                    pos,
                } => self.action(id, *kind, name.as_ref(), label.clone(), *pos),
                ThimacItem::Thimac(child) => self.thimac(child, Some(id)),
            }
        }
    }

    fn action(
        &mut self,
        owner: ElementId,
        kind: ActionKind,
        name: Option<&Name>,
        label: Option<String>,
        pos: Position,
    ) {
        let id = self.next_id();
        let name = name.map_or_else(|| kind.keyword().to_string(), |n| n.text.clone());
        self.names.children.entry((owner, name.clone())).or_insert(id);
        self.elements.push(Element::Action(Action {
            id,
            kind,
            owner,
            name,
            label,
        }));
        self.positions.insert(id, pos);
    }

    fn resolve(&mut self, path: &PathAst) -> ElementId {
        match self.names.resolve(path) {
            Ok(id) => id,
            Err(d) => {
                self.diags.push(d);
                ElementId(u32::MAX)
            }
        }
    }
}

pub(crate) fn lower(file: &FileAst) -> Result<ModelBundle, Vec<Diagnostic>> {
    let (model_name, _) = file.model.clone().unwrap_or_default();
    let mut lw = Lowering {
        elements: Vec::new(),
        names: Names::default(),
        positions: BTreeMap::new(),
        diags: Vec::new(),
    };

    // Ids in declaration order; arcs get placeholders until every name is known.
    let mut pending = Vec::new();
    for item in &file.model_items {
        match item {
            ModelItem::Thimac(t) => lw.thimac(t, None),
            ModelItem::Arrow {
                kind,
                src,
                dst,
                label,
                pos,
            } => {
                let id = lw.next_id();
                lw.positions.insert(id, *pos);
                if let Some(label) = label {
                    lw.names.labels.entry(label.text.clone()).or_insert(id);
                }
                pending.push(Pending::Arrow {
                    id,
                    kind: *kind,
                    src,
                    dst,
                    label: label.as_ref(),
                });
                reserve(&mut lw, 1);
            }
            ModelItem::Negative {
                src,
                target,
                label,
                pos,
            } => {
                let id = lw.next_id();
                lw.positions.insert(id, *pos);
                if let Some(label) = label {
                    lw.names.labels.entry(label.text.clone()).or_insert(id);
                }
                pending.push(Pending::Negative {
                    id,
                    src,
                    target,
                    label: label.as_ref(),
                });
                reserve(&mut lw, 1);
            }
            ModelItem::Bar {
                name,
                kind,
                required,
                dst,
            } => {
                let id = lw.next_id();
                for offset in 0..=required.len() as u32 + 1 {
                    lw.positions.insert(ElementId(id.0 + offset), name.pos);
                }
                lw.names.bars.entry(name.text.clone()).or_insert(id);
                pending.push(Pending::Bar {
                    id,
                    name,
                    kind: *kind,
                    required,
                    dst,
                });
                reserve(&mut lw, required.len() + 2);
            }
        }
    }

    let event_names: HashSet<&str> = file
        .events
        .iter()
        .filter_map(|e| match e {
            EventItem::Event { name, .. } => Some(name.text.as_str()),
            _ => None,
        })
        .collect();

    for p in &pending {
        match p {
            Pending::Arrow {
                id,
                kind,
                src,
                dst,
                label,
            } => {
                let src = lw.resolve(src);
                let dst = lw.resolve(dst);
                lw.elements[id.0 as usize] = Element::Arrow(Arrow {
                    id: *id,
                    kind: *kind,
                    src,
                    dst,
                    label: label.map(|l| l.text.clone()),
                });
            }
            Pending::Negative {
                id,
                src,
                target,
                label,
            } => {
                let src = lw.resolve(src);
                if !event_names.contains(target.text.as_str()) {
                    lw.diags.push(
                        Diagnostic::new(
                            Code::UnresolvedName,
                            format!("negative arc targets undeclared event `{}`", target.text),
                        )
                        .at(target.pos),
                    );
                }
                lw.elements[id.0 as usize] = Element::Negative(NegativeArc {
                    id: *id,
                    src,
                    target: target.text.clone(),
                    label: label.map(|l| l.text.clone()),
                });
            }
            Pending::Bar {
                id,
                name,
                kind,
                required,
                dst,
            } => {
                let sources: Vec<ElementId> = required.iter().map(|p| lw.resolve(p)).collect();
                let dst = lw.resolve(dst);
                let arcs: Vec<ElementId> = (0..sources.len() as u32)
                    .map(|i| ElementId(id.0 + 1 + i))
                    .collect();
                let out = ElementId(id.0 + 1 + sources.len() as u32);
                lw.elements[id.0 as usize] = Element::Bar(JoinBar {
                    id: *id,
                    name: name.text.clone(),
                    required: arcs.clone(),
                    out,
                });
                for (arc, src) in arcs.iter().zip(sources) {
                    lw.elements[arc.0 as usize] = Element::Arrow(Arrow {
                        id: *arc,
                        kind: *kind,
                        src,
                        dst: *id,
                        label: None,
                    });
                }
                lw.elements[out.0 as usize] = Element::Arrow(Arrow {
                    id: out,
                    kind: *kind,
                    src: *id,
                    dst,
                    label: None,
                });
            }
        }
    }

    let Lowering {
        elements,
        positions,
        mut diags,
        ..
    } = lw;
    if !diags.is_empty() {
        return Err(diags);
    }
    let model = match StaticModel::new(model_name, elements) {
        Ok(m) => m,
        Err(e) => return Err(vec![Diagnostic::new(Code::Syntax, e.to_string())]),
    };

    let mut bundle = ModelBundle::new(model);
    bundle.source.elements = positions;
    lower_dynamic(file, &mut bundle, &mut diags);
    if diags.is_empty() {
        Ok(bundle)
    } else {
        Err(diags)
    }
}

fn reserve(lw: &mut Lowering, count: usize) {
    for _ in 0..count {
        // Placeholder thimac; overwritten once endpoints resolve.
        let id = lw.next_id();
        lw.elements.push(Element::Thimac(Thimac {
            id,
            name: String::new(),
            parent: None,
        }));
    }
}

fn lower_dynamic(file: &FileAst, bundle: &mut ModelBundle, diags: &mut Vec<Diagnostic>) {
    let model = bundle.static_model.clone();
    let mut names = Names::default();
    for t in model.thimacs() {
        names.thimacs.entry(t.name.clone()).or_insert(t.id);
        if let Some(parent) = t.parent {
            names.children.entry((parent, t.name.clone())).or_insert(t.id);
        }
    }
    for a in model.actions() {
        names.children.entry((a.owner, a.name.clone())).or_insert(a.id);
    }
    for b in model.bars() {
        names.bars.entry(b.name.clone()).or_insert(b.id);
    }
    for a in model.arrows() {
        if let Some(label) = &a.label {
            names.labels.entry(label.clone()).or_insert(a.id);
        }
    }
    for n in model.negative_arcs() {
        if let Some(label) = &n.label {
            names.labels.entry(label.clone()).or_insert(n.id);
        }
    }

    let mut seen: HashSet<String> = HashSet::new();
    let mut claim = |name: &Name, diags: &mut Vec<Diagnostic>| -> bool {
        if seen.insert(name.text.clone()) {
            true
        } else {
            diags.push(
                Diagnostic::new(Code::DupEvent, format!("event `{}` declared twice", name.text))
                    .at(name.pos),
            );
            false
        }
    };

    for item in &file.events {
        match item {
            EventItem::Event { name, kind, region } => {
                if !claim(name, diags) {
                    continue;
                }
                bundle.source.events.insert(name.text.clone(), name.pos);
                let region = match region {
                    RegionAst::List(refs) => {
                        let mut ids = Vec::new();
                        for r in refs {
                            match resolve_ref(&model, &names, r) {
                                Ok(id) => ids.push(id),
                                Err(d) => diags.push(d),
                            }
                        }
                        match make_region(&model, ids) {
                            Ok(r) => r,
                            Err(e) => {
                                diags.push(region_diag(&model, &e, name));
                                continue;
                            }
                        }
                    }
                    RegionAst::Merge(parts) => {
                        let mut acc = make_region(&model, []).unwrap_or_else(|_| Region::empty());
                        for part in parts {
                            match bundle.event(&part.text) {
                                Some(e) => match merge_regions(&acc, &e.region) {
                                    Ok(r) => acc = r,
                                    Err(e) => diags.push(region_diag(&model, &e, name)),
                                },
                                None => diags.push(
                                    Diagnostic::new(
                                        Code::UnresolvedName,
                                        format!(
                                            "`merge` refers to `{}`, which is not an earlier event",
                                            part.text
                                        ),
                                    )
                                    .at(part.pos),
                                ),
                            }
                        }
                        acc
                    }
                };
                let kind = kind.unwrap_or_else(|| EventKind::default_for(&model, &region));
                bundle.events.push(EventDef {
                    name: name.text.clone(),
                    region,
                    kind,
                });
            }
            EventItem::Negative { name, negates } => {
                if !claim(name, diags) {
                    continue;
                }
                bundle.source.events.insert(name.text.clone(), name.pos);
                bundle.negatives.push(NegativeEventDef {
                    name: name.text.clone(),
                    negates: negates.text.clone(),
                });
            }
            EventItem::Exclusive { a, b, pos } => {
                bundle.exclusive.push(ExclusivityPair {
                    a: a.text.clone(),
                    b: b.text.clone(),
                });
                bundle.source.exclusive.push(*pos);
            }
        }
    }

    let known = |name: &Name, diags: &mut Vec<Diagnostic>, bundle: &ModelBundle| {
        if bundle.event(&name.text).is_none() {
            diags.push(
                Diagnostic::new(
                    Code::UnresolvedName,
                    format!("unknown event `{}`", name.text),
                )
                .at(name.pos),
            );
        }
    };

    for item in &file.events {
        if let EventItem::Negative { negates, .. } = item {
            known(negates, diags, bundle);
        }
    }

    let mut behavior = BehaviorDecl::default();
    for item in &file.behavior {
        match item {
            BehaviorItem::Edge {
                pred,
                succ,
                temporal,
            } => {
                known(pred, diags, bundle);
                known(succ, diags, bundle);
                bundle.source.behavior.push(pred.pos);
                behavior.edges.push(DeclaredEdge {
                    pred: pred.text.clone(),
                    succ: succ.text.clone(),
                    temporal: *temporal,
                });
            }
            BehaviorItem::Join {
                required,
                successor,
                temporal,
                pos,
            } => {
                for r in required {
                    known(r, diags, bundle);
                }
                known(successor, diags, bundle);
                bundle.source.joins.push(*pos);
                behavior.joins.push(DeclaredJoin {
                    required: required.iter().map(|r| r.text.clone()).collect(),
                    successor: successor.text.clone(),
                    temporal: *temporal,
                });
            }
        }
    }
    bundle.behavior = behavior;

    let mut scenario_names = HashSet::new();
    for s in &file.scenarios {
        if !scenario_names.insert(s.name.text.clone()) {
            diags.push(
                Diagnostic::new(
                    Code::DupName,
                    format!("scenario `{}` declared twice", s.name.text),
                )
                .at(s.name.pos),
            );
            continue;
        }
        let mut scenario = Scenario::named(s.name.text.clone());
        for item in &s.items {
            match item {
                ScenarioItem::Choose(names) => {
                    for n in names {
                        known(n, diags, bundle);
                        scenario.choices.push(n.text.clone());
                    }
                }
                ScenarioItem::Start { tick, event } => {
                    known(event, diags, bundle);
                    scenario.starts.push((*tick, event.text.clone()));
                }
                ScenarioItem::Horizon(h) => scenario.horizon = Some(*h),
            }
        }
        bundle.scenarios.push(scenario);
    }
}

fn region_diag(model: &StaticModel, err: &RegionError, event: &Name) -> Diagnostic {
    let detail = match err {
        RegionError::Closure { arc, endpoint } => format!(
            "region of `{}` is not closed: `{}` needs `{}`",
            event.text,
            model.path(*arc),
            model.path(*endpoint)
        ),
        other => format!("region of `{}`: {other}", event.text),
    };
    Diagnostic::new(err.code(), detail).at(event.pos)
}

fn resolve_ref(model: &StaticModel, names: &Names, r: &RefAst) -> Result<ElementId, Diagnostic> {
    match r {
        RefAst::Path(p) => names.resolve(p),
        RefAst::Arrow { kind, src, dst } => {
            let s = names.resolve(src)?;
            let d = names.resolve(dst)?;
            model
                .arrows()
                .find(|a| a.kind == *kind && a.src == s && a.dst == d)
                .map(|a| a.id)
                .ok_or_else(|| {
                    Diagnostic::new(
                        Code::UnresolvedName,
                        format!(
                            "no {} arc `{} {} {}`",
                            kind.keyword(),
                            src.dotted(),
                            kind.symbol(),
                            dst.dotted()
                        ),
                    )
                    .at(src.pos())
                })
        }
        RefAst::Negative { src, target } => {
            let s = names.resolve(src)?;
            model
                .negative_arcs()
                .find(|n| n.src == s && n.target == target.text)
                .map(|n| n.id)
                .ok_or_else(|| {
                    Diagnostic::new(
                        Code::UnresolvedName,
                        format!("no negative arc `{} -o {}`", src.dotted(), target.text),
                    )
                    .at(src.pos())
                })
        }
    }
}
