use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::bundle::{EventKind, ModelBundle};
use crate::diag::{Code, Diagnostic};
use crate::model::{ArrowKind, Element, ElementId, StaticModel};
use crate::parse::quote;
use crate::sim::{derive_behavior, EdgeSupport};

const SHADE_NODE: &str = "#cfe3f7";
const SHADE_CLUSTER: &str = "#eef5fc";
const SHADE_EDGE: &str = "#1f5fa8";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DotView {
    /// The static model as drawn.
    Static,
    /// The static model with the named events' regions shaded.
    Dynamic(Vec<String>),
    /// The event graph.
    Behavior,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("no event named `{0}`")]
    UnknownEvent(String),
}

impl ExportError {
    pub fn code(&self) -> Code {
        Code::UnknownEvent
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new(self.code(), self.to_string())
    }
}

fn node(id: ElementId) -> String {
    format!("\"n{}\"", id.0)
}

fn event_node(name: &str) -> String {
    quote(&format!("event:{name}"))
}

pub fn export_dot(bundle: &ModelBundle, view: &DotView) -> Result<String, ExportError> {
    match view {
        DotView::Static => Ok(static_dot(bundle, &BTreeSet::new())),
        DotView::Dynamic(events) => {
            let mut shaded = BTreeSet::new();
            for name in events {
                let event = bundle
                    .event(name)
                    .ok_or_else(|| ExportError::UnknownEvent(name.clone()))?;
                shaded.extend(event.region.elements().iter().copied());
            }
            Ok(static_dot(bundle, &shaded))
        }
        DotView::Behavior => Ok(behavior_dot(bundle)),
    }
}

fn static_dot(bundle: &ModelBundle, shaded: &BTreeSet<ElementId>) -> String {
    let model = &bundle.static_model;
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(model.name()));
    out.push_str("  compound=true;\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10, shape=ellipse];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=9];\n");

    for thimac in model.thimacs().filter(|t| t.parent.is_none()) {
        write_cluster(&mut out, model, thimac.id, 1, shaded);
    }

    for bar in model.bars() {
        let _ = write!(
            out,
            "  {} [label=\"\", xlabel={}, shape=rect, style=filled, fillcolor=black, height=0.06, width=1.2, fixedsize=true",
            node(bar.id),
            quote(&bar.name)
        );
        if shaded.contains(&bar.id) {
            let _ = write!(out, ", color=\"{SHADE_EDGE}\", fillcolor=\"{SHADE_EDGE}\"");
        }
        out.push_str("];\n");
    }

    let targets: BTreeSet<&str> = model.negative_arcs().map(|n| n.target.as_str()).collect();
    for target in &targets {
        let _ = writeln!(
            out,
            "  {} [label={}, shape=box, style=\"rounded,dashed\"];",
            event_node(target),
            quote(target)
        );
    }

    for element in model.elements() {
        let mut attrs: Vec<String> = Vec::new();
        let (src, dst) = match element {
            Element::Arrow(a) => {
                if a.kind == ArrowKind::Trigger {
                    attrs.push("style=dashed".into());
                }
                if model.bar(a.dst).is_some() {
                    attrs.push("arrowhead=none".into());
                }
                if let Some(label) = &a.label {
                    attrs.push(format!("label={}", quote(label)));
                }
                (node(a.src), node(a.dst))
            }
            Element::Negative(n) => {
                attrs.push("arrowhead=diamond".into());
                if let Some(label) = &n.label {
                    attrs.push(format!("label={}", quote(label)));
                }
                (node(n.src), event_node(&n.target))
            }
            _ => continue,
        };
        if shaded.contains(&element.id()) {
            attrs.push(format!("color=\"{SHADE_EDGE}\""));
            attrs.push("penwidth=2".into());
        }
        let _ = write!(out, "  {src} -> {dst}");
        if !attrs.is_empty() {
            let _ = write!(out, " [{}]", attrs.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

fn write_cluster(
    out: &mut String,
    model: &StaticModel,
    id: ElementId,
    depth: usize,
    shaded: &BTreeSet<ElementId>,
) {
    let Some(thimac) = model.thimac(id) else {
        return;
    };
    let indent = "  ".repeat(depth);
    let _ = writeln!(out, "{indent}subgraph \"cluster_{}\" {{", id.0);
    let _ = writeln!(out, "{indent}  label={};", quote(&thimac.name));
    if shaded.contains(&id) {
        let _ = writeln!(out, "{indent}  style=filled;");
        let _ = writeln!(out, "{indent}  fillcolor=\"{SHADE_CLUSTER}\";");
    }
    for &child in model.children(id) {
        match model.get(child) {
            Some(Element::Action(a)) => {
                let mut label = a.kind.keyword().to_string();
                if a.name != a.kind.keyword() {
                    label = format!("{label}\n{}", a.name);
                }
                if let Some(text) = &a.label {
                    label = format!("{label}\n({text})");
                }
                let _ = write!(out, "{indent}  {} [label={}", node(child), quote(&label));
                if shaded.contains(&child) {
                    let _ = write!(out, ", style=filled, fillcolor=\"{SHADE_NODE}\"");
                }
                out.push_str("];\n");
            }
            Some(Element::Thimac(_)) => write_cluster(out, model, child, depth + 1, shaded),
            _ => {}
        }
    }
    if model.children(id).is_empty() {
        // Graphviz drops empty clusters; keep the box visible.
        let _ = writeln!(
            out,
            "{indent}  \"empty_{}\" [label=\"\", shape=point, style=invis];",
            id.0
        );
    }
    let _ = writeln!(out, "{indent}}}");
}

fn behavior_dot(bundle: &ModelBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&format!("{} behavior", bundle.static_model.name())));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10, shape=box, style=rounded];\n");
    for event in &bundle.events {
        let _ = write!(out, "  {}", quote(&event.name));
        if event.kind == EventKind::Extended {
            out.push_str(" [peripheries=2]");
        }
        out.push_str(";\n");
    }
    for neg in &bundle.negatives {
        let _ = writeln!(out, "  {} [style=\"rounded,dashed\"];", quote(&neg.name));
    }

    // Classified edges when the behavior derives cleanly, declared flags
    // otherwise.
    let derived = derive_behavior(bundle).ok();
    for (i, edge) in bundle.behavior.edges.iter().enumerate() {
        let temporal = match &derived {
            Some(g) => g.edges.get(i).is_some_and(|e| e.support == EdgeSupport::TemporalOnly),
            None => edge.temporal,
        };
        let _ = write!(out, "  {} -> {}", quote(&edge.pred), quote(&edge.succ));
        if temporal {
            out.push_str(" [style=dotted]");
        }
        out.push_str(";\n");
    }
    for (i, join) in bundle.behavior.joins.iter().enumerate() {
        let bar = quote(&format!("join:{i}"));
        let _ = writeln!(
            out,
            "  {bar} [label=\"\", shape=rect, style=filled, fillcolor=black, height=0.06, width=0.8, fixedsize=true];"
        );
        let temporal = match &derived {
            Some(g) => g
                .joins
                .get(i)
                .is_some_and(|j| j.support.contains(&EdgeSupport::TemporalOnly)),
            None => join.temporal,
        };
        let style = if temporal { ", style=dotted" } else { "" };
        for required in &join.required {
            let _ = writeln!(out, "  {} -> {bar} [arrowhead=none{style}];", quote(required));
        }
        let _ = writeln!(out, "  {bar} -> {};", quote(&join.successor));
    }
    for neg in &bundle.negatives {
        let _ = writeln!(
            out,
            "  {} -> {} [arrowhead=diamond];",
            quote(&neg.name),
            quote(&neg.negates)
        );
    }
    out.push_str("}\n");
    out
}
