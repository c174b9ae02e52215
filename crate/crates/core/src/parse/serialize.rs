//! Canonical text form. Declarations come out in id order so that reparsing
//! reproduces the same ids.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::bundle::ModelBundle;
use crate::model::{ActionKind, Element, ElementId, StaticModel};

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_ref(model: &StaticModel, id: ElementId) -> String {
    model.path(id)
}

pub fn serialize_model(bundle: &ModelBundle) -> String {
    let model = &bundle.static_model;
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", quote(model.name()));

    let bar_arcs: BTreeSet<ElementId> = model
        .bars()
        .flat_map(|b| b.required.iter().copied().chain(std::iter::once(b.out)))
        .collect();

    for element in model.top_level() {
        match element {
            Element::Thimac(t) => write_thimac(&mut out, model, t.id, 1),
            Element::Arrow(a) => {
                if bar_arcs.contains(&a.id) {
                    continue;
                }
                let _ = write!(
                    out,
                    "  {} {} {} {}",
                    a.kind.keyword(),
                    node_ref(model, a.src),
                    a.kind.symbol(),
                    node_ref(model, a.dst)
                );
                if let Some(label) = &a.label {
                    let _ = write!(out, " as {label}");
                }
                out.push('\n');
            }
            Element::Negative(n) => {
                let _ = write!(out, "  neg {} -o {}", node_ref(model, n.src), n.target);
                if let Some(label) = &n.label {
                    let _ = write!(out, " as {label}");
                }
                out.push('\n');
            }
            Element::Bar(b) => {
                let sources: Vec<String> = b
                    .required
                    .iter()
                    .filter_map(|&arc| model.arrow(arc))
                    .map(|a| node_ref(model, a.src))
                    .collect();
                let (symbol, dst) = match model.arrow(b.out) {
                    Some(a) => (a.kind.symbol(), node_ref(model, a.dst)),
                    None => ("->", String::from("?")),
                };
                let _ = writeln!(
                    out,
                    "  bar {} requires ({}) {} {}",
                    b.name,
                    sources.join(", "),
                    symbol,
                    dst
                );
            }
            Element::Action(_) => {}
        }
    }
    out.push_str("}\n");

    if !bundle.events.is_empty() || !bundle.negatives.is_empty() || !bundle.exclusive.is_empty() {
        let rank = declaration_order(model);
        out.push_str("\nevents {\n");
        for event in &bundle.events {
            let _ = write!(out, "  event {} {} region {{", event.name, event.kind.keyword());
            if event.region.is_empty() {
                out.push_str(" }\n");
                continue;
            }
            out.push('\n');
            let mut members: Vec<ElementId> = event.region.elements().iter().copied().collect();
            members.sort_by_key(|id| (rank.get(id).copied().unwrap_or(usize::MAX), *id));
            let items: Vec<String> = members
                .iter()
                .map(|&id| format!("    {}", model.path(id)))
                .collect();
            out.push_str(&items.join(",\n"));
            out.push_str("\n  }\n");
        }
        for neg in &bundle.negatives {
            let _ = writeln!(out, "  negative {} negates {}", neg.name, neg.negates);
        }
        for pair in &bundle.exclusive {
            let _ = writeln!(out, "  exclusive ({}, {})", pair.a, pair.b);
        }
        out.push_str("}\n");
    }

    let behavior = &bundle.behavior;
    if !behavior.edges.is_empty() || !behavior.joins.is_empty() {
        out.push_str("\nbehavior {\n");
        for edge in &behavior.edges {
            let _ = write!(out, "  {} -> {}", edge.pred, edge.succ);
            if edge.temporal {
                out.push_str(" temporal");
            }
            out.push('\n');
        }
        for join in &behavior.joins {
            let _ = write!(out, "  join ({}) -> {}", join.required.join(", "), join.successor);
            if join.temporal {
                out.push_str(" temporal");
            }
            out.push('\n');
        }
        out.push_str("}\n");
    }

    for scenario in &bundle.scenarios {
        let _ = writeln!(out, "\nscenario {} {{", scenario.name);
        for choice in &scenario.choices {
            let _ = writeln!(out, "  choose {choice}");
        }
        for (tick, event) in &scenario.starts {
            let _ = writeln!(out, "  at {tick} start {event}");
        }
        if let Some(h) = scenario.horizon {
            let _ = writeln!(out, "  horizon {h}");
        }
        out.push_str("}\n");
    }
    out
}

/// Position of each element in the order the text declares it.
fn declaration_order(model: &StaticModel) -> BTreeMap<ElementId, usize> {
    fn visit(model: &StaticModel, id: ElementId, order: &mut Vec<ElementId>) {
        order.push(id);
        for &child in model.children(id) {
            visit(model, child, order);
        }
    }
    let mut order = Vec::new();
    for element in model.top_level() {
        match element {
            Element::Thimac(t) => visit(model, t.id, &mut order),
            Element::Bar(b) => {
                order.push(b.id);
                order.extend(b.required.iter().copied());
                order.push(b.out);
            }
            other => order.push(other.id()),
        }
    }
    let mut rank = BTreeMap::new();
    for id in order {
        let next = rank.len();
        rank.entry(id).or_insert(next);
    }
    rank
}

fn write_thimac(out: &mut String, model: &StaticModel, id: ElementId, depth: usize) {
    let Some(thimac) = model.thimac(id) else {
        return;
    };
    let indent = "  ".repeat(depth);
    let children = model.children(id);
    let implicit_create = children.first().and_then(|&c| model.action(c)).is_some_and(|a| {
        a.kind == ActionKind::Create && a.name == "create" && a.label.is_none()
    });
    let rest = if implicit_create { &children[1..] } else { children };
    if implicit_create {
        let _ = write!(out, "{indent}thing {}", thimac.name);
        if rest.is_empty() {
            out.push('\n');
            return;
        }
        out.push_str(" {\n");
    } else {
        let _ = writeln!(out, "{indent}thimac {} {{", thimac.name);
    }
    for &child in rest {
        match model.get(child) {
            Some(Element::Action(a)) => {
                let _ = write!(out, "{indent}  action {}", a.kind);
                if a.name != a.kind.keyword() {
                    let _ = write!(out, " {}", a.name);
                }
                if let Some(label) = &a.label {
                    let _ = write!(out, " label {}", quote(label));
                }
                out.push('\n');
            }
            Some(Element::Thimac(_)) => write_thimac(out, model, child, depth + 1),
            _ => {}
        }
    }
    let _ = writeln!(out, "{indent}}}");
}
