//! Ordering among events, checked against the static model's arcs.

use std::collections::{BTreeSet, VecDeque};

use crate::bundle::ModelBundle;
use crate::diag::{Code, Diagnostic, Position};
use crate::model::{ElementId, StaticModel};
use crate::region::Region;

/// How an ordering edge is justified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeSupport {
    /// A flow/trigger path leads from the predecessor's region into the
    /// successor's.
    FlowBacked,
    /// Declared `temporal`: ordering without a connecting path.
    TemporalOnly,
}

/// Edge between events, as indices into the bundle's event list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorEdge {
    pub pred: usize,
    pub succ: usize,
    pub support: EdgeSupport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorJoin {
    pub required: Vec<usize>,
    pub successor: usize,
    pub support: Vec<EdgeSupport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BehaviorGraph {
    /// Event names in declaration order.
    pub nodes: Vec<String>,
    pub edges: Vec<BehaviorEdge>,
    pub joins: Vec<BehaviorJoin>,
}

impl BehaviorGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    /// Predecessors through ordinary edges.
    pub fn preds(&self, node: usize) -> impl Iterator<Item = &BehaviorEdge> + '_ {
        self.edges.iter().filter(move |e| e.succ == node)
    }

    /// Successors through ordinary edges.
    pub fn succs(&self, node: usize) -> impl Iterator<Item = &BehaviorEdge> + '_ {
        self.edges.iter().filter(move |e| e.pred == node)
    }

    pub fn join_into(&self, node: usize) -> Option<&BehaviorJoin> {
        self.joins.iter().find(|j| j.successor == node)
    }

    /// No ordinary predecessor and not the target of a join.
    pub fn is_root(&self, node: usize) -> bool {
        self.preds(node).next().is_none() && self.join_into(node).is_none()
    }

    /// Every ordering pair, joins flattened into one pair per member.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.pred, e.succ)).collect();
        for join in &self.joins {
            pairs.extend(join.required.iter().map(|&r| (r, join.successor)));
        }
        pairs
    }

    /// Kahn's algorithm; `None` when the pairs contain a cycle. Ties go to
    /// the lowest index.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let pairs = self.pairs();
        let mut indegree = vec![0usize; n];
        for &(_, s) in &pairs {
            indegree[s] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(node) = ready.pop_first() {
            order.push(node);
            for &(p, s) in &pairs {
                if p == node {
                    indegree[s] -= 1;
                    if indegree[s] == 0 {
                        ready.insert(s);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

fn nodes_of(model: &StaticModel, region: &Region) -> BTreeSet<ElementId> {
    region
        .elements()
        .iter()
        .copied()
        .filter(|&id| model.is_node(id))
        .collect()
}

/// Breadth-first search over flow and trigger arcs from any action or bar of
/// `from` to any action or bar of `to`. A shared node is a path of length 0.
pub fn has_flow_path(model: &StaticModel, from: &Region, to: &Region) -> bool {
    let targets = nodes_of(model, to);
    if targets.is_empty() {
        return false;
    }
    let mut seen = nodes_of(model, from);
    let mut queue: VecDeque<ElementId> = seen.iter().copied().collect();
    while let Some(node) = queue.pop_front() {
        if targets.contains(&node) {
            return true;
        }
        for arrow in model.arrows().filter(|a| a.src == node) {
            if seen.insert(arrow.dst) {
                queue.push_back(arrow.dst);
            }
        }
    }
    false
}

/// Resolves declared behavior against the bundle's events and classifies
/// every edge.
pub fn derive_behavior(bundle: &ModelBundle) -> Result<BehaviorGraph, Vec<Diagnostic>> {
    let model = &bundle.static_model;
    let mut diags = Vec::new();
    let mut graph = BehaviorGraph {
        nodes: bundle.events.iter().map(|e| e.name.clone()).collect(),
        ..BehaviorGraph::default()
    };

    let resolve = |name: &str, pos: Option<Position>, diags: &mut Vec<Diagnostic>| {
        let found = bundle.event_index(name);
        if found.is_none() {
            diags.push(
                Diagnostic::new(Code::UnknownEvent, format!("behavior names undeclared event `{name}`"))
                    .at_opt(pos),
            );
        }
        found
    };
    let support = |p: usize, s: usize, temporal: bool| {
        let backed = has_flow_path(model, &bundle.events[p].region, &bundle.events[s].region);
        match (backed, temporal) {
            (true, _) => Some(EdgeSupport::FlowBacked),
            (false, true) => Some(EdgeSupport::TemporalOnly),
            (false, false) => None,
        }
    };
    let unsupported = |p: usize, s: usize, pos: Option<Position>| {
        Diagnostic::new(
            Code::EdgeUnsupported,
            format!(
                "no flow or trigger path leads from `{}` into `{}`; mark the edge `temporal` if the ordering is intended",
                bundle.events[p].name, bundle.events[s].name
            ),
        )
        .at_opt(pos)
    };

    for (i, edge) in bundle.behavior.edges.iter().enumerate() {
        let pos = bundle.source.behavior.get(i).copied();
        let pred = resolve(&edge.pred, pos, &mut diags);
        let succ = resolve(&edge.succ, pos, &mut diags);
        let (Some(pred), Some(succ)) = (pred, succ) else { continue };
        match support(pred, succ, edge.temporal) {
            Some(support) => graph.edges.push(BehaviorEdge { pred, succ, support }),
            None => diags.push(unsupported(pred, succ, pos)),
        }
    }

    for (i, join) in bundle.behavior.joins.iter().enumerate() {
        let pos = bundle.source.joins.get(i).copied();
        let required: Vec<Option<usize>> =
            join.required.iter().map(|r| resolve(r, pos, &mut diags)).collect();
        let successor = resolve(&join.successor, pos, &mut diags);
        let (Some(successor), Some(required)) =
            (successor, required.into_iter().collect::<Option<Vec<usize>>>())
        else {
            continue;
        };
        let mut supports = Vec::with_capacity(required.len());
        for &r in &required {
            match support(r, successor, join.temporal) {
                Some(s) => supports.push(s),
                None => diags.push(unsupported(r, successor, pos)),
            }
        }
        if supports.len() != required.len() {
            continue;
        }
        let conflict = graph.edges.iter().any(|e| e.succ == successor)
            || graph.join_into(successor).is_some();
        if conflict {
            diags.push(
                Diagnostic::new(
                    Code::JoinConflict,
                    format!("join successor `{}` has other incoming edges", join.successor),
                )
                .at_opt(pos),
            );
            continue;
        }
        graph.joins.push(BehaviorJoin {
            required,
            successor,
            support: supports,
        });
    }

    if graph.topological_order().is_none() {
        diags.push(Diagnostic::new(
            Code::Cycle,
            format!("behavior edges form a cycle through {}", cycle_members(&graph).join(", ")),
        ));
    }

    if diags.is_empty() {
        Ok(graph)
    } else {
        Err(diags)
    }
}

/// Names of events left over after peeling off everything Kahn can order.
fn cycle_members(graph: &BehaviorGraph) -> Vec<String> {
    let n = graph.len();
    let pairs = graph.pairs();
    let mut alive = vec![true; n];
    loop {
        let removable: Vec<usize> = (0..n)
            .filter(|&i| alive[i])
            .filter(|&i| !pairs.iter().any(|&(p, s)| s == i && alive[p]))
            .collect();
        if removable.is_empty() {
            break;
        }
        for i in removable {
            alive[i] = false;
        }
    }
    (0..n).filter(|&i| alive[i]).map(|i| graph.nodes[i].clone()).collect()
}
