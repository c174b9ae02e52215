//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use tmkit::bundle::{DeclaredEdge, EventDef, EventKind, ModelBundle};
use tmkit::model::{ActionKind, Element, ElementId, ModelBuilder, StaticModel};
use tmkit::region::make_region;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Closure predicate by direct endpoint scan: every arc's endpoints and every
/// action's owner are in the set.
pub fn is_closed(model: &StaticModel, set: &BTreeSet<ElementId>) -> bool {
    set.iter().all(|&id| match model.get(id) {
        Some(Element::Arrow(a)) => set.contains(&a.src) && set.contains(&a.dst),
        Some(Element::Negative(n)) => set.contains(&n.src),
        Some(Element::Action(a)) => set.contains(&a.owner),
        Some(_) => true,
        None => false,
    })
}

/// Smallest closed superset of `seed`, found by adding endpoints and owners
/// until nothing changes.
pub fn close_over(model: &StaticModel, seed: impl IntoIterator<Item = ElementId>) -> BTreeSet<ElementId> {
    let mut set: BTreeSet<ElementId> = seed.into_iter().collect();
    loop {
        let mut extra = Vec::new();
        for &id in &set {
            match model.get(id) {
                Some(Element::Arrow(a)) => extra.extend([a.src, a.dst]),
                Some(Element::Negative(n)) => extra.push(n.src),
                Some(Element::Action(a)) => extra.push(a.owner),
                Some(Element::Bar(_)) | Some(Element::Thimac(_)) | None => {}
            }
        }
        let before = set.len();
        set.extend(extra);
        if set.len() == before {
            return set;
        }
    }
}

/// A small well-formed static model: nested thimacs, random actions, legal
/// flows and cross-machine triggers.
pub fn random_model(rng: &mut impl Rng) -> StaticModel {
    let mut b = ModelBuilder::new("random");
    let mut thimacs: Vec<ElementId> = Vec::new();
    let mut actions: Vec<(ElementId, ElementId, ActionKind)> = Vec::new();
    let count = rng.gen_range(1..=5);
    for i in 0..count {
        let parent = if !thimacs.is_empty() && rng.gen_bool(0.4) {
            Some(*thimacs.choose(rng).unwrap())
        } else {
            None
        };
        let t = b.thimac(format!("T{i}"), parent);
        thimacs.push(t);
        let mut kinds = ActionKind::ALL.to_vec();
        kinds.shuffle(rng);
        for &kind in kinds.iter().take(rng.gen_range(0..=4)) {
            let a = b.action(t, kind);
            actions.push((a, t, kind));
        }
    }
    let legal = |s: ActionKind, d: ActionKind, same: bool| {
        use ActionKind::*;
        if same {
            matches!(
                (s, d),
                (Transfer, Receive)
                    | (Receive, Process)
                    | (Receive, Release)
                    | (Create, Process)
                    | (Create, Release)
                    | (Process, Release)
                    | (Release, Transfer)
            )
        } else {
            s == Transfer && d == Transfer
        }
    };
    let mut used = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=8) {
        if actions.len() < 2 {
            break;
        }
        let (s, so, sk) = *actions.choose(rng).unwrap();
        let (d, dof, dk) = *actions.choose(rng).unwrap();
        if s == d || !used.insert((s, d)) {
            continue;
        }
        if so != dof && rng.gen_bool(0.5) {
            b.trigger(s, d);
        } else if legal(sk, dk, so == dof) {
            b.flow(s, d);
        }
    }
    b.build()
}

/// Random closed regions over `model`, some of them empty.
pub fn random_region_ids(model: &StaticModel, rng: &mut impl Rng) -> BTreeSet<ElementId> {
    let ids: Vec<ElementId> = model.ids().collect();
    let seed: Vec<ElementId> = ids
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.25))
        .collect();
    close_over(model, seed)
}

/// A bundle with random events and a random forward-ordered behavior whose
/// edges are all `temporal`, so every edge is accepted.
pub fn random_bundle(rng: &mut impl Rng) -> ModelBundle {
    let model = random_model(rng);
    let mut bundle = ModelBundle::new(model);
    let count = rng.gen_range(0..=5);
    for i in 0..count {
        let ids = random_region_ids(&bundle.static_model, rng);
        let region = make_region(&bundle.static_model, ids).expect("closed by construction");
        let kind = if rng.gen_bool(0.5) {
            EventKind::Extended
        } else {
            EventKind::Terminating
        };
        bundle.events.push(EventDef {
            name: format!("E{i}"),
            region,
            kind,
        });
    }
    for s in 0..count {
        for p in 0..s {
            if rng.gen_bool(0.3) {
                bundle.behavior.edges.push(DeclaredEdge {
                    pred: format!("E{p}"),
                    succ: format!("E{s}"),
                    temporal: true,
                });
            }
        }
    }
    bundle
}

/// Behavior graph over `n` events whose edges are the bits of `mask` over
/// the pairs `(i, j)` with `i < j`, in row order.
pub fn dag_pairs(n: usize, mask: u32) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask & (1 << bit) != 0 {
                pairs.push((i, j));
            }
            bit += 1;
        }
    }
    pairs
}

/// Builds a bundle realizing a DAG: event `i` owns thimac `Ti`, and each
/// edge `p -> i` is a trigger `Tp.create ~> Ti.create` inside `i`'s region.
/// `order` gives the declaration position of each event and `extended`
/// marks which events persist.
pub fn dag_bundle(n: usize, pairs: &[(usize, usize)], order: &[usize], extended: &[bool]) -> ModelBundle {
    let mut b = ModelBuilder::new("dag");
    let mut creates = Vec::with_capacity(n);
    for i in 0..n {
        let t = b.thimac(format!("T{i}"), None);
        creates.push(b.action(t, ActionKind::Create));
    }
    let mut triggers = vec![Vec::new(); n];
    for &(p, s) in pairs {
        let arc = b.trigger(creates[p], creates[s]);
        triggers[s].push((arc, creates[p]));
    }
    let mut bundle = ModelBundle::new(b.build());
    let mut defs: Vec<(usize, EventDef)> = (0..n)
        .map(|i| {
            let mut ids = vec![creates[i]];
            for &(arc, src) in &triggers[i] {
                ids.extend([arc, src]);
            }
            let region = make_region(&bundle.static_model, ids).unwrap();
            let kind = if extended[i] {
                EventKind::Extended
            } else {
                EventKind::Terminating
            };
            (
                order[i],
                EventDef {
                    name: format!("E{i}"),
                    region,
                    kind,
                },
            )
        })
        .collect();
    defs.sort_by_key(|(pos, _)| *pos);
    bundle.events = defs.into_iter().map(|(_, d)| d).collect();
    bundle.behavior.edges = pairs
        .iter()
        .map(|&(p, s)| DeclaredEdge {
            pred: format!("E{p}"),
            succ: format!("E{s}"),
            temporal: false,
        })
        .collect();
    bundle
}

/// Every ordering of `0..n` respecting `pairs`, by brute-force permutation.
pub fn linearizations(n: usize, pairs: &[(usize, usize)]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut pos = vec![0; n];
        for (k, &e) in p.iter().enumerate() {
            pos[e] = k;
        }
        if pairs.iter().all(|&(a, b)| pos[a] < pos[b]) {
            out.insert(p.to_vec());
        }
    });
    out
}

fn permute(v: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}
