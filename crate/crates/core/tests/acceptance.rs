//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmkit::analyze::{check_bundle, check_region_mappable, classify_at, classify_elements, Mappability};
use tmkit::batch;
use tmkit::bundle::{EventDef, EventKind, ModelBundle, Scenario};
use tmkit::cli::run_cli;
use tmkit::diag::Code;
use tmkit::export::{export_dot, DotView};
use tmkit::fixtures;
use tmkit::model::{ArrowKind, Element, ElementId, StaticModel};
use tmkit::parse::{parse_model, serialize_model};
use tmkit::region::{make_region, Region, RegionError};
use tmkit::sim::{derive_behavior, simulate, EdgeSupport, Trace};
use tmkit::OntClass;

use common::{close_over, dag_bundle, dag_pairs, fixture_path, golden_dir, is_closed, linearizations, random_bundle};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bundle(text: &str) -> ModelBundle {
    parse_model(text).expect("fixture parses")
}

fn run(bundle: &ModelBundle, scenario: &str) -> Result<Trace, String> {
    let s = bundle.scenario(scenario).ok_or(format!("no scenario {scenario}"))?;
    simulate(bundle, s)
        .map(|o| o.trace)
        .map_err(|e| format!("{scenario}: {e}"))
}

fn start(trace: &Trace, name: &str) -> Result<u32, String> {
    trace
        .event(name)
        .and_then(|e| e.start())
        .ok_or(format!("{name} never became actual"))
}

fn end(trace: &Trace, name: &str) -> Result<u32, String> {
    trace
        .event(name)
        .and_then(|e| e.end())
        .ok_or(format!("{name} never became actual"))
}

/// Inserts `line` just before the closing brace of the model block.
fn mutate(text: &str, line: &str) -> String {
    let close = text.find("\n}\n").expect("model block closes");
    format!("{}\n  {line}{}", &text[..close], &text[close..])
}

fn codes_of(bundle: &ModelBundle) -> Vec<Code> {
    check_bundle(bundle).into_iter().map(|d| d.code).collect()
}

fn criterion_1() -> Outcome {
    let clock = Instant::now();
    for name in ["bill.tm", "contract.tm", "crossing.tm"] {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let path = fixture_path(name);
        let code = run_cli(["tm", "check", path.to_str().unwrap()], &mut out, &mut err);
        let stdout = String::from_utf8_lossy(&out);
        ensure(code == 0 && stdout.starts_with("0 errors"), || {
            format!("{name}: exit {code}, {stdout} {}", String::from_utf8_lossy(&err))
        })?;
    }

    // Each fixture paired with a machine that has both receive and process.
    let subjects = [
        (fixtures::BILL, "Taller"),
        (fixtures::CONTRACT, "SellerOrder"),
        (fixtures::CROSSING, "Sidewalk"),
    ];
    let mut mutants = 0;
    for (text, machine) in subjects {
        let cases = [
            (format!("thing {machine}"), Code::DupName),
            (format!("flow {machine}.process -> {machine}.receive"), Code::StageOrder),
            (format!("trigger {machine}.receive ~> {machine}.process"), Code::TriggerSameMachine),
        ];
        for (line, expected) in cases {
            let mutant = parse_model(&mutate(text, &line)).map_err(|d| format!("`{line}`: {d:?}"))?;
            let found = codes_of(&mutant);
            ensure(found == vec![expected], || format!("`{line}` gave {found:?}"))?;
            mutants += 1;
        }

        // A new flow whose destination does not exist.
        let mut dangling = bundle(text);
        let model = &dangling.static_model;
        let src = model.actions().next().unwrap().id;
        let mut elements: Vec<Element> = model.elements().cloned().collect();
        elements.push(Element::Arrow(tmkit::model::Arrow {
            id: model.next_id(),
            kind: ArrowKind::Flow,
            src,
            dst: ElementId(model.next_id().0 + 100),
            label: None,
        }));
        dangling.static_model = StaticModel::new(model.name(), elements).unwrap();
        let found = codes_of(&dangling);
        ensure(found == vec![Code::DanglingArc], || format!("dangling arc gave {found:?}"))?;
        mutants += 1;
    }
    let elapsed = clock.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("3 fixtures clean, {mutants} mutants each flagged once, {elapsed:.0?}"))
}

fn criterion_2() -> Outcome {
    for (name, text) in fixtures::ALL {
        let first = bundle(text);
        let canonical = serialize_model(&first);
        let second = parse_model(&canonical).map_err(|d| format!("{name}: reparse failed {d:?}"))?;
        ensure(second.is_isomorphic(&first), || format!("{name}: not isomorphic"))?;
        ensure(second.static_model == first.static_model, || format!("{name}: ids moved"))?;
        ensure(serialize_model(&second) == canonical, || format!("{name}: not a fixed point"))?;
    }
    Ok("6 fixtures round-trip".into())
}

fn criterion_3() -> Outcome {
    let contract = bundle(fixtures::CONTRACT);
    let trace = run(&contract, "accept")?;
    let chain = [
        ("E1", "E2"),
        ("E2", "E3"),
        ("E3", "E4"),
        ("E3", "E5"),
        ("E3", "E6"),
        ("E5", "E7"),
        ("E6", "E7"),
        ("E7", "E8"),
        ("E8", "E9"),
        ("E9", "E10"),
    ];
    for (a, b) in chain {
        let (sa, sb) = (start(&trace, a)?, start(&trace, b)?);
        ensure(sa < sb, || format!("{a}@{sa} not before {b}@{sb}"))?;
    }
    let e13 = start(&trace, "E13")?;
    let gate = end(&trace, "E10")?.max(end(&trace, "E12")?);
    ensure(e13 > gate, || format!("E13@{e13} not after max end {gate}"))?;
    let reference = trace.to_json();
    for _ in 0..10 {
        ensure(run(&contract, "accept")?.to_json() == reference, || "trace differs between runs".into())?;
    }
    Ok(format!("10 orderings hold, E13@{e13} > {gate}, 10 identical runs"))
}

fn criterion_4() -> Outcome {
    let contract = bundle(fixtures::CONTRACT);
    let trace = run(&contract, "cancel")?;
    let negation = trace
        .negations
        .iter()
        .find(|n| n.name == "R5" && n.target == "E5")
        .ok_or("R5 never fired")?;
    let e5 = trace.event("E5").unwrap();
    ensure(e5.start().is_some(), || "E5 never actual".into())?;
    for t in negation.tick..trace.horizon {
        ensure(!e5.actual_at(t), || format!("E5 actual at {t} after R5"))?;
    }
    let region = contract.event("E5").unwrap().region.clone();
    for t in negation.tick..trace.horizon {
        let classes = classify_at(&contract, &trace, t).map_err(|e| e.to_string())?;
        for &id in region.elements() {
            ensure(contract.static_model.contains(id), || format!("{id} vanished"))?;
            ensure(classes[&id] == OntClass::Subsistent, || {
                format!("{} is {:?} at {t}", contract.static_model.path(id), classes[&id])
            })?;
        }
    }
    Ok(format!(
        "R5 at tick {}, E5 {:?}, {} region elements subsist afterwards",
        negation.tick,
        e5.spans,
        region.len()
    ))
}

fn criterion_5() -> Outcome {
    let contract = bundle(fixtures::CONTRACT);
    let both = Scenario::named("both").choose("E7").choose("E10").choose("E11");
    match simulate(&contract, &both) {
        Err(e) if e.to_diagnostics()[0].code == Code::Exclusivity => {}
        other => return Err(format!("both chosen gave {other:?}")),
    }
    for name in ["accept", "reject"] {
        let trace = run(&contract, name)?;
        for pair in &contract.exclusive {
            for t in 0..trace.horizon {
                ensure(!(trace.actual_at(&pair.a, t) && trace.actual_at(&pair.b, t)), || {
                    format!("{name}: {} and {} both actual at {t}", pair.a, pair.b)
                })?;
            }
        }
    }
    let accept = run(&contract, "accept")?;
    let reject = run(&contract, "reject")?;
    ensure(accept.event("E10").unwrap().start().is_some() && accept.event("E11").unwrap().start().is_none(), || "accept picked wrong branch".into())?;
    ensure(reject.event("E11").unwrap().start().is_some() && reject.event("E10").unwrap().start().is_none(), || "reject picked wrong branch".into())?;
    Ok("E10+E11 rejected with E_EXCLUSIVITY; accept and reject each realize one".into())
}

fn check_partition(bundle: &ModelBundle, trace: Option<&Trace>) -> Result<(), String> {
    let classes = classify_elements(bundle, trace).map_err(|e| e.to_string())?;
    let ids: Vec<ElementId> = bundle.static_model.ids().collect();
    ensure(classes.keys().copied().collect::<Vec<_>>() == ids, || "classification is not over the element set".into())?;
    for &id in &ids {
        let covering: Vec<usize> = (0..bundle.events.len())
            .filter(|&i| bundle.events[i].region.contains(id))
            .collect();
        let realized = covering
            .iter()
            .any(|&i| trace.is_some_and(|t| !t.events[i].spans.is_empty()));
        match &classes[&id] {
            OntClass::Existent(spans) => {
                ensure(realized, || format!("{id} existent without a realized event"))?;
                let horizon = trace.unwrap().horizon;
                ensure(!spans.is_empty() && spans.iter().all(|s| s.0 < s.1 && s.1 <= horizon), || {
                    format!("{id} has bad intervals {spans:?}")
                })?;
            }
            OntClass::Subsistent => {
                ensure(!covering.is_empty() && !realized, || format!("{id} wrongly subsistent"))?
            }
            OntClass::Neither => ensure(covering.is_empty(), || format!("{id} covered but neither"))?,
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let seeds: Vec<u64> = (0..200).collect();
    let results = batch::map(&seeds, |&seed| -> Result<(usize, usize), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bundle = random_bundle(&mut rng);
        let outcome = simulate(&bundle, &Scenario::named("run")).map_err(|e| format!("seed {seed}: {e}"))?;
        check_partition(&bundle, None).map_err(|e| format!("seed {seed}: {e}"))?;
        check_partition(&bundle, Some(&outcome.trace)).map_err(|e| format!("seed {seed}: {e}"))?;

        let before = classify_elements(&bundle, None).unwrap();
        let ids: Vec<ElementId> = bundle.static_model.ids().collect();
        let mut covered = 0;
        if !ids.is_empty() {
            let x = ids[rng.gen_range(0..ids.len())];
            let region = make_region(&bundle.static_model, close_over(&bundle.static_model, [x])).unwrap();
            bundle.events.push(EventDef {
                name: "Cover".into(),
                region,
                kind: EventKind::Extended,
            });
            let after = classify_elements(&bundle, None).unwrap();
            ensure(after[&x] != OntClass::Neither, || format!("seed {seed}: covered {x} is neither"))?;
            for (id, class) in &before {
                if *class == OntClass::Subsistent {
                    ensure(after[id] != OntClass::Neither, || format!("seed {seed}: {id} demoted"))?;
                }
            }
            covered = 1;
        }

        // An element outside every region: the square circle.
        let mut elements: Vec<Element> = bundle.static_model.elements().cloned().collect();
        let unicorn = bundle.static_model.next_id();
        elements.push(Element::Thimac(tmkit::model::Thimac {
            id: unicorn,
            name: "SquareCircle".into(),
            parent: None,
        }));
        bundle.static_model = StaticModel::new("random", elements).unwrap();
        let fresh = simulate(&bundle, &Scenario::named("run")).map_err(|e| format!("seed {seed}: {e}"))?;
        for trace in [None, Some(&fresh.trace)] {
            let classes = classify_elements(&bundle, trace).map_err(|e| e.to_string())?;
            ensure(classes[&unicorn] == OntClass::Neither, || format!("seed {seed}: square circle classified"))?;
        }
        Ok((bundle.static_model.len(), covered))
    });
    let mut elements = 0;
    for r in results {
        elements += r?.0;
    }
    Ok(format!("200 bundles, {elements} elements, partition/monotonicity/neither hold"))
}

fn criterion_7() -> Outcome {
    let mut summary = Vec::new();
    for (name, text) in [("bill", fixtures::BILL), ("contract", fixtures::CONTRACT), ("crossing", fixtures::CROSSING)] {
        let bundle = bundle(text);
        let model = &bundle.static_model;
        let ids: Vec<ElementId> = model.ids().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let subsets: Vec<Vec<ElementId>> = (0..500)
            .map(|k| {
                let p = [0.05, 0.2, 0.5, 0.9][k % 4];
                let seed: Vec<ElementId> = ids.iter().copied().filter(|_| rng.gen_bool(p)).collect();
                if k % 3 == 0 {
                    // Closed by construction, so successes are exercised too.
                    close_over(model, seed).into_iter().filter(|id| model.thimac(*id).is_none() || rng.gen_bool(0.5)).collect()
                } else {
                    seed
                }
            })
            .collect();
        let results = batch::make_regions(model, &subsets);
        let mut ok = 0;
        for (subset, result) in subsets.iter().zip(results) {
            let mappable = check_region_mappable(model, &Region::from_ids(subset.iter().copied()));
            match result {
                Ok(region) => {
                    ok += 1;
                    ensure(is_closed(model, region.elements()), || format!("{name}: open region {subset:?}"))?;
                    let input: BTreeSet<ElementId> = subset.iter().copied().collect();
                    ensure(region.elements().is_superset(&input), || "region lost elements".into())?;
                    ensure(
                        region.elements().difference(&input).all(|&id| {
                            subset.iter().any(|&a| model.action(a).is_some_and(|a| a.owner == id))
                        }),
                        || "region added more than owners".into(),
                    )?;
                    ensure(mappable == Mappability::Mappable, || format!("{name}: disagreement on {subset:?}"))?;
                }
                Err(RegionError::Closure { .. }) => {
                    ensure(!is_closed(model, &close_over_owners(model, subset)), || format!("{name}: spurious closure error"))?;
                    ensure(!mappable.is_mappable(), || format!("{name}: disagreement on {subset:?}"))?;
                }
                Err(other) => return Err(format!("{name}: unexpected {other}")),
            }
        }
        summary.push(format!("{name} {ok}/500 closed"));
    }
    Ok(summary.join(", "))
}

/// Adds direct owners of actions only.
fn close_over_owners(model: &StaticModel, subset: &[ElementId]) -> BTreeSet<ElementId> {
    let mut set: BTreeSet<ElementId> = subset.iter().copied().collect();
    set.extend(subset.iter().filter_map(|&id| model.action(id).map(|a| a.owner)));
    set
}

fn criterion_8() -> Outcome {
    let bill = bundle(fixtures::BILL);
    let trace = run(&bill, "compare")?;
    let graph = derive_behavior(&bill).map_err(|d| format!("{d:?}"))?;
    ensure(trace.events.len() == 9, || "bill timeline must have 9 rows".into())?;
    for (i, event) in trace.events.iter().enumerate() {
        ensure(event.spans.len() == 1, || format!("{} spans {:?}", event.name, event.spans))?;
        let span = event.spans[0];
        match event.kind {
            EventKind::Extended => ensure(span.1 == trace.horizon, || format!("{} stops at {}", event.name, span.1))?,
            EventKind::Terminating => {
                let next = graph
                    .succs(i)
                    .filter(|e| e.support == EdgeSupport::FlowBacked)
                    .filter_map(|e| trace.events[e.succ].start())
                    .min();
                let expected = next.unwrap_or(span.0 + 1);
                ensure(span.1 == expected, || format!("{} ends {} not {expected}", event.name, span.1))?;
            }
        }
    }
    let entity = trace.events.iter().filter(|e| e.kind == EventKind::Extended).count();
    ensure(entity == 6, || format!("{entity} entity rows"))?;

    let crossing = bundle(fixtures::CROSSING);
    for (scenario, event) in [("green", "E4"), ("red", "E8")] {
        let trace = run(&crossing, scenario)?;
        let e = trace.event(event).unwrap();
        ensure(e.end() == Some(trace.horizon), || format!("{scenario}: {event} {:?} horizon {}", e.spans, trace.horizon))?;
    }
    Ok("6 entity rows persist, 3 action rows end at successor start, crossing runs to horizon".into())
}

fn criterion_9() -> Outcome {
    let mut cases: Vec<(usize, u32)> = Vec::new();
    for n in 1..=6usize {
        let pairs = n * (n - 1) / 2;
        cases.extend((0..1u32 << pairs).map(|mask| (n, mask)));
    }
    let results = batch::map(&cases, |&(n, mask)| -> Result<(), String> {
        let pairs = dag_pairs(n, mask);
        // Vary declaration order and event kinds with the mask.
        let order: Vec<usize> = if mask % 2 == 0 { (0..n).collect() } else { (0..n).rev().collect() };
        let extended: Vec<bool> = (0..n).map(|i| (mask >> i) & 1 == 1 || (mask % 3 == 0 && i % 2 == 0)).collect();
        let bundle = dag_bundle(n, &pairs, &order, &extended);
        let trace = simulate(&bundle, &Scenario::named("all"))
            .map_err(|e| format!("n={n} mask={mask}: {e}"))?
            .trace;
        let mut started: Vec<(u32, usize, usize)> = Vec::new();
        for (pos, e) in trace.events.iter().enumerate() {
            let label: usize = e.name[1..].parse().unwrap();
            let s = e.start().ok_or(format!("n={n} mask={mask}: {} never started", e.name))?;
            started.push((s, pos, label));
        }
        started.sort();
        let order: Vec<usize> = started.iter().map(|&(_, _, l)| l).collect();
        ensure(linearizations(n, &pairs).contains(&order), || format!("n={n} mask={mask}: {order:?} not a linearization"))
    });
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    match failures.first() {
        None => Ok(format!("{} DAGs with up to 6 events", cases.len())),
        Some(first) => Err(format!("{} failures, first: {first}", failures.len())),
    }
}

fn criterion_10() -> Outcome {
    let mut files = 0;
    let dir = golden_dir();
    let views = |name: &str| -> Vec<(String, DotView)> {
        let shade: Vec<String> = match name {
            "bill" => vec!["E7".into(), "E8".into()],
            "contract" => vec!["E5".into(), "E16".into()],
            _ => vec!["E4".into()],
        };
        vec![
            (format!("{name}.static.dot"), DotView::Static),
            (format!("{name}.dynamic.dot"), DotView::Dynamic(shade)),
            (format!("{name}.behavior.dot"), DotView::Behavior),
        ]
    };
    for (name, text) in [("bill", fixtures::BILL), ("contract", fixtures::CONTRACT), ("crossing", fixtures::CROSSING)] {
        let b = bundle(text);
        let mut outputs: Vec<(String, String)> = Vec::new();
        for (file, view) in views(name) {
            outputs.push((file, export_dot(&b, &view).map_err(|e| e.to_string())?));
        }
        for s in &b.scenarios {
            outputs.push((format!("{name}.{}.json", s.name), run(&b, &s.name)?.to_json()));
        }
        for (file, produced) in outputs {
            let path = dir.join(&file);
            let golden = fs::read_to_string(&path).map_err(|e| format!("{file}: {e}"))?;
            ensure(!golden.contains('\r'), || format!("{file} is not LF"))?;
            ensure(produced == golden, || format!("{file} differs from golden"))?;
            files += 1;
        }
    }
    Ok(format!("{files} golden files match"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("fixture validity and mutation suite", criterion_1),
        ("round-trip on all fixtures", criterion_2),
        ("contract accept ordering and determinism", criterion_3),
        ("contract cancel negation and persistence", criterion_4),
        ("exclusivity", criterion_5),
        ("classification partition over random bundles", criterion_6),
        ("region closure over random subsets", criterion_7),
        ("extended and terminating timelines", criterion_8),
        ("small-instance order oracle", criterion_9),
        ("golden files", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
