use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use tmkit::batch;
use tmkit::fixtures;
use tmkit::model::ElementId;
use tmkit::parse::parse_model;
use tmkit::Scenario;

fn scenarios(c: &mut Criterion) {
    let bundle = parse_model(fixtures::CONTRACT).unwrap();
    let runs: Vec<Scenario> = bundle.scenarios.iter().cycle().take(96).cloned().collect();
    let mut group = c.benchmark_group("simulate_scenarios");
    group.bench_with_input(BenchmarkId::new("seq", runs.len()), &runs, |b, runs| {
        b.iter(|| batch::simulate_scenarios_seq(black_box(&bundle), runs))
    });
    group.bench_with_input(BenchmarkId::new("par", runs.len()), &runs, |b, runs| {
        b.iter(|| batch::simulate_scenarios(black_box(&bundle), runs))
    });
    group.finish();
}

fn regions(c: &mut Criterion) {
    let bundle = parse_model(fixtures::CONTRACT).unwrap();
    let model = &bundle.static_model;
    let ids: Vec<ElementId> = model.ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let subsets: Vec<Vec<ElementId>> = (0..4000)
        .map(|_| ids.iter().copied().filter(|_| rng.gen_bool(0.3)).collect())
        .collect();
    let mut group = c.benchmark_group("make_regions");
    group.bench_with_input(BenchmarkId::new("seq", subsets.len()), &subsets, |b, s| {
        b.iter(|| batch::make_regions_seq(black_box(model), s))
    });
    group.bench_with_input(BenchmarkId::new("par", subsets.len()), &subsets, |b, s| {
        b.iter(|| batch::make_regions(black_box(model), s))
    });
    group.finish();
}

criterion_group!(benches, scenarios, regions);
criterion_main!(benches);
