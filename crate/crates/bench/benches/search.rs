//! Search throughput at the default decision budget, plus the incremental
//! preference-table hot path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use omcts::engine::{run_search, EstimatorKind, SearchConfig};
use omcts::mdp::{ActionId, EnvironmentModel, GameStatus, MeteredModel, Outcome, RandomSource};
use omcts::ordinal::OutcomeTable;
use omcts::pb::run_search_pb;
use omcts::GameConfig;

fn search_estimators(c: &mut Criterion) {
    let env = "gapworld".parse::<GameConfig>().unwrap().build().unwrap();
    let root = env.initial_state();
    let mut group = c.benchmark_group("search-budget-250");
    for (name, estimator) in [
        ("average", EstimatorKind::Average),
        ("mixmax", EstimatorKind::MixMax { q: 0.25 }),
        ("node-normalized", EstimatorKind::NodeNormalized),
        ("borda", EstimatorKind::Borda),
    ] {
        group.bench_function(name, |b| {
            let cfg = SearchConfig { seed: 7, ..SearchConfig::new(estimator) };
            b.iter(|| {
                let mut meter = MeteredModel::new(&env, 250);
                black_box(run_search(&mut meter, &root, &cfg))
            })
        });
    }
    group.bench_function("pb", |b| {
        let cfg = SearchConfig { seed: 7, ..SearchConfig::new(EstimatorKind::Borda) };
        b.iter(|| {
            let mut meter = MeteredModel::new(&env, 250);
            black_box(run_search_pb(&mut meter, &root, &cfg))
        })
    });
    group.finish();
}

fn table_updates(c: &mut Criterion) {
    let actions: Vec<ActionId> = (0..5).map(ActionId).collect();
    let mut rng = RandomSource::from_seed(3);
    let outcomes: Vec<(ActionId, Outcome)> = (0..1024)
        .map(|_| {
            let a = actions[rng.index(actions.len())];
            (a, Outcome::new(GameStatus::Playing, rng.index(16) as f64))
        })
        .collect();
    c.bench_function("ordinal-table-1024-records", |b| {
        b.iter(|| {
            let mut table = OutcomeTable::new(&actions);
            for (a, o) in &outcomes {
                table.record_outcome(*a, *o).unwrap();
            }
            black_box(table.borda_score(ActionId(0)).unwrap())
        })
    });
}

criterion_group!(benches, search_estimators, table_updates);
criterion_main!(benches);
