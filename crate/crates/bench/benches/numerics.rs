use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sublil_core::{
    choquet, run_trajectory, CheckpointRule, Distribution, MeasureFamily, Objective, Policy,
    SeedPair, Side, Transform, TruncationSchedule,
};

fn pair() -> MeasureFamily {
    MeasureFamily::new(vec![
        Distribution::gaussian(0.0, 1.0).unwrap(),
        Distribution::gaussian(0.0, 4.0).unwrap(),
    ])
    .unwrap()
}

fn quadrature(c: &mut Criterion) {
    let pareto =
        MeasureFamily::new(vec![Distribution::symmetric_pareto(3.0, 1.0).unwrap()]).unwrap();
    let fam = pair();
    c.bench_function("upper_expect gaussian x^2 ∧ 100", |b| {
        b.iter(|| fam.upper_expect(|x| black_box(x * x).min(100.0)).unwrap())
    });
    c.bench_function("upper_expect pareto |x|^1.5", |b| {
        b.iter(|| {
            pareto
                .upper_expect(|x| black_box(x).abs().powf(1.5))
                .unwrap()
        })
    });
}

fn discrete_choquet(c: &mut Criterion) {
    let members = (1..=4)
        .map(|k| {
            let atoms: Vec<(f64, f64)> = (0..32)
                .map(|i| ((i * k) as f64 / 4.0 - 8.0, 1.0 / 32.0))
                .collect();
            Distribution::discrete(&atoms).unwrap()
        })
        .collect();
    let fam = MeasureFamily::new(members).unwrap();
    c.bench_function("choquet 4 members x 32 atoms", |b| {
        b.iter(|| choquet(black_box(&fam), Transform::Square, Side::Upper).unwrap())
    });
}

fn trajectory(c: &mut Criterion) {
    let fam = pair();
    let schedule = TruncationSchedule::default();
    let mut group = c.benchmark_group("trajectory 1e5");
    group.sample_size(10);
    for (name, policy) in [
        ("constant", Policy::Constant { theta: 1 }),
        (
            "greedy",
            Policy::Greedy {
                objective: Objective::Maximize,
            },
        ),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| {
                run_trajectory(
                    &fam,
                    &policy,
                    &schedule,
                    100_000,
                    SeedPair::new(1, 0),
                    CheckpointRule::default(),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, quadrature, discrete_choquet, trajectory);
criterion_main!(benches);
