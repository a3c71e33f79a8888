use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use richardson_core::estimators::{estimate_mu, survival_curve, Plan, SurvivalSpec};
use richardson_core::exec::Execution;
use richardson_core::lattice::SeedConfig;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn mu_replications(c: &mut Criterion) {
    let mut group = c.benchmark_group("mu_n32_64reps");
    group.sample_size(10);
    for (name, exec) in MODES {
        let plan = Plan::new(2, 1, 64).with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &plan, |b, plan| {
            b.iter(|| estimate_mu(plan, 1.0, 32).unwrap())
        });
    }
    group.finish();
}

fn survival_replications(c: &mut Criterion) {
    let mut group = c.benchmark_group("survival_halfaxis_r16_64reps");
    group.sample_size(10);
    let spec = SurvivalSpec::new(SeedConfig::half_axis(2, 32), 1.0, vec![4, 8, 16], 0.42);
    for (name, exec) in MODES {
        let plan = Plan::new(2, 1, 64).with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &plan, |b, plan| {
            b.iter(|| survival_curve(plan, &spec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, mu_replications, survival_replications);
criterion_main!(benches);
