use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use groupcast::bounds::ExactOptions;
use groupcast::model::SystemParams;
use groupcast::sweep::{worst_case_exact, Execution};

fn worst_case_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("worst_case_sweep");
    group.sample_size(10);
    for (n, m, mem, l) in [(4, 4, 1, 2), (4, 4, 2, 3), (5, 5, 1, 2)] {
        let p = SystemParams::with_int(n, m, mem, l).unwrap();
        for execution in [Execution::Sequential, Execution::Parallel] {
            let options = ExactOptions {
                execution,
                ..ExactOptions::default()
            };
            group.bench_with_input(
                BenchmarkId::new(format!("{execution:?}"), format!("n{n}_m{m}_M{mem}_L{l}")),
                &p,
                |b, p| b.iter(|| worst_case_exact(black_box(p), &options).unwrap().chi_l),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, worst_case_sweep);
criterion_main!(benches);
