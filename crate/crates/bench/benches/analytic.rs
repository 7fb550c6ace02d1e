use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fdssk_core::analytic::{outage_closed, pep_exact, pep_gcq, pep_upper};
use fdssk_core::SystemParams;

fn params(snr_db: f64) -> SystemParams {
    SystemParams::new(256, 2)
        .with_li_level(0.1)
        .with_fixed_error(0.1)
        .with_snr_db(snr_db)
}

fn pep_methods(c: &mut Criterion) {
    let mut group = c.benchmark_group("pep");
    let p = params(-25.0);
    for order in [3, 6, 20] {
        group.bench_with_input(BenchmarkId::new("gcq", order), &order, |b, &order| {
            b.iter(|| pep_gcq(black_box(&p), order).unwrap())
        });
    }
    group.bench_function("exact", |b| b.iter(|| pep_exact(black_box(&p)).unwrap()));
    group.bench_function("upper", |b| b.iter(|| pep_upper(black_box(&p)).unwrap()));
    group.finish();
}

fn outage(c: &mut Criterion) {
    let p = params(0.0);
    c.bench_function("outage_closed", |b| b.iter(|| outage_closed(black_box(&p), 3.0).unwrap()));
}

criterion_group!(benches, pep_methods, outage);
criterion_main!(benches);
