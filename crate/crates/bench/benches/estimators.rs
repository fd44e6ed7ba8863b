use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vislat::kfree::kfree_mask;
use vislat::numtheory::{build_tables, eval_series, SeriesKind};
use vislat::stats::{
    density_visible, empirical_autocorr, fourier_bohr, AutocorrMode, PointSet, Region,
};
use vislat::Lattice;

fn sieves(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieve");
    for limit in [100_000usize, 1_000_000] {
        group.bench_with_input(BenchmarkId::new("tables", limit), &limit, |b, &n| {
            b.iter(|| build_tables(n).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("squarefree_mask", limit),
            &limit,
            |b, &n| b.iter(|| kfree_mask(-(n as i64), n as i64, 2).unwrap()),
        );
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    c.bench_function("xi_euler_product_1e5", |b| {
        b.iter(|| eval_series(SeriesKind::Xi, 2, 100_000).unwrap())
    });
}

fn estimators(c: &mut Criterion) {
    let z2 = Lattice::integer(2).unwrap();
    let mut group = c.benchmark_group("estimators");
    group.sample_size(10);
    for radius in [100.0f64, 300.0] {
        let region = Region::origin_ball(2, radius);
        group.bench_with_input(
            BenchmarkId::new("density_visible", radius),
            &region,
            |b, r| b.iter(|| density_visible(&z2, r).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("autocorr_visible", radius),
            &radius,
            |b, &r| {
                b.iter(|| {
                    empirical_autocorr(&PointSet::Visible(&z2), &[1, 0], r, AutocorrMode::TwoSided)
                        .unwrap()
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("fourier_visible", radius),
            &radius,
            |b, &r| b.iter(|| fourier_bohr(&PointSet::Visible(&z2), &[0.5, 0.0], r).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, sieves, series, estimators);
criterion_main!(benches);
