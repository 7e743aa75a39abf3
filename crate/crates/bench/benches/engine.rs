use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tateshift_bench::{params, ENGINE_PRIMES};
use tateshift_core::chart::{self, ChartSpec, Format, Window};
use tateshift_core::duality_shifts;
use tateshift_core::tate_engine::{self, Group};

fn run_to_einfty(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_to_einfty");
    for p in ENGINE_PRIMES {
        let pr = params(p);
        group.bench_with_input(BenchmarkId::new("F", p), &pr, |b, pr| {
            b.iter(|| tate_engine::run_to_einfty(Group::F, black_box(pr)).unwrap())
        });
    }
    group.finish();
}

fn shifts(c: &mut Criterion) {
    let mut group = c.benchmark_group("shifts_table");
    for p in ENGINE_PRIMES {
        let pr = params(p);
        group.bench_with_input(BenchmarkId::from_parameter(p), &pr, |b, pr| {
            b.iter(|| duality_shifts::shifts_table(black_box(pr)).unwrap())
        });
    }
    group.finish();
}

fn charts(c: &mut Criterion) {
    let pr = params(5);
    for format in [Format::Ascii, Format::Svg, Format::Json] {
        let spec = ChartSpec::new(Group::F, &pr, 2, Window::new((-400, 400), (-10, 10)), format);
        c.bench_function(&format!("chart_F5_{format:?}"), |b| {
            b.iter(|| chart::render(black_box(&spec)).unwrap())
        });
    }
}

criterion_group!(benches, run_to_einfty, shifts, charts);
criterion_main!(benches);
