use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use liftable_bench::{derlog_input, germ};
use liftable_core::document::catalog;
use liftable_core::document::run::{run_document, RunConfig};
use liftable_core::document::GermDocument;
use liftable_core::germs::InvariantMode;
use liftable_core::ks_maps::{KsAnalyzer, KsOptions};
use liftable_core::lift::{complete_generators, lift_from_image, CompletionConfig};
use liftable_core::polymodule::syzygy_basis;

fn generator_counts(c: &mut Criterion) {
    let mut g = c.benchmark_group("min_generators");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for name in ["cusp-pair", "whitney-psi3", "phik-3"] {
        let f = germ(name);
        g.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| {
            b.iter(|| KsAnalyzer::new(f, KsOptions::default()).unwrap().min_generators(InvariantMode::BothAgree, 0).unwrap())
        });
    }
    g.finish();
}

/// The closed-form count alone, on the largest catalog germ.
fn formula_count(c: &mut Criterion) {
    let f = germ("rrw-4to5");
    let mut g = c.benchmark_group("kernel_formula");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    g.bench_function("rrw-4to5", |b| b.iter(|| KsAnalyzer::new(&f, KsOptions::default()).unwrap().kernel_formula(1, InvariantMode::Formula).unwrap()));
    g.finish();
}

fn constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("construct");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    let psi3 = germ("whitney-psi3");
    g.bench_function("kernel/whitney-psi3", |b| b.iter(|| complete_generators(&psi3, CompletionConfig::default()).unwrap()));
    let curve = germ("ex35-c");
    g.bench_function("image/ex35-c", |b| b.iter(|| lift_from_image(&curve, 12).unwrap()));
    let s68 = catalog::load("s68-k2-plus").unwrap();
    g.bench_function("unfolding/s68-k2-plus", |b| b.iter(|| run_document(&s68, RunConfig::default()).unwrap()));
    g.finish();
}

fn syzygies(c: &mut Criterion) {
    let mut g = c.benchmark_group("syzygy_basis");
    for (a, b) in [(2, 3), (3, 4), (4, 7)] {
        let input = derlog_input(a, b);
        g.bench_with_input(BenchmarkId::from_parameter(format!("y{a}-x{b}")), &input, |bch, v| bch.iter(|| syzygy_basis(v).unwrap()));
    }
    g.finish();
}

fn parsing(c: &mut Criterion) {
    let sources: Vec<&str> = catalog::names().filter_map(catalog::source).collect();
    c.bench_function("parse_catalog", |b| b.iter(|| sources.iter().map(|s| GermDocument::parse(s).unwrap()).collect::<Vec<_>>()));
}

criterion_group!(benches, generator_counts, formula_count, constructions, syzygies, parsing);
criterion_main!(benches);
