use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phaselab::intelligent::make_expminus_intelligent;
use phaselab::phase::wrapped_phase_variance;
use phaselab::relations::{evaluate_phase_number_relations, evaluate_relations};
use phaselab::specfun::{bessel_i, hyp1f1};
use phaselab::variational::{cylinder_branch_analysis, objective_gradient, BranchKind, Mode};
use phaselab::{Complex64, PhaseFunction};
use phaselab_bench::random_states;

fn relations(c: &mut Criterion) {
    let mut g = c.benchmark_group("relations");
    for n in [16, 64] {
        let s = &random_states(n, 1)[0];
        g.bench_with_input(BenchmarkId::new("exp-", n), s, |b, s| b.iter(|| evaluate_relations(black_box(s), PhaseFunction::ExpMinus)));
        g.bench_with_input(BenchmarkId::new("wrapped-variance", n), s, |b, s| b.iter(|| wrapped_phase_variance(black_box(s))));
        g.bench_with_input(BenchmarkId::new("phase-number", n), s, |b, s| b.iter(|| evaluate_phase_number_relations(black_box(s))));
    }
    g.finish();
}

fn gradients(c: &mut Criterion) {
    let s = &random_states(32, 1)[0];
    let mut g = c.benchmark_group("gradient");
    for f1 in [PhaseFunction::ExpMinus, PhaseFunction::WrappedPhi] {
        for mode in [Mode::Product, Mode::Sum] {
            g.bench_function(format!("{f1}/{mode}"), |b| b.iter(|| objective_gradient(black_box(s), f1, mode)));
        }
    }
    g.finish();
}

fn special_functions(c: &mut Criterion) {
    c.bench_function("bessel_i/2/2.0", |b| b.iter(|| bessel_i(2, black_box(2.0))));
    c.bench_function("hyp1f1/0.3,0.5,-4.0", |b| b.iter(|| hyp1f1(0.3, 0.5, black_box(-4.0))));
    c.bench_function("intelligent/n=0,λ=1+i", |b| {
        b.iter(|| make_expminus_intelligent(0, black_box(Complex64::new(1.0, 1.0)), 64))
    });
    c.bench_function("cylinder/product", |b| {
        b.iter(|| cylinder_branch_analysis(black_box(1.5), 0.5, 2.0, BranchKind::Product))
    });
}

criterion_group!(benches, relations, gradients, special_functions);
criterion_main!(benches);
