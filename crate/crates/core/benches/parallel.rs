use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use strrep::exec::Execution;
use strrep::gadgets::{gadget_k8, sausage};
use strrep::noodleforce::noodle_force_with;
use strrep::representation::{crossing_matrix_with, validate_proper_with};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn crossing_counts(c: &mut Criterion) {
    let r = gadget_k8(5).unwrap();
    let mut g = c.benchmark_group("crossing_matrix/K8(5)");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| crossing_matrix_with(black_box(&r), exec).unwrap())
        });
    }
    g.finish();
}

fn properness(c: &mut Criterion) {
    let r = gadget_k8(3).unwrap();
    let mut g = c.benchmark_group("validate_proper/K8(3)");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| validate_proper_with(black_box(&r), exec))
        });
    }
    g.finish();
}

fn forcing(c: &mut Criterion) {
    let r = sausage(2).unwrap();
    let mut g = c.benchmark_group("noodle_force/sausage(2)");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| noodle_force_with(black_box(&r), 1, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, crossing_counts, properness, forcing);
criterion_main!(benches);
