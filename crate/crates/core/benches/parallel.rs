use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use friedrichs_lab::geometry::{builtin, unit_square};
use friedrichs_lab::hardy::{best_constant_lower_with, HardyProblem, OptimizeOptions};
use friedrichs_lab::harness::{corpus_run, CorpusConfig};
use friedrichs_lab::potential::{check_pointwise, parse_trial, riesz_potential, PointwiseConfig, PointwiseOrder};
use friedrichs_lab::Execution;
use std::hint::black_box;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn riesz(c: &mut Criterion) {
    let d = builtin("disk512").unwrap();
    let sample = d.sample_interior(1.0 / 48.0).unwrap();
    let density: Vec<f64> = sample.nodes.iter().map(|x| 1.0 + x[0] * x[0]).collect();
    let eval = sample.nodes.clone();
    let mut g = c.benchmark_group("riesz_potential");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(name, sample.len()), |b| {
            b.iter(|| riesz_potential(black_box(&sample), &density, 1.0, &eval, exec).unwrap())
        });
    }
    g.finish();
}

fn pointwise(c: &mut Criterion) {
    let d = unit_square();
    let u = parse_trial("bump:3,0.3,0.6").unwrap();
    let mut g = c.benchmark_group("check_pointwise");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = PointwiseConfig { exec, ..PointwiseConfig::new(1.0 / 64.0, 128) };
        g.bench_function(name, |b| b.iter(|| check_pointwise(PointwiseOrder::First, black_box(&u), &d, &cfg).unwrap()));
    }
    g.finish();
}

fn hardy(c: &mut Criterion) {
    let pr = HardyProblem::classical(2.0, 1.0);
    let mut g = c.benchmark_group("hardy_best_constant");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = OptimizeOptions { restarts: 4, seed: 0, sweeps: 1, exec };
        g.bench_function(name, |b| b.iter(|| best_constant_lower_with(black_box(&pr), 512, &opts, None).unwrap()));
    }
    g.finish();
}

fn corpus(c: &mut Criterion) {
    let mut g = c.benchmark_group("corpus_run");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = CorpusConfig { cells: 24, exec, ..CorpusConfig::default() };
        g.bench_function(name, |b| b.iter(|| corpus_run(black_box(&cfg)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, riesz, pointwise, hardy, corpus);
criterion_main!(benches);
