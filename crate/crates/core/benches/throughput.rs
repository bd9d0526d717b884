use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ergo_core::altwalk::{AltState, EllipseGeom, Sign};
use ergo_core::analysis::{ensemble_average_test, reversibility_test, standard_observables, TestFamily};
use ergo_core::kernels1d::{cosine_conjugate, hat, sample_m1, AngleKernel};
use ergo_core::microstructure::{arc_wall, space_averaged_kernel};
use ergo_core::parallel::{Exec, Runner};
use std::f64::consts::PI;
use std::hint::black_box;

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn tracing(c: &mut Criterion) {
    let wall = arc_wall(1.0).unwrap();
    let mut group = c.benchmark_group("space_averaged_kernel");
    group.sample_size(10);
    for (name, exec) in EXECS {
        let runner = Runner::new(1).with_exec(exec);
        group.bench_function(BenchmarkId::new(name, 200_000), |b| {
            b.iter(|| space_averaged_kernel(&wall, black_box(1.0), 200_000, 64, &runner).unwrap())
        });
    }
    group.finish();
}

fn reversibility(c: &mut Criterion) {
    let q = cosine_conjugate(AngleKernel::rect_teeth(0.7).unwrap());
    let family = TestFamily::chords();
    let mut group = c.benchmark_group("reversibility_test");
    group.sample_size(10);
    for (name, exec) in EXECS {
        let runner = Runner::new(2).with_exec(exec);
        group.bench_function(BenchmarkId::new(name, 500_000), |b| {
            b.iter(|| reversibility_test(sample_m1, |x, r| q.sample(x, r), &family, 500_000, 3.0, &runner).unwrap())
        });
    }
    group.finish();
}

fn ensemble(c: &mut Criterion) {
    let g = EllipseGeom::new(PI * (5f64.sqrt() - 1.0) / 2.0).unwrap();
    let q = hat(cosine_conjugate(AngleKernel::circ_arc(0.8).unwrap()));
    let obs = standard_observables(&g);
    let start = AltState::new(0.1, 0.2, Sign::Plus);
    let mut group = c.benchmark_group("ensemble_average");
    group.sample_size(10);
    for (name, exec) in EXECS {
        let runner = Runner::new(3).with_exec(exec);
        group.bench_function(BenchmarkId::new(name, "20000x50"), |b| {
            b.iter(|| ensemble_average_test(&g, &q, start, 20_000, 50, &obs, 3.0, &runner).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, tracing, reversibility, ensemble);
criterion_main!(benches);
