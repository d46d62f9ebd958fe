use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qladder::dynamics::survival_series_with;
use qladder::spectral::solve_spectrum_with;
use qladder::{Mode, ModelParams, SolveOptions};

const MODES: [(&str, Mode); 2] = [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)];

fn spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum");
    for (label, a, half) in [("certified", 5.0, 2000.0), ("narrow", 0.1, 500.0)] {
        let p = ModelParams::new(0.3, 1.0, a, 0.2).unwrap();
        for (name, mode) in MODES {
            let opts = SolveOptions { mode, ..SolveOptions::default() };
            g.bench_with_input(BenchmarkId::new(name, label), &p, |b, p| {
                b.iter(|| solve_spectrum_with(black_box(p), (-half, half), &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn survival(c: &mut Criterion) {
    let p = ModelParams::new(0.3, 1.0, 5.0, 0.2).unwrap();
    let s = solve_spectrum_with(&p, (-2000.0, 2000.0), &SolveOptions::default()).unwrap();
    let mut g = c.benchmark_group("survival");
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| survival_series_with(black_box(&s), 20.0, 2000, false, mode).unwrap()));
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = spectrum, survival
}
criterion_main!(benches);
