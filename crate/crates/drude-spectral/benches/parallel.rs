//! Forward transform and synthesis with one worker against all workers.
//!
//! Run `cargo bench -p drude-spectral` for the rayon build and
//! `cargo bench -p drude-spectral --no-default-features` for the sequential
//! fallback; the `workers = 1` rows of both should agree closely.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use drude_spectral::fields::{make_source, Grid2, SourceKind};
use drude_spectral::par::{current_workers, with_workers};
use drude_spectral::quadrature::QuadConfig;
use drude_spectral::transform::{forward, synthesize, Identity, MeshSpec, SpectralMesh};
use drude_spectral::MediumParams;
use std::hint::black_box;

fn setup() -> (MediumParams, SpectralMesh, drude_spectral::fields::FieldState) {
    let p = MediumParams::non_critical();
    let grid = Grid2::square(3.0, 0.1).unwrap();
    let u = make_source(SourceKind::GaussianE, (0.4, -0.3), 0.7, 1.0, grid).unwrap();
    let qc = QuadConfig { nodes_per_interval: 32, lambda_max: Some(12.0), ..QuadConfig::default() };
    let mesh = SpectralMesh::build(&p, &qc, MeshSpec::for_grid(&grid, 0.0, 0.7)).unwrap();
    (p, mesh, u)
}

fn bench(c: &mut Criterion) {
    let (_, mesh, u) = setup();
    let amp = forward(&u, &mesh).unwrap();
    let mut counts = vec![1];
    if current_workers() > 1 {
        counts.push(current_workers());
    }
    let mut g = c.benchmark_group("transform");
    g.sample_size(10);
    for &w in &counts {
        g.bench_with_input(BenchmarkId::new("forward", w), &w, |b, &w| b.iter(|| with_workers(w, || black_box(forward(&u, &mesh).unwrap()))));
        g.bench_with_input(BenchmarkId::new("synthesize", w), &w, |b, &w| {
            b.iter(|| with_workers(w, || black_box(synthesize(&amp, &mesh, &Identity { plasmon: true }, u.grid, 0.0).unwrap())))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
