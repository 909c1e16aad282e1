use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sobolab_bench::{gaussian, heisenberg, plane};
use sobolab_core::norms::{besov_thermic_norm, ThermicGrid};
use sobolab_core::spectral::{decompose, heat_apply, SpectralMode};

fn heat(c: &mut Criterion) {
    let g = plane(256);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = gaussian(&g, 2.0);
    c.bench_function("heat_apply/euclidean2_n256_fourier", |b| b.iter(|| heat_apply(&rep, black_box(0.5), &f).unwrap()));

    let h = heisenberg(12);
    let dense = decompose(&h, SpectralMode::DenseEig).unwrap();
    let fh = gaussian(&h, 2.0);
    c.bench_function("heat_apply/heisenberg_n12_dense", |b| b.iter(|| heat_apply(&dense, black_box(0.5), &fh).unwrap()));
}

fn besov(c: &mut Criterion) {
    let g = plane(128);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = gaussian(&g, 2.0);
    let grid = ThermicGrid::default();
    c.bench_function("besov_norm/euclidean2_n128", |b| b.iter(|| besov_thermic_norm(&rep, &f, black_box(1.0), &grid).unwrap()));
}

fn decomposition(c: &mut Criterion) {
    let h = heisenberg(10);
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    group.bench_function("heisenberg_n10_dense", |b| b.iter(|| decompose(&h, SpectralMode::DenseEig).unwrap()));
    group.finish();
}

fn chebyshev(c: &mut Criterion) {
    let h = heisenberg(16);
    let rep = decompose(&h, SpectralMode::chebyshev()).unwrap();
    let f = gaussian(&h, 2.0);
    let mut group = c.benchmark_group("chebyshev");
    group.sample_size(20);
    group.bench_function("heat_apply/heisenberg_n16", |b| b.iter(|| heat_apply(&rep, black_box(1.0), &f).unwrap()));
    group.finish();
}

criterion_group!(benches, heat, besov, decomposition, chebyshev);
criterion_main!(benches);
