use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sgrf_bench::{coefficients, grid, spectrum, SEED};
use sgrf_core::heat::{evolve, ModeState, QWienerSpec, TimeGrid};
use sgrf_core::specfun::{assoc_legendre_table, gauss_legendre};
use sgrf_core::{draw_coefficients, BandLimit, RngStream, SynthesisPlan};

fn legendre(c: &mut Criterion) {
    let mut g = c.benchmark_group("legendre_table");
    for kappa in [32, 128, 512] {
        g.throughput(Throughput::Elements(BandLimit(kappa).n_packed() as u64));
        g.bench_with_input(BenchmarkId::from_parameter(kappa), &kappa, |b, &k| {
            b.iter(|| assoc_legendre_table(k, std::hint::black_box(0.7)))
        });
    }
    g.finish();

    c.bench_function("gauss_legendre_257", |b| b.iter(|| gauss_legendre(std::hint::black_box(257))));
}

fn sampling(c: &mut Criterion) {
    let rng = RngStream::new(SEED);
    let mut g = c.benchmark_group("draw_coefficients");
    for kappa in [64, 128] {
        g.bench_with_input(BenchmarkId::from_parameter(kappa), &kappa, |b, &k| {
            let mut i = 0;
            b.iter(|| {
                i += 1;
                draw_coefficients(BandLimit(k), &rng, i)
            })
        });
    }
    g.finish();
}

fn synthesis(c: &mut Criterion) {
    let grid = grid(64, 128);
    let mut g = c.benchmark_group("synthesis_64x128");
    g.sample_size(20);
    for kappa in [32, 64, 128] {
        let plan = SynthesisPlan::new(grid.clone(), BandLimit(kappa));
        let coeffs = coefficients(kappa, 3.0);
        g.bench_with_input(BenchmarkId::new("serial", kappa), &kappa, |b, &k| {
            b.iter(|| plan.synthesize_band(&coeffs, 0..=k))
        });
        g.bench_with_input(BenchmarkId::new("rayon", kappa), &kappa, |b, &k| {
            b.iter(|| plan.par_synthesize_band(&coeffs, 0..=k))
        });
    }
    g.bench_function("plan_128", |b| b.iter(|| SynthesisPlan::new(grid.clone(), BandLimit(128))));
    g.finish();
}

fn heat(c: &mut Criterion) {
    let qspec = QWienerSpec::new(spectrum(3.0));
    let rng = RngStream::new(SEED);
    let times = TimeGrid::uniform(1.0, 10).unwrap();
    let start = ModeState::zeros(BandLimit(128));
    c.bench_function("heat_evolve_128_x10", |b| {
        b.iter(|| evolve(&start, &times, &qspec, &rng, 0).unwrap())
    });
}

criterion_group!(benches, legendre, sampling, synthesis, heat);
criterion_main!(benches);
