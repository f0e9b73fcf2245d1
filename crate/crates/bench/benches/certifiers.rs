use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlqm_core::hilbert::random_hermitian;
use nlqm_core::nosignal::{affinity_scan, gleason_certify, GleasonConfig};
use nlqm_core::observables::{polarization_reconstruct, power, quadratic, CountingObservable};
use nlqm_core::PureState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn affinity(c: &mut Criterion) {
    let f = power(PureState::basis(2, 0).unwrap().projector(), 2).unwrap();
    let mut g = c.benchmark_group("affinity_scan");
    g.sample_size(20);
    for workers in [1, 4] {
        g.bench_with_input(BenchmarkId::new("1000 chords, workers", workers), &workers, |b, &w| {
            b.iter(|| affinity_scan(&f, 1000, 1e-9, 0, w).unwrap())
        });
    }
    g.finish();
}

fn gleason(c: &mut Criterion) {
    let mut g = c.benchmark_group("gleason_certify");
    g.sample_size(10);
    for d in [3, 4, 5] {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let f = quadratic(random_hermitian(d, 0.0, 1.0, &mut rng).unwrap()).unwrap();
        let counting = CountingObservable::new(f, &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| gleason_certify(&counting, &GleasonConfig::default(), 0, 4).unwrap())
        });
    }
    g.finish();
}

fn polarization(c: &mut Criterion) {
    let mut g = c.benchmark_group("polarization_reconstruct");
    for d in [2, 4, 6] {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let f = quadratic(random_hermitian(d, -1.0, 1.0, &mut rng).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| polarization_reconstruct(&f, d).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, affinity, gleason, polarization);
criterion_main!(benches);
