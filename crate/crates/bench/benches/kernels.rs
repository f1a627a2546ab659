use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use lr_horizon::bounds::{BoundPrefactor, ExactSumBound};
use lr_horizon::dynamics::{evolve, AmplitudeState};
use lr_horizon::kernels::{fourier_spectrum, reproducibility_check};
use lr_horizon::signaling::{exact_sum_signaling_time, SignalingSpec};
use lr_horizon_bench::{ring_with_model, transfer_schedule, RING_SIZES};

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier_spectrum");
    for n in RING_SIZES {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| fourier_spectrum(black_box(n), 0.5).unwrap())
        });
    }
    group.finish();
}

fn exact_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_sum");
    group.sample_size(20);
    for n in RING_SIZES {
        let bound = ExactSumBound::new(n, 0.5).unwrap();
        let spec = SignalingSpec::default();
        group.bench_with_input(BenchmarkId::new("signaling_time", n), &n, |b, _| {
            b.iter(|| exact_sum_signaling_time(&bound, 1, &spec).unwrap())
        });
        let t = 1.0 / bound.lambda();
        group.bench_with_input(BenchmarkId::new("profile", n), &n, |b, _| {
            b.iter(|| bound.profile(black_box(t), &BoundPrefactor::default()).unwrap())
        });
    }
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve");
    group.sample_size(10);
    for n in [64usize, 256, 512] {
        let schedule = transfer_schedule(n);
        let psi = AmplitudeState::basis(n, schedule.source).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| evolve(&schedule.hamiltonian, &psi).unwrap())
        });
    }
    group.finish();
}

fn reproducibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("reproducibility_check");
    group.sample_size(10);
    for n in [64usize, 256, 512] {
        let (ring, model) = ring_with_model(n, 0.5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| reproducibility_check(&ring, &model).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum, exact_sum, evolution, reproducibility);
criterion_main!(benches);
