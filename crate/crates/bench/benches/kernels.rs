use std::hint::black_box;

use catreverse_core::imageio::image_to_points;
use catreverse_core::{
    generate_demon_image, Ensemble, Gate, NoiseModel, PhaseSpaceConfig, QuantumState, RegisterLayout, StepCircuits,
};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn demon_state(cfg: PhaseSpaceConfig) -> QuantumState {
    let img = generate_demon_image(cfg.n()).unwrap();
    let pts = image_to_points(&img, cfg).unwrap();
    QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts).unwrap()
}

fn gates(c: &mut Criterion) {
    let cfg = PhaseSpaceConfig::new(5, 8).unwrap();
    let mut state = demon_state(cfg);
    let mut group = c.benchmark_group("gate_2^20");
    group.sample_size(20);
    group.bench_function("not", |b| b.iter(|| state.apply(black_box(&Gate::not(3))).unwrap()));
    group.bench_function("cnot", |b| b.iter(|| state.apply(black_box(&Gate::cnot(2, 9))).unwrap()));
    group.bench_function("toffoli", |b| b.iter(|| state.apply(black_box(&Gate::toffoli(1, 7, 12))).unwrap()));
    let mut noise = NoiseModel::new(0.01, 1).unwrap();
    group.bench_function("toffoli_noisy", |b| {
        b.iter(|| state.apply_noisy(black_box(&Gate::toffoli(1, 7, 12)), &mut noise).unwrap())
    });
    group.finish();
}

fn map_step(c: &mut Criterion) {
    let cfg = PhaseSpaceConfig::new(5, 8).unwrap();
    let circuits = StepCircuits::new(cfg).unwrap();
    let state = demon_state(cfg);
    let mut group = c.benchmark_group("map_step_2^20");
    group.sample_size(10);
    group.bench_function("circuit", |b| {
        b.iter_batched(|| state.clone(), |mut s| circuits.map.apply(&mut s).unwrap(), BatchSize::LargeInput)
    });
    group.bench_function("permutation", |b| {
        b.iter_batched(|| state.clone(), |mut s| s.permute_lattice(|p| cfg.forward(p)).unwrap(), BatchSize::LargeInput)
    });
    group.finish();
}

fn ensemble(c: &mut Criterion) {
    let cfg = PhaseSpaceConfig::new(5, 8).unwrap();
    let img = generate_demon_image(cfg.n()).unwrap();
    let pts = image_to_points(&img, cfg).unwrap();
    let ens = Ensemble::in_cells(cfg, &pts, 100_000, 1).unwrap();
    let l = cfg.torus_length();
    c.bench_function("ensemble_1e5_10_steps", |b| {
        b.iter_batched(|| ens.clone(), |mut e| e.evolve(10, l), BatchSize::LargeInput)
    });
}

criterion_group!(benches, gates, map_step, ensemble);
criterion_main!(benches);
