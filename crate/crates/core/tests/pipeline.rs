use catreverse_core::imageio::{density_to_image, image_to_points, recovery_overlap};
use catreverse_core::observables::{distribution_distance, escape_time, fidelity_timescale};
use catreverse_core::{
    generate_demon_image, resource_estimate, run_iterations, BinaryImage, NoiseModel, PhaseSpaceConfig, QuantumState,
    Reference, Region, RegisterLayout, RunOptions, StepCircuits,
};

#[test]
fn pbm_golden_bytes() {
    let mut img = BinaryImage::new(8).unwrap();
    img.set(0, 0, true);
    img.set(0, 7, true);
    img.set(7, 3, true);
    let binary = img.to_pbm_binary();
    assert_eq!(binary, b"P4\n8 8\n\x81\0\0\0\0\0\0\x10".to_vec());
    let ascii = String::from_utf8(img.to_pbm_ascii()).unwrap();
    assert!(ascii.starts_with("P1\n8 8\n"));
    assert_eq!(BinaryImage::from_pbm(ascii.as_bytes()).unwrap(), img);
    assert_eq!(BinaryImage::from_pbm(&binary).unwrap(), img);
    let commented = b"P1\n# a comment\n2 2\n1 0\n0 1\n";
    let small = BinaryImage::from_pbm(commented).unwrap();
    assert!(small.get(0, 0) && small.get(1, 1) && !small.get(0, 1));
}

#[test]
fn noise_free_round_trip_through_public_api() {
    let cfg = PhaseSpaceConfig::new(4, 6).unwrap();
    let img = generate_demon_image(16).unwrap();
    let pts = image_to_points(&img, cfg).unwrap();
    let circuits = StepCircuits::new(cfg).unwrap();
    let mut state = QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts).unwrap();
    let opts = RunOptions { invert_at: Some(5), reference: Reference::Circuit, ..RunOptions::new(10) };
    let mut first = None;
    let mut last = None;
    let records = run_iterations(&mut state, &circuits, &opts, None, |v| {
        let d = v.density();
        if v.t == 0 {
            first = Some(d);
        } else if v.t == 10 {
            last = Some(d);
        }
    })
    .unwrap();
    assert_eq!(records.len(), 11);
    let (first, last) = (first.unwrap(), last.unwrap());
    assert!((recovery_overlap(&img, &last).unwrap() - 1.0).abs() < 1e-12);
    let y = |d: &catreverse_core::PhaseSpaceDensity| catreverse_core::YDistribution::new(cfg, d.y_marginal()).unwrap();
    assert!(distribution_distance(&y(&first), &y(&last)).unwrap() < 1e-12);
    assert!((records[10].mean_y2 - records[0].mean_y2).abs() < 1e-12);
    assert!(records[5].mean_y2 > 10.0 * records[0].mean_y2);

    let pgm = density_to_image(&last, Region::central(cfg), 1.0).unwrap().to_pgm_binary();
    assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
}

#[test]
fn noisy_run_loses_fidelity() {
    let cfg = PhaseSpaceConfig::new(3, 5).unwrap();
    let circuits = StepCircuits::new(cfg).unwrap();
    let pts: Vec<_> = (0..cfg.n()).map(|i| catreverse_core::LatticePoint::new(i, cfg.ln() / 2)).collect();
    let initial = QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts).unwrap();
    let opts = RunOptions { reference: Reference::Permutation, ..RunOptions::new(30) };
    let mut mean = vec![0.0; 31];
    for seed in 0..8 {
        let mut s = initial.clone();
        let mut noise = NoiseModel::new(0.1, seed).unwrap();
        let records = run_iterations(&mut s, &circuits, &opts, Some(&mut noise), |_| {}).unwrap();
        for (m, r) in mean.iter_mut().zip(&records) {
            *m += r.fidelity.unwrap() / 8.0;
        }
    }
    assert!((mean[0] - 1.0).abs() < 1e-12);
    assert!(mean[10] < mean[1] && mean[30] < mean[10]);
}

#[test]
fn headline_numbers() {
    let avogadro = resource_estimate(6.022e23, 8).unwrap();
    assert_eq!((avogadro.n_q, avogadro.total_qubits), (40, 125));
    assert_eq!(RegisterLayout::new(PhaseSpaceConfig::new(7, 10).unwrap()).total_qubits(), 26);
    let t_e = escape_time(1e-8).unwrap();
    assert!((t_e - 19.14).abs() < 0.05, "{t_e}");
    let t_f = fidelity_timescale(40, 0.01, 0.5).unwrap();
    assert!((t_f - 125.0).abs() < 1e-9, "{t_f}");
    assert!((fidelity_timescale(40, 0.02, 0.5).unwrap() * 4.0 - t_f).abs() < 1e-9);
}
