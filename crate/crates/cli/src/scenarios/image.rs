//! Phase-space snapshots of the demon image: initial cell, whole phase space at
//! `t_r`, and the two central cells at `2·t_r`, for a classical track (one
//! imprecise inversion) and a noisy quantum track.

use anyhow::Result;
use catreverse_core::imageio::{density_to_image, recovery_overlap};
use catreverse_core::observables::distribution_distance;
use catreverse_core::{
    run_iterations, Ensemble, InversionImprecision, PhaseSpaceConfig, PhaseSpaceDensity, QuantumState, Reference, Region,
    RegisterLayout, RunOptions, StepCircuits, YDistribution,
};

use super::{initial_points, noise_model, Csv, Report, Sink};
use crate::config::RunConfig;

fn two_central_cells(cfg: PhaseSpaceConfig) -> Region {
    let (n, ln) = (cfg.n(), cfg.ln());
    Region { i0: 0, i1: n, j0: ln / 2 - n, j1: ln / 2 + n }
}

fn frames(rc: &RunConfig, sink: &mut Sink, prefix: &str, snaps: &[PhaseSpaceDensity; 3]) -> Result<()> {
    let cfg = snaps[0].config();
    let regions = [Region::central(cfg), Region::full(cfg), two_central_cells(cfg)];
    for ((density, region), suffix) in snaps.iter().zip(regions).zip(["initial", "tr", "2tr"]) {
        let img = density_to_image(density, region, rc.gamma)?;
        sink.write(&format!("{prefix}_{suffix}.pgm"), img.to_pgm_binary())?;
    }
    Ok(())
}

pub(super) fn run(rc: &RunConfig, sink: &mut Sink, report: &mut Report) -> Result<()> {
    let cfg = rc.phase_space()?;
    let l = cfg.torus_length();
    let (img, pts) = initial_points(rc, cfg)?;
    sink.write("initial.pbm", img.to_pbm_binary())?;
    let t_r = rc.t_r;
    let mut summary = Csv::new(&["track", "epsilon", "recovery_overlap", "fidelity"]);

    let eps_c = rc.epsilon_classical.first().copied().unwrap_or(0.0);
    let mut ens = Ensemble::in_cells(cfg, &pts, rc.orbit_count, rc.seed)?;
    let start = ens.density(cfg, false);
    ens.evolve(t_r, l);
    let at_tr = ens.density(cfg, false);
    ens.invert_velocities(l, InversionImprecision::new(eps_c)?);
    ens.evolve(t_r, l);
    let back = ens.density(cfg, true);
    let overlap_c = recovery_overlap(&img, &back)?;
    frames(rc, sink, "classical", &[start, at_tr, back])?;
    summary.row(&[&"classical", &eps_c, &overlap_c, &""]);
    report.value("classical.overlap", overlap_c);

    let circuits = StepCircuits::new(cfg)?;
    let mut state = QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts)?;
    let mut noise = noise_model(rc, rc.epsilon_quantum, 2, 0)?;
    let opts = RunOptions { invert_at: Some(t_r), reference: Reference::Permutation, ..RunOptions::new(2 * t_r) };
    let mut snaps: Vec<PhaseSpaceDensity> = Vec::new();
    let records = run_iterations(&mut state, &circuits, &opts, Some(&mut noise), |v| {
        if v.t == 0 || v.t == t_r || v.t == 2 * t_r {
            snaps.push(v.density());
        }
    })?;
    // t_r = 0 visits a single step that is both the start and the return
    while snaps.len() < 3 {
        snaps.push(snaps[snaps.len() - 1].clone());
    }
    let fidelity = records.last().and_then(|r| r.fidelity).unwrap_or(1.0);
    let overlap_q = recovery_overlap(&img, &snaps[2])?;
    let marginal = |d: &PhaseSpaceDensity| YDistribution::new(cfg, d.y_marginal());
    let tv_return = distribution_distance(&marginal(&snaps[0])?, &marginal(&snaps[2])?)?;
    report.value("quantum.return_tv", tv_return);
    let snaps: [PhaseSpaceDensity; 3] = snaps.try_into().expect("three snapshots");
    frames(rc, sink, "quantum", &snaps)?;
    summary.row(&[&"quantum", &rc.epsilon_quantum, &overlap_q, &fidelity]);
    report.value("quantum.overlap", overlap_q);
    report.value("quantum.fidelity", fidelity);
    if overlap_c > 0.0 {
        report.value("overlap_ratio", overlap_q / overlap_c);
    }
    if rc.epsilon_quantum == 0.0 {
        let exact = (overlap_q - 1.0).abs() <= 1e-9 && tv_return <= 1e-9;
        report.check("noise-free quantum run recovers the image", exact, format!("overlap = {overlap_q}, TV = {tv_return}"));
    }
    sink.write("summary.csv", summary.finish())
}
