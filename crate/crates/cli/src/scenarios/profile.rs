//! `y` distributions at selected times next to the Fokker-Planck solution.

use anyhow::{bail, Result};
use catreverse_core::observables::{distribution_distance, fokker_planck_distribution, DIFFUSION_COEFFICIENT};
use catreverse_core::{run_iterations, Ensemble, QuantumState, RegisterLayout, RunOptions, StepCircuits, YDistribution};

use super::{initial_points, noise_model, Csv, Report, Sink};
use crate::config::{RunConfig, Track};

pub(super) fn run(rc: &RunConfig, sink: &mut Sink, report: &mut Report) -> Result<()> {
    let cfg = rc.phase_space()?;
    let (_, pts) = initial_points(rc, cfg)?;
    let mut times = rc.profile_times.clone();
    times.sort_unstable();
    times.dedup();
    let Some(&t_max) = times.last() else { bail!("profile_times is empty") };

    let layout = RegisterLayout::new(cfg);
    let initial = QuantumState::uniform_superposition(layout, &pts)?;
    let y0 = initial.marginal_y().mean();
    report.value("initial.mean_y", y0);

    let mut tracks: Vec<(String, Vec<(usize, YDistribution)>)> = Vec::new();
    if rc.has_track(Track::Classical) {
        let mut ens = Ensemble::in_cells(cfg, &pts, rc.orbit_count, rc.seed)?;
        let mut snaps = Vec::new();
        for t in 0..=t_max {
            if t > 0 {
                ens.evolve(1, cfg.torus_length());
            }
            if times.contains(&t) {
                snaps.push((t, YDistribution::new(cfg, ens.density(cfg, false).y_marginal())?));
            }
        }
        tracks.push(("classical".into(), snaps));
    }
    let circuits = StepCircuits::new(cfg)?;
    for (track, noisy) in [(Track::QuantumExact, false), (Track::QuantumNoisy, true)] {
        if !rc.has_track(track) {
            continue;
        }
        let mut state = initial.clone();
        let mut noise = if noisy { Some(noise_model(rc, rc.epsilon_quantum, 1, 0)?) } else { None };
        let opts = RunOptions { permute_exact: !noisy && rc.permute_exact, ..RunOptions::new(t_max) };
        let mut snaps = Vec::new();
        run_iterations(&mut state, &circuits, &opts, noise.as_mut(), |v| {
            if times.contains(&v.t) {
                snaps.push((v.t, v.state.marginal_y()));
            }
        })?;
        tracks.push((if noisy { "quantum_noisy" } else { "quantum_exact" }.into(), snaps));
    }

    let mut csv = Csv::new(&["t", "track", "j", "y", "w"]);
    for &t in &times {
        let reference = fokker_planck_distribution(cfg, t as f64, y0, DIFFUSION_COEFFICIENT)?;
        let total: f64 = reference.probabilities().iter().sum();
        report.check(format!("fokker_planck reference at t={t} sums to 1"), (total - 1.0).abs() <= 1e-6, format!("sum = {total}"));
        let mut rows = vec![("fokker_planck".to_string(), reference.clone())];
        for (name, snaps) in &tracks {
            let (_, dist) = snaps.iter().find(|(s, _)| *s == t).expect("snapshot taken");
            report.value(format!("tv.{name}.t{t}"), distribution_distance(dist, &reference)?);
            rows.push((name.clone(), dist.clone()));
        }
        let find = |n: &str| tracks.iter().find(|(name, _)| name == n).and_then(|(_, s)| s.iter().find(|(s, _)| *s == t));
        if let (Some((_, a)), Some((_, b))) = (find("classical"), find("quantum_exact")) {
            report.value(format!("tv.classical_vs_quantum_exact.t{t}"), distribution_distance(a, b)?);
        }
        for (name, dist) in rows {
            for (j, w) in dist.probabilities().iter().enumerate() {
                csv.row(&[&t, &name, &j, &cfg.y_of(j), w]);
            }
        }
    }
    sink.write("profile.csv", csv.finish())
}
