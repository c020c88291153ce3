//! Second moment `⟨y²⟩` against time for classical and quantum tracks, with a
//! velocity inversion at `t_r`.

use anyhow::Result;
use catreverse_core::evolution::readout_density;
use catreverse_core::imageio::recovery_overlap;
use catreverse_core::observables::{fit_diffusion, DIFFUSION_COEFFICIENT};
use catreverse_core::{
    run_iterations, Ensemble, InversionImprecision, MomentSeries, QuantumState, Reference, RegisterLayout, RunOptions,
    StepCircuits, YDistribution,
};

use super::{classical_track_name, initial_points, noise_model, Csv, Report, Sink};
use crate::config::{RunConfig, Track};

fn summarize(rc: &RunConfig, track: &str, series: &MomentSeries, report: &mut Report) -> Result<()> {
    if rc.fit_t_max <= rc.t_r.min(rc.t_total) {
        report.value(format!("{track}.D_fit"), fit_diffusion(series, rc.fit_t_min, rc.fit_t_max)?);
    }
    if rc.t_total > rc.t_r {
        if let Some(t) = series.argmin_after(rc.t_r) {
            report.value(format!("{track}.argmin_offset"), (t - rc.t_r) as f64);
        }
    }
    Ok(())
}

pub(super) fn run(rc: &RunConfig, sink: &mut Sink, report: &mut Report) -> Result<()> {
    let cfg = rc.phase_space()?;
    let l = cfg.torus_length();
    let (img, pts) = initial_points(rc, cfg)?;
    let mut csv = Csv::new(&["t", "track", "mean_y", "mean_y2"]);

    if rc.has_track(Track::Classical) {
        for &eps in &rc.epsilon_classical {
            let track = classical_track_name(eps);
            let mut ens = Ensemble::in_cells(cfg, &pts, rc.orbit_count, rc.seed)?;
            let mut series = MomentSeries::new();
            for t in 0..=rc.t_total {
                if t > 0 {
                    ens.evolve(1, l);
                }
                let (m, m2) = ens.moments();
                series.push(t, m, m2)?;
                csv.row(&[&t, &track, &m, &m2]);
                if t == rc.t_r {
                    ens.invert_velocities(l, InversionImprecision::new(eps)?);
                }
            }
            summarize(rc, &track, &series, report)?;
            report.value(format!("{track}.overlap"), recovery_overlap(&img, &ens.density(cfg, true))?);
        }
    }

    let noisy = rc.has_track(Track::QuantumNoisy);
    let exact = rc.has_track(Track::QuantumExact);
    if noisy || exact {
        let circuits = StepCircuits::new(cfg)?;
        let mut state = QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts)?;
        let mut noise = if noisy { Some(noise_model(rc, rc.epsilon_quantum, 0, 0)?) } else { None };
        let opts = RunOptions {
            invert_at: Some(rc.t_r),
            reference: if noisy && exact { Reference::Permutation } else { Reference::None },
            permute_exact: exact && !noisy && rc.permute_exact,
            ..RunOptions::new(rc.t_total)
        };
        let mut exact_rows = Vec::new();
        let mut final_density = None;
        let records = run_iterations(&mut state, &circuits, &opts, noise.as_mut(), |v| {
            if let Some(r) = v.reference {
                let y = YDistribution::new(cfg, readout_density(r, v.inverted).y_marginal()).expect("normalized");
                exact_rows.push((v.t, y.mean(), y.second_moment()));
            }
            if v.t == rc.t_total {
                final_density = Some(v.density());
            }
        })?;
        let main_track = if noisy { "quantum_noisy" } else { "quantum_exact" };
        let mut series = MomentSeries::new();
        for r in &records {
            series.push(r.t, r.mean_y, r.mean_y2)?;
            csv.row(&[&r.t, &main_track, &r.mean_y, &r.mean_y2]);
        }
        summarize(rc, main_track, &series, report)?;
        if let Some(d) = final_density {
            report.value(format!("{main_track}.overlap"), recovery_overlap(&img, &d)?);
        }
        if let Some(f) = records.last().and_then(|r| r.fidelity) {
            report.value("quantum_noisy.fidelity_final", f);
        }
        if !exact_rows.is_empty() {
            let mut exact_series = MomentSeries::new();
            for &(t, m, m2) in &exact_rows {
                exact_series.push(t, m, m2)?;
                csv.row(&[&t, &"quantum_exact", &m, &m2]);
            }
            summarize(rc, "quantum_exact", &exact_series, report)?;
        }
        if noisy && rc.t_r > 0 && rc.t_total >= 2 * rc.t_r {
            let (y0, y_back) = (records[0].mean_y2, records[2 * rc.t_r].mean_y2);
            report.value("quantum_noisy.return_ratio", y_back / y0);
            report.check(
                "quantum track returns within 2x the initial <y^2>",
                y_back <= 2.0 * y0,
                format!("<y^2>(0) = {y0}, <y^2>(2 t_r) = {y_back}"),
            );
        }
    }

    for t in 0..=rc.t_total {
        csv.row(&[&t, &"theory", &0.0, &(DIFFUSION_COEFFICIENT * t as f64)]);
    }
    sink.write("moments.csv", csv.finish())
}
