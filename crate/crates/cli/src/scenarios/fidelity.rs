//! Fidelity decay for several register sizes and noise amplitudes, and the
//! collapse of all curves onto one function of `x = ε²·n_q·t`.

use std::fmt::Write as _;

use anyhow::Result;
use catreverse_core::observables::fit_collapse_constant;
use catreverse_core::{
    run_iterations, FidelitySeries, PhaseSpaceConfig, QuantumState, Reference, RegisterLayout, RunOptions, StepCircuits,
};

use super::{initial_points, noise_model, Csv, Report, Sink};
use crate::config::RunConfig;

fn steps_for(rc: &RunConfig, n_q: u32, eps: f64) -> usize {
    if eps == 0.0 {
        return rc.fidelity_t_max;
    }
    let needed = (rc.fidelity_x_max / (eps * eps * n_q as f64)).ceil() as usize;
    needed.clamp(1, rc.fidelity_t_max)
}

pub(super) fn run(rc: &RunConfig, sink: &mut Sink, report: &mut Report) -> Result<()> {
    let extra = rc.n_q_prime.saturating_sub(rc.n_q);
    let mut csv = Csv::new(&["n_q", "n_q_prime", "epsilon", "t", "x", "f"]);
    let mut runs = Vec::new();
    let mut run_index = 0u64;
    for &n_q in &rc.fidelity_n_q {
        let cfg = PhaseSpaceConfig::new(n_q, n_q + extra)?;
        let (_, pts) = initial_points(&RunConfig { image: None, ..rc.clone() }, cfg)?;
        let circuits = StepCircuits::new(cfg)?;
        let initial = QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts)?;
        for &eps in &rc.fidelity_epsilon {
            let steps = steps_for(rc, n_q, eps);
            let stop_below = (rc.fidelity_seeds == 1 && eps > 0.0).then_some(rc.fidelity_stop_below);
            let opts = RunOptions { reference: Reference::Permutation, stop_below, ..RunOptions::new(steps) };
            // fidelity averaged over seeds, up to the shortest run
            let mut sum: Vec<f64> = Vec::new();
            for s in 0..rc.fidelity_seeds {
                let mut state = initial.clone();
                let mut noise = noise_model(rc, eps, 3 + run_index, s as u64)?;
                let records = run_iterations(&mut state, &circuits, &opts, Some(&mut noise), |_| {})?;
                let f: Vec<f64> = records.iter().map(|r| r.fidelity.expect("reference present")).collect();
                if sum.is_empty() {
                    sum = f;
                } else {
                    sum.truncate(f.len());
                    sum.iter_mut().zip(&f).for_each(|(a, b)| *a += b);
                }
            }
            run_index += 1;
            let mut series = FidelitySeries::new(n_q, n_q + extra, eps, rc.seed);
            for (t, total) in sum.iter().enumerate() {
                let f = total / rc.fidelity_seeds as f64;
                if t > 0 {
                    series.push(t, f)?;
                }
                csv.row(&[&n_q, &(n_q + extra), &eps, &t, &series.scaled_time(t), &f]);
            }
            if eps == 0.0 {
                let worst = series.records().iter().map(|r| (r.1 - 1.0).abs()).fold(0.0, f64::max);
                report.check(format!("noise-free run n_q={n_q} keeps f = 1"), worst <= 1e-9, format!("max |f - 1| = {worst}"));
            }
            if let Some(x) = series.half_crossing() {
                report.value(format!("crossing.n_q{n_q}.eps{eps}"), x);
            }
            runs.push(series);
        }
    }

    let mut text = String::new();
    if runs.len() >= 2 {
        match fit_collapse_constant(&runs) {
            Ok(fit) => {
                for &(k, x) in &fit.crossings {
                    let _ = writeln!(text, "n_q={} epsilon={} crossing_x={x}", runs[k].n_q, runs[k].epsilon);
                }
                for &k in &fit.excluded {
                    let _ = writeln!(text, "n_q={} epsilon={} excluded (no f = 0.5 crossing)", runs[k].n_q, runs[k].epsilon);
                }
                let _ = writeln!(text, "C_fit={}\ndiagnostic={}", fit.c_fit, fit.diagnostic);
                report.value("c_fit", fit.c_fit);
                report.value("diagnostic", fit.diagnostic);
                report.check("collapse fit", true, "");
            }
            Err(e) => {
                let _ = writeln!(text, "collapse fit failed: {e}");
                report.check("collapse fit", false, e.to_string());
            }
        }
    } else {
        text.push_str("collapse fit skipped: needs at least two runs\n");
    }
    sink.write("fidelity.csv", csv.finish())?;
    sink.write("collapse.txt", text)
}
