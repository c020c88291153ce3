//! Qubit counts and fidelity horizons for macroscopic particle numbers.

use anyhow::Result;
use catreverse_core::circuits::gate_count_report;
use catreverse_core::observables::fidelity_timescale;
use catreverse_core::{resource_estimate, RegisterLayout};

use super::{Csv, Report, Sink};
use crate::config::RunConfig;

pub(super) fn run(rc: &RunConfig, sink: &mut Sink, report: &mut Report) -> Result<()> {
    let cfg = rc.phase_space()?;
    let l = cfg.l() as u64;
    let eps = rc.epsilon_quantum;
    let mut csv = Csv::new(&["particles", "torus_length", "n_q", "n_q_prime", "total_qubits", "epsilon", "t_f"]);
    for &p in &rc.particles {
        let r = resource_estimate(p, l)?;
        let t_f = if eps > 0.0 { fidelity_timescale(r.n_q, eps, rc.collapse_c)? } else { f64::INFINITY };
        csv.row(&[&p, &l, &r.n_q, &r.n_q_prime, &r.total_qubits, &eps, &t_f]);
        report.value(format!("total_qubits.{p:e}"), r.total_qubits as f64);
        report.value(format!("t_f.{p:e}"), t_f);
    }
    let desk = RegisterLayout::new(cfg).total_qubits();
    report.value("configured.total_qubits", desk as f64);
    let counts = gate_count_report(cfg)?;
    report.value("configured.map_gates", counts.map.total() as f64);
    report.value("configured.inversion_gates", counts.inversion.total() as f64);
    sink.write("resources.csv", csv.finish())
}
