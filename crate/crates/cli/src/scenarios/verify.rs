//! Exhaustive checks of the lattice map and the reversible circuits on small
//! registers.

use anyhow::{bail, Result};
use catreverse_core::circuits::gate_count_report;
use catreverse_core::{LatticePoint, RegisterLayout, StepCircuits};

use super::{Report, Sink};
use crate::config::RunConfig;

/// First few offending inputs, for the failure message.
fn failures(found: &[String]) -> String {
    let mut s = found.iter().take(4).cloned().collect::<Vec<_>>().join("; ");
    if found.len() > 4 {
        s.push_str(&format!("; and {} more", found.len() - 4));
    }
    s
}

fn record(report: &mut Report, name: &str, found: Vec<String>, total: usize) {
    let detail = if found.is_empty() { format!("{total} cases") } else { failures(&found) };
    report.check(name, found.is_empty(), detail);
}

pub(super) fn run(rc: &RunConfig, sink: &mut Sink, report: &mut Report) -> Result<()> {
    if rc.n_q > 4 || rc.n_q_prime > 6 {
        bail!("verify enumerates every basis state and needs n_q <= 4, n_q_prime <= 6");
    }
    let cfg = rc.phase_space()?;
    let layout = RegisterLayout::new(cfg);
    let mut circuits = StepCircuits::new(cfg)?;
    if rc.corrupt_adder {
        let mid = circuits.map.len() / 2;
        circuits.map.remove_gate(mid);
    }
    sink.write("map_circuit.txt", circuits.map.to_text())?;
    sink.write("inversion_circuit.txt", circuits.inversion.to_text())?;

    let size = cfg.lattice_size();
    let points: Vec<LatticePoint> = (0..size).map(|k| cfg.point_at(k)).collect();
    let show = |p: LatticePoint| format!("({}, {})", p.i, p.j);

    let mut hit = vec![false; size];
    for &p in &points {
        hit[cfg.flat_index(cfg.forward(p)?)] = true;
    }
    let missing: Vec<String> = hit.iter().enumerate().filter(|(_, &h)| !h).map(|(k, _)| show(cfg.point_at(k))).collect();
    record(report, "lattice map is a bijection", missing, size);

    let mut bad = Vec::new();
    for &p in &points {
        if cfg.inverse(cfg.forward(p)?)? != p || cfg.forward(cfg.inverse(p)?)? != p {
            bad.push(show(p));
        }
    }
    record(report, "inverse map undoes the map", bad, size);

    let mut bad = Vec::new();
    for &p in &points {
        if cfg.invert_velocity(cfg.invert_velocity(p)?)? != p {
            bad.push(show(p));
        }
    }
    record(report, "velocity inversion is an involution", bad, size);

    let mut bad = Vec::new();
    for &p in &points {
        let conj = cfg.invert_velocity(cfg.forward(cfg.invert_velocity(p)?)?)?;
        if conj != cfg.inverse(p)? {
            bad.push(show(p));
        }
    }
    record(report, "inversion conjugates the map into its inverse", bad, size);

    let (mut bad_map, mut bad_inv, mut bad_work, mut bad_invol, mut bad_rev) = (vec![], vec![], vec![], vec![], vec![]);
    for &p in &points {
        let idx = layout.basis_index(p.i, p.j, 0);
        let out = circuits.map.apply_to_basis(idx);
        let (i, j, w) = layout.decode(out);
        let want = cfg.forward(p)?;
        if (i, j) != (want.i, want.j) {
            bad_map.push(format!("{} -> ({i}, {j})", show(p)));
        }
        let out_inv = circuits.inversion.apply_to_basis(idx);
        let (ii, ji, wi) = layout.decode(out_inv);
        let want = cfg.invert_velocity(p)?;
        if (ii, ji) != (want.i, want.j) {
            bad_inv.push(format!("{} -> ({ii}, {ji})", show(p)));
        }
        if w != 0 || wi != 0 {
            bad_work.push(format!("{} leaves workspace {}", show(p), w.max(wi)));
        }
        if circuits.inversion.apply_to_basis(out_inv) != idx {
            bad_invol.push(show(p));
        }
        let s = circuits.inversion.apply_to_basis(circuits.map.apply_to_basis(circuits.inversion.apply_to_basis(out)));
        if s != idx {
            bad_rev.push(show(p));
        }
    }
    record(report, "map circuit equals the lattice map", bad_map, size);
    record(report, "inversion circuit equals the lattice inversion", bad_inv, size);
    record(report, "workspace restored to zero", bad_work, 2 * size);
    record(report, "inversion circuit is an involution", bad_invol, size);
    record(report, "circuit run forward, inverted, forward, inverted is the identity", bad_rev, size);

    let counts = gate_count_report(cfg)?;
    report.value("map_gates", circuits.map.len() as f64);
    report.value("inversion_gates", circuits.inversion.len() as f64);
    report.value("map_gates_reference", counts.reference_map as f64);
    report.value("inversion_gates_reference", counts.reference_inversion as f64);
    report.check("gate counts grow linearly", counts.affine, "");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_register_passes() {
        let dir = tempfile::tempdir().unwrap();
        let rc = RunConfig { n_q: 2, n_q_prime: 3, out: dir.path().to_path_buf(), ..RunConfig::default() };
        let mut sink = Sink::new(dir.path()).unwrap();
        let mut report = Report::default();
        run(&rc, &mut sink, &mut report).unwrap();
        assert!(report.passed(), "{}", report.render());
        assert!(dir.path().join("map_circuit.txt").exists());
    }
}
