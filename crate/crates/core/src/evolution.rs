//! Iterating the map circuit on a state, with an optional velocity inversion
//! and an exact reference for fidelity.
//!
//! After an inversion at step `t_r` the state at `t_r + k` is
//! `F^k ∘ Inv ∘ F^(t_r)` applied to the initial state. Since
//! `F^k ∘ Inv ∘ F^k = Inv`, the state at `2·t_r` is `Inv` of the initial one.
//! Observables after the inversion are therefore read out through `Inv`,
//! which makes the returned distribution directly comparable with the
//! initial one. `⟨y²⟩` does not depend on this choice.

use crate::circuits::{build_inversion_circuit, build_map_circuit, Circuit};
use crate::error::{domain, Result};
use crate::lattice::{PhaseSpaceConfig, PhaseSpaceDensity};
use crate::observables::YDistribution;
use crate::qsv::{NoiseModel, QuantumState};

/// Map and inversion circuits for one configuration.
#[derive(Debug, Clone)]
pub struct StepCircuits {
    pub cfg: PhaseSpaceConfig,
    pub map: Circuit,
    pub inversion: Circuit,
}

impl StepCircuits {
    pub fn new(cfg: PhaseSpaceConfig) -> Result<Self> {
        Ok(Self { cfg, map: build_map_circuit(cfg)?, inversion: build_inversion_circuit(cfg)? })
    }
}

/// How the exact reference state is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    None,
    /// Run the circuits without noise.
    Circuit,
    /// Permute the `w = 0` block with the lattice map directly.
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub steps: usize,
    /// Velocity inversion right after this step (0 inverts before the first step).
    pub invert_at: Option<usize>,
    pub reference: Reference,
    /// End the run after the first record whose fidelity falls below this.
    pub stop_below: Option<f64>,
    /// Advance a noise-free state by permuting its lattice amplitudes instead
    /// of running the circuits.
    pub permute_exact: bool,
}

impl RunOptions {
    pub fn new(steps: usize) -> Self {
        Self { steps, invert_at: None, reference: Reference::None, stop_below: None, permute_exact: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub mean_y: f64,
    pub mean_y2: f64,
    pub fidelity: Option<f64>,
}

/// What an observer sees at each recorded step.
pub struct StepView<'a> {
    pub t: usize,
    pub state: &'a QuantumState,
    pub reference: Option<&'a QuantumState>,
    pub inverted: bool,
}

impl StepView<'_> {
    /// `(i, j)` density in the readout frame.
    pub fn density(&self) -> PhaseSpaceDensity {
        readout_density(self.state, self.inverted)
    }
}

pub fn readout_density(state: &QuantumState, inverted: bool) -> PhaseSpaceDensity {
    let d = state.marginal_xy();
    if inverted {
        d.velocity_inverted()
    } else {
        d
    }
}

fn advance(state: &mut QuantumState, circ: &Circuit, noise: Option<&mut NoiseModel>) -> Result<()> {
    match noise {
        Some(n) => circ.apply_noisy(state, n),
        None => circ.apply(state),
    }
}

/// Runs `opts.steps` map steps and records moments (and fidelity against the
/// reference, if any) at `t = 0..=steps`. The observer sees every recorded
/// step, before the inversion when `t == invert_at`.
pub fn run_iterations(
    state: &mut QuantumState,
    circuits: &StepCircuits,
    opts: &RunOptions,
    mut noise: Option<&mut NoiseModel>,
    mut observe: impl FnMut(&StepView<'_>),
) -> Result<Vec<StepRecord>> {
    if state.layout().config() != circuits.cfg {
        return domain("state and circuits were built for different configurations");
    }
    if opts.permute_exact && noise.is_some() {
        return domain("permutation propagation needs a noise-free run");
    }
    if let Some(tr) = opts.invert_at {
        if tr > opts.steps {
            return domain(format!("inversion step {tr} exceeds the run length {}", opts.steps));
        }
    }
    let cfg = circuits.cfg;
    let mut reference = (opts.reference != Reference::None).then(|| state.clone());
    let mut inverted = false;
    let mut records = Vec::with_capacity(opts.steps + 1);
    for t in 0..=opts.steps {
        if t > 0 {
            if opts.permute_exact {
                state.permute_lattice(|p| cfg.forward(p))?;
            } else {
                advance(state, &circuits.map, noise.as_deref_mut())?;
            }
            if let Some(r) = reference.as_mut() {
                match opts.reference {
                    Reference::Permutation => r.permute_lattice(|p| cfg.forward(p))?,
                    _ => circuits.map.apply(r)?,
                }
            }
        }
        let density = readout_density(state, inverted);
        let y = YDistribution::new(cfg, density.y_marginal())?;
        let fidelity = reference.as_ref().map(|r| r.fidelity(state)).transpose()?;
        records.push(StepRecord { t, mean_y: y.mean(), mean_y2: y.second_moment(), fidelity });
        observe(&StepView { t, state, reference: reference.as_ref(), inverted });
        if opts.invert_at == Some(t) {
            if opts.permute_exact {
                state.permute_lattice(|p| cfg.invert_velocity(p))?;
            } else {
                advance(state, &circuits.inversion, noise.as_deref_mut())?;
            }
            if let Some(r) = reference.as_mut() {
                match opts.reference {
                    Reference::Permutation => r.permute_lattice(|p| cfg.invert_velocity(p))?,
                    _ => circuits.inversion.apply(r)?,
                }
            }
            inverted = true;
        }
        if let (Some(limit), Some(f)) = (opts.stop_below, fidelity) {
            if f < limit {
                break;
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageio::{generate_demon_image, image_to_points, recovery_overlap};
    use crate::observables::distribution_distance;
    use crate::qsv::RegisterLayout;

    fn demon_state(cfg: PhaseSpaceConfig) -> QuantumState {
        let img = generate_demon_image(cfg.n()).unwrap();
        let pts = image_to_points(&img, cfg).unwrap();
        QuantumState::uniform_superposition(RegisterLayout::new(cfg), &pts).unwrap()
    }

    #[test]
    fn exact_run_returns_to_initial_distribution() {
        let cfg = PhaseSpaceConfig::new(4, 6).unwrap();
        let circuits = StepCircuits::new(cfg).unwrap();
        let mut state = demon_state(cfg);
        let initial = state.marginal_y();
        let opts = RunOptions { invert_at: Some(6), reference: Reference::Permutation, ..RunOptions::new(12) };
        let mut last = None;
        let records = run_iterations(&mut state, &circuits, &opts, None, |v| {
            if v.t == 12 {
                last = Some(v.density());
            }
        })
        .unwrap();
        assert_eq!(records.len(), 13);
        let end = last.unwrap();
        let back = YDistribution::new(cfg, end.y_marginal()).unwrap();
        assert!(distribution_distance(&initial, &back).unwrap() < 1e-12);
        let img = generate_demon_image(cfg.n()).unwrap();
        assert!((recovery_overlap(&img, &end).unwrap() - 1.0).abs() < 1e-12);
        assert!(records.iter().all(|r| (r.fidelity.unwrap() - 1.0).abs() < 1e-12));
        assert!((records[0].mean_y2 - records[12].mean_y2).abs() < 1e-12);
    }

    #[test]
    fn permutation_reference_matches_circuit_reference() {
        let cfg = PhaseSpaceConfig::new(3, 5).unwrap();
        let circuits = StepCircuits::new(cfg).unwrap();
        let opts = |reference| RunOptions { invert_at: Some(3), reference, ..RunOptions::new(8) };
        let pts = [crate::lattice::LatticePoint::new(1, 9), crate::lattice::LatticePoint::new(5, 14)];
        let layout = RegisterLayout::new(cfg);
        let run = |reference| {
            let mut s = QuantumState::uniform_superposition(layout, &pts).unwrap();
            let mut noise = NoiseModel::new(0.05, 3).unwrap();
            run_iterations(&mut s, &circuits, &opts(reference), Some(&mut noise), |_| {}).unwrap()
        };
        let (x, y) = (run(Reference::Circuit), run(Reference::Permutation));
        for (p, q) in x.iter().zip(&y) {
            assert!((p.fidelity.unwrap() - q.fidelity.unwrap()).abs() < 1e-12);
            assert_eq!(p.mean_y2, q.mean_y2);
        }
        assert!(x.last().unwrap().fidelity.unwrap() < 1.0);
    }

    #[test]
    fn permutation_propagation_matches_circuits() {
        let cfg = PhaseSpaceConfig::new(4, 6).unwrap();
        let circuits = StepCircuits::new(cfg).unwrap();
        let run = |permute_exact| {
            let mut s = demon_state(cfg);
            let opts = RunOptions { invert_at: Some(4), permute_exact, ..RunOptions::new(9) };
            let records = run_iterations(&mut s, &circuits, &opts, None, |_| {}).unwrap();
            (s, records)
        };
        let (a, ra) = run(false);
        let (b, rb) = run(true);
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn rejects_late_inversion() {
        let cfg = PhaseSpaceConfig::new(2, 3).unwrap();
        let circuits = StepCircuits::new(cfg).unwrap();
        let mut s = QuantumState::zero(RegisterLayout::new(cfg));
        let opts = RunOptions { invert_at: Some(3), ..RunOptions::new(2) };
        assert!(run_iterations(&mut s, &circuits, &opts, None, |_| {}).is_err());
        let mut noise = NoiseModel::new(0.1, 0).unwrap();
        let opts = RunOptions { permute_exact: true, ..RunOptions::new(2) };
        assert!(run_iterations(&mut s, &circuits, &opts, Some(&mut noise), |_| {}).is_err());
    }
}
