use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::gate::{Gate, NoiseModel};
use super::kernel::{self, LocalOp};
use super::RegisterLayout;
use crate::error::{domain, Error, Result};
use crate::lattice::{LatticePoint, PhaseSpaceDensity, REDUCE_CHUNK};
use crate::observables::YDistribution;
use crate::rng;

/// Amplitudes of the full register in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩`.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { layout, amps }
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dimension() {
            return domain(format!("basis index {index} out of range"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    /// Equal-weight superposition `Σ |i, j, 0⟩ / √N_d` over distinct points.
    pub fn uniform_superposition(layout: RegisterLayout, points: &[LatticePoint]) -> Result<Self> {
        if points.is_empty() {
            return domain("cannot prepare a superposition over an empty point set");
        }
        let cfg = layout.config();
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        let mut distinct = 0usize;
        for &p in points {
            cfg.check(p)?;
            let slot = &mut amps[layout.basis_index(p.i, p.j, 0)];
            if slot.re == 0.0 {
                distinct += 1;
                slot.re = 1.0;
            }
        }
        let a = 1.0 / (distinct as f64).sqrt();
        for v in amps.iter_mut().filter(|v| v.re != 0.0) {
            v.re = a;
        }
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let partials: Vec<f64> =
            self.amps.par_chunks(REDUCE_CHUNK).map(|c| c.iter().map(|a| a.norm_sqr()).sum::<f64>()).collect();
        partials.iter().sum()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.layout.total_qubits())?;
        let qubits = gate.touched();
        kernel::apply_local(&mut self.amps, &qubits, &local_op(gate, &qubits, &[]));
        Ok(())
    }

    /// Exact gate followed by random rotations on the qubits selected by the
    /// noise model, drawn in ascending qubit order. Gate and rotations run as a
    /// single pass over the amplitudes.
    pub fn apply_noisy(&mut self, gate: &Gate, noise: &mut NoiseModel) -> Result<()> {
        if !gate.is_classical() {
            return domain("noisy application is defined for NOT, CNOT and Toffoli only");
        }
        gate.validate(self.layout.total_qubits())?;
        if noise.epsilon() == 0.0 {
            return self.apply(gate);
        }
        let qubits = gate.touched();
        let rotations: arrayvec::ArrayVec<(usize, kernel::Mat2), 3> = noise
            .noisy_qubits(gate)
            .into_iter()
            .map(|q| {
                let (axis, angle) = noise.draw_rotation();
                (q, kernel::rotation_matrix(axis, angle))
            })
            .collect();
        kernel::apply_local(&mut self.amps, &qubits, &local_op(gate, &qubits, &rotations));
        Ok(())
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::Domain("fidelity between states of different layouts".into()));
        }
        let partials: Vec<Complex64> = self
            .amps
            .par_chunks(REDUCE_CHUNK)
            .zip(other.amps.par_chunks(REDUCE_CHUNK))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>())
            .collect();
        let overlap: Complex64 = partials.iter().sum();
        Ok(overlap.norm_sqr().min(1.0))
    }

    /// `p(i, j) = Σ_w |a(i, j, w)|²`.
    pub fn marginal_xy(&self) -> PhaseSpaceDensity {
        let cfg = self.layout.config();
        let block = cfg.lattice_size();
        let mut p = vec![0.0; block];
        for chunk in self.amps.chunks_exact(block) {
            p.par_iter_mut().zip(chunk.par_iter()).with_min_len(REDUCE_CHUNK).for_each(|(acc, a)| *acc += a.norm_sqr());
        }
        PhaseSpaceDensity::new(cfg, p).expect("block size matches lattice")
    }

    pub fn marginal_y(&self) -> YDistribution {
        let cfg = self.layout.config();
        YDistribution::new(cfg, self.marginal_xy().y_marginal()).expect("marginal length matches")
    }

    /// Independent draws of `(i, j)` from [`marginal_xy`](Self::marginal_xy).
    pub fn sample_measurements(&self, count: usize, seed: u64) -> Result<Vec<LatticePoint>> {
        if count == 0 {
            return domain("measurement count must be at least 1");
        }
        let density = self.marginal_xy();
        let cfg = density.config();
        let mut cdf = Vec::with_capacity(density.values().len());
        let mut acc = 0.0;
        for &v in density.values() {
            acc += v;
            cdf.push(acc);
        }
        let mut r = rng::stream(seed, 0, 0);
        Ok((0..count)
            .map(|_| {
                let u = r.random::<f64>() * acc;
                let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                cfg.point_at(k)
            })
            .collect())
    }

    /// Moves every workspace-clean amplitude `(i, j, 0)` to `f(i, j)`. Only
    /// valid for states without support outside the `w = 0` block; used to
    /// co-evolve an exact reference without running the circuit.
    pub fn permute_lattice<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(LatticePoint) -> Result<LatticePoint>,
    {
        let cfg = self.layout.config();
        let block = cfg.lattice_size();
        debug_assert!(self.amps[block..].iter().all(|a| a.norm_sqr() == 0.0));
        let mut out = vec![Complex64::new(0.0, 0.0); block];
        for (flat, &a) in self.amps[..block].iter().enumerate() {
            out[cfg.flat_index(f(cfg.point_at(flat))?)] = a;
        }
        self.amps[..block].copy_from_slice(&out);
        Ok(())
    }
}

fn local_op(gate: &Gate, qubits: &[usize], rotations: &[(usize, kernel::Mat2)]) -> LocalOp {
    let local = |q: usize| qubits.iter().position(|&x| x == q).expect("qubit belongs to gate");
    let mut op = LocalOp::default();
    match *gate {
        Gate::Not(_) => op.swap = Some((0, 1)),
        Gate::Cnot { control, target } => {
            let c = 1 << local(control);
            op.swap = Some((c, c | 1 << local(target)));
        }
        Gate::Toffoli { controls: [a, b], target } => {
            let c = 1 << local(a) | 1 << local(b);
            op.swap = Some((c, c | 1 << local(target)));
        }
        Gate::Rot { axis, angle, .. } => op.rotations.push((0, kernel::rotation_matrix(axis, angle))),
    }
    for &(q, m) in rotations {
        op.rotations.push((local(q), m));
    }
    op
}
