use arrayvec::ArrayVec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::rng;

/// Elementary gate. Toffoli controls are stored in ascending order so equal
/// operations compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Not(usize),
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
    Rot { target: usize, axis: [f64; 3], angle: f64 },
}

impl Gate {
    pub fn not(target: usize) -> Self {
        Gate::Not(target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Toffoli { controls: [c1.min(c2), c1.max(c2)], target }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Not(t) | Gate::Cnot { target: t, .. } | Gate::Toffoli { target: t, .. } | Gate::Rot { target: t, .. } => t,
        }
    }

    /// Qubits the gate acts on, in ascending order.
    pub fn touched(&self) -> ArrayVec<usize, 3> {
        let mut q = ArrayVec::new();
        match *self {
            Gate::Not(t) | Gate::Rot { target: t, .. } => q.push(t),
            Gate::Cnot { control, target } => {
                q.push(control);
                q.push(target);
            }
            Gate::Toffoli { controls, target } => {
                q.push(controls[0]);
                q.push(controls[1]);
                q.push(target);
            }
        }
        q.sort_unstable();
        q
    }

    /// True for NOT, CNOT and Toffoli: classical reversible bit operations.
    pub fn is_classical(&self) -> bool {
        !matches!(self, Gate::Rot { .. })
    }

    pub fn validate(&self, total_qubits: usize) -> Result<()> {
        let q = self.touched();
        if let Some(&bad) = q.iter().find(|&&x| x >= total_qubits) {
            return domain(format!("{self:?}: qubit {bad} out of range for {total_qubits} qubits"));
        }
        if q.windows(2).any(|w| w[0] == w[1]) {
            return domain(format!("{self:?}: repeated qubit"));
        }
        if let Gate::Rot { axis, angle, .. } = self {
            let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !angle.is_finite() || (norm - 1.0).abs() > 1e-9 {
                return domain(format!("{self:?}: axis must be a unit vector and angle finite"));
            }
        }
        Ok(())
    }

    /// Image of a basis index under a classical gate.
    pub fn apply_to_basis(&self, index: usize) -> usize {
        let bit = |q: usize| index >> q & 1 == 1;
        match *self {
            Gate::Not(t) => index ^ (1 << t),
            Gate::Cnot { control, target } if bit(control) => index ^ (1 << target),
            Gate::Toffoli { controls: [a, b], target } if bit(a) && bit(b) => index ^ (1 << target),
            _ => index,
        }
    }
}

/// Which qubits of a gate receive a random rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoisePlacement {
    /// Every qubit the gate touches, in ascending index order.
    #[default]
    EveryTouchedQubit,
    /// Only the gate's target qubit.
    TargetOnly,
}

/// Random unitary gate imperfections: after each gate, a rotation with axis
/// uniform on the sphere and angle uniform in `[-ε, ε]`.
///
/// Each rotation consumes three uniforms `(z, φ, θ)`: axis `z`-component,
/// azimuth, angle.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    epsilon: f64,
    seed: u64,
    placement: NoisePlacement,
    rng: ChaCha8Rng,
    draw_counter: u64,
}

impl NoiseModel {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return domain(format!("noise amplitude must be finite and >= 0, got {epsilon}"));
        }
        Ok(Self { epsilon, seed, placement: NoisePlacement::default(), rng: rng::stream(seed, 0, 0), draw_counter: 0 })
    }

    pub fn with_placement(mut self, placement: NoisePlacement) -> Self {
        self.placement = placement;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn placement(&self) -> NoisePlacement {
        self.placement
    }

    pub fn draw_counter(&self) -> u64 {
        self.draw_counter
    }

    /// Draws one `(axis, angle)` pair.
    pub fn draw_rotation(&mut self) -> ([f64; 3], f64) {
        let z: f64 = 2.0 * self.rng.random::<f64>() - 1.0;
        let phi: f64 = std::f64::consts::TAU * self.rng.random::<f64>();
        let theta = self.epsilon * (2.0 * self.rng.random::<f64>() - 1.0);
        self.draw_counter += 3;
        let r = (1.0 - z * z).max(0.0).sqrt();
        ([r * phi.cos(), r * phi.sin(), z], theta)
    }

    /// Qubits of `gate` that receive a rotation, ascending.
    pub fn noisy_qubits(&self, gate: &Gate) -> ArrayVec<usize, 3> {
        match self.placement {
            NoisePlacement::EveryTouchedQubit => gate.touched(),
            NoisePlacement::TargetOnly => std::iter::once(gate.target()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_semantics() {
        assert_eq!(Gate::not(0).apply_to_basis(0), 1);
        assert_eq!(Gate::cnot(0, 1).apply_to_basis(1), 3);
        assert_eq!(Gate::cnot(0, 1).apply_to_basis(2), 2);
        assert_eq!(Gate::toffoli(2, 0, 1).apply_to_basis(0b101), 0b111);
        assert_eq!(Gate::toffoli(2, 0, 1).apply_to_basis(0b100), 0b100);
        assert_eq!(Gate::toffoli(2, 0, 1), Gate::toffoli(0, 2, 1));
    }

    #[test]
    fn validation() {
        assert!(Gate::cnot(1, 1).validate(4).is_err());
        assert!(Gate::toffoli(0, 1, 4).validate(4).is_err());
        assert!(Gate::toffoli(0, 1, 3).validate(4).is_ok());
        assert!(Gate::Rot { target: 0, axis: [1.0, 1.0, 0.0], angle: 0.1 }.validate(1).is_err());
        assert!(NoiseModel::new(-0.1, 0).is_err());
    }

    #[test]
    fn draws_are_seeded_and_bounded() {
        let mut a = NoiseModel::new(0.05, 9).unwrap();
        let mut b = NoiseModel::new(0.05, 9).unwrap();
        for _ in 0..1000 {
            let (axis, theta) = a.draw_rotation();
            assert_eq!((axis, theta), b.draw_rotation());
            assert!(theta.abs() <= 0.05);
            let norm: f64 = axis.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert_eq!(a.draw_counter(), 3000);
    }
}
