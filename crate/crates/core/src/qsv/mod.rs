//! Dense state-vector simulation of the three-register machine.

mod gate;
pub(crate) mod kernel;
mod state;

pub use gate::{Gate, NoiseModel, NoisePlacement};
pub use state::QuantumState;

use std::ops::Range;

use crate::lattice::PhaseSpaceConfig;

/// Qubit assignment: `x` register on qubits `0..n_q`, `y` register on the next
/// `n_q'` qubits, workspace on the remaining `n_q' - 1`. Each register is
/// little-endian, so basis state `|i, j, w⟩` has index `i + N·j + N·LN·w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    cfg: PhaseSpaceConfig,
}

impl RegisterLayout {
    pub fn new(cfg: PhaseSpaceConfig) -> Self {
        Self { cfg }
    }

    pub fn config(&self) -> PhaseSpaceConfig {
        self.cfg
    }

    pub fn n_q(&self) -> usize {
        self.cfg.n_q() as usize
    }

    pub fn n_q_prime(&self) -> usize {
        self.cfg.n_q_prime() as usize
    }

    pub fn total_qubits(&self) -> usize {
        self.n_q() + 2 * self.n_q_prime() - 1
    }

    pub fn dimension(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn x_qubits(&self) -> Range<usize> {
        0..self.n_q()
    }

    pub fn y_qubits(&self) -> Range<usize> {
        self.n_q()..self.n_q() + self.n_q_prime()
    }

    pub fn work_qubits(&self) -> Range<usize> {
        self.n_q() + self.n_q_prime()..self.total_qubits()
    }

    pub fn basis_index(&self, i: usize, j: usize, w: usize) -> usize {
        i + self.cfg.n() * j + self.cfg.lattice_size() * w
    }

    /// Inverse of [`basis_index`](Self::basis_index): `(i, j, w)`.
    pub fn decode(&self, index: usize) -> (usize, usize, usize) {
        let (n, ln) = (self.cfg.n(), self.cfg.ln());
        (index & (n - 1), (index >> self.n_q()) & (ln - 1), index >> (self.n_q() + self.n_q_prime()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_arithmetic() {
        let l = RegisterLayout::new(PhaseSpaceConfig::new(7, 10).unwrap());
        assert_eq!(l.total_qubits(), 26);
        assert_eq!(l.work_qubits().len(), 9);
        let l = RegisterLayout::new(PhaseSpaceConfig::new(3, 4).unwrap());
        assert_eq!(l.total_qubits(), 10);
        assert_eq!(l.basis_index(5, 11, 3), 5 + 8 * 11 + 128 * 3);
        assert_eq!(l.decode(l.basis_index(5, 11, 3)), (5, 11, 3));
        assert_eq!(l.y_qubits(), 3..7);
        assert_eq!(l.work_qubits(), 7..10);
    }
}
