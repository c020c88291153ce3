//! Time reversal of the generalized Arnold cat map, on a lattice, with
//! classical trajectories, and on a simulated gate-level quantum computer.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod error;
pub mod evolution;
pub mod imageio;
pub mod lattice;
pub mod observables;
pub mod qsv;
pub mod rng;

pub use circuits::{build_adder, build_inversion_circuit, build_map_circuit, resource_estimate, Circuit, GateCounts, ResourceEstimate};
pub use error::{Error, Result};
pub use evolution::{run_iterations, Reference, RunOptions, StepCircuits, StepRecord, StepView};
pub use imageio::{generate_demon_image, BinaryImage, DensityImage, Region};
pub use lattice::{ContinuousPoint, Ensemble, InversionImprecision, LatticePoint, PhaseSpaceConfig, PhaseSpaceDensity};
pub use observables::{FidelitySeries, MomentSeries, YDistribution};
pub use qsv::{Gate, NoiseModel, NoisePlacement, QuantumState, RegisterLayout};
