//! Phase-space geometry and the kicked cat map on the torus.
//!
//! Coordinates live on `x ∈ [-0.5, 0.5)` and `y ∈ [-L/2, L/2)`. The lattice
//! discretization uses `x_i = -0.5 + i/N` for `i < N` and `y_j = -L/2 + j/N`
//! for `j < L·N`, with `N = 2^n_q` and `L = 2^(n_q' - n_q)`.
//!
//! One map step is a kick `y ← y + x (mod L)` followed by a rotation
//! `x ← x + y (mod 1)`. Velocity inversion `(x, y) ← (x - y, -y)` undoes the
//! last rotation and flips the momentum, so that `Inv ∘ F ∘ Inv = F⁻¹`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::rng;

/// Fixed chunk length for reductions, independent of the worker count.
pub(crate) const REDUCE_CHUNK: usize = 1 << 12;

/// Largest usable `n_q'`; keeps every lattice index inside `usize` arithmetic.
pub const MAX_QUBITS_PER_REGISTER: u32 = 30;

/// Register geometry shared by the lattice and the quantum registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseSpaceConfig {
    n_q: u32,
    n_q_prime: u32,
}

impl PhaseSpaceConfig {
    pub fn new(n_q: u32, n_q_prime: u32) -> Result<Self> {
        if n_q < 2 {
            return Err(Error::Config(format!("n_q must be at least 2, got {n_q}")));
        }
        if n_q_prime < n_q + 1 {
            return Err(Error::Config(format!(
                "n_q' must be at least n_q + 1 (torus length L >= 2), got n_q={n_q}, n_q'={n_q_prime}"
            )));
        }
        if n_q_prime > MAX_QUBITS_PER_REGISTER {
            return Err(Error::Config(format!("n_q' = {n_q_prime} exceeds {MAX_QUBITS_PER_REGISTER}")));
        }
        Ok(Self { n_q, n_q_prime })
    }

    /// Config with `n_q' = n_q + log2(L)`.
    pub fn with_torus_length(n_q: u32, torus_length: u64) -> Result<Self> {
        if torus_length < 2 || !torus_length.is_power_of_two() {
            return Err(Error::Config(format!("torus length must be a power of two >= 2, got {torus_length}")));
        }
        Self::new(n_q, n_q + torus_length.trailing_zeros())
    }

    pub fn n_q(&self) -> u32 {
        self.n_q
    }

    pub fn n_q_prime(&self) -> u32 {
        self.n_q_prime
    }

    /// Lattice points per unit of `x`.
    pub fn n(&self) -> usize {
        1 << self.n_q
    }

    /// Torus length in `y`.
    pub fn l(&self) -> usize {
        1 << (self.n_q_prime - self.n_q)
    }

    /// Total number of `y` lattice points.
    pub fn ln(&self) -> usize {
        1 << self.n_q_prime
    }

    pub fn torus_length(&self) -> f64 {
        self.l() as f64
    }

    /// Number of `(i, j)` lattice points.
    pub fn lattice_size(&self) -> usize {
        self.n() * self.ln()
    }

    pub fn check(&self, p: LatticePoint) -> Result<()> {
        if p.i >= self.n() || p.j >= self.ln() {
            return domain(format!(
                "lattice point ({}, {}) outside [0, {}) x [0, {})",
                p.i,
                p.j,
                self.n(),
                self.ln()
            ));
        }
        Ok(())
    }

    /// Flat index `i + N·j`.
    pub fn flat_index(&self, p: LatticePoint) -> usize {
        p.i + self.n() * p.j
    }

    pub fn point_at(&self, flat: usize) -> LatticePoint {
        LatticePoint { i: flat & (self.n() - 1), j: flat >> self.n_q }
    }

    pub fn x_of(&self, i: usize) -> f64 {
        -0.5 + i as f64 / self.n() as f64
    }

    pub fn y_of(&self, j: usize) -> f64 {
        -(self.l() as f64) / 2.0 + j as f64 / self.n() as f64
    }

    pub fn to_continuous(&self, p: LatticePoint) -> ContinuousPoint {
        ContinuousPoint { x: self.x_of(p.i), y: self.y_of(p.j) }
    }

    /// Lattice cell containing a continuous point (floor binning).
    pub fn bin(&self, p: ContinuousPoint) -> LatticePoint {
        let n = self.n() as f64;
        let i = ((p.x + 0.5) * n).floor() as i64;
        let j = ((p.y + self.l() as f64 / 2.0) * n).floor() as i64;
        LatticePoint {
            i: i.rem_euclid(self.n() as i64) as usize,
            j: j.rem_euclid(self.ln() as i64) as usize,
        }
    }

    /// One forward map step on the lattice.
    pub fn forward(&self, p: LatticePoint) -> Result<LatticePoint> {
        self.check(p)?;
        let (n, ln) = (self.n(), self.ln());
        let j = (p.j + p.i + ln - n / 2) & (ln - 1);
        // The rotation constant -LN/2 is a multiple of N once L >= 2.
        let i = (p.i + j) & (n - 1);
        Ok(LatticePoint { i, j })
    }

    /// Exact inverse of [`forward`](Self::forward).
    pub fn inverse(&self, p: LatticePoint) -> Result<LatticePoint> {
        self.check(p)?;
        let (n, ln) = (self.n(), self.ln());
        let i = (p.i + n - (p.j & (n - 1))) & (n - 1);
        let j = (p.j + ln - i + n / 2) & (ln - 1);
        Ok(LatticePoint { i, j })
    }

    /// Velocity inversion on the lattice: `j' = -j`, `i' = i - j`.
    pub fn invert_velocity(&self, p: LatticePoint) -> Result<LatticePoint> {
        self.check(p)?;
        let (n, ln) = (self.n(), self.ln());
        Ok(LatticePoint {
            i: (p.i + n - (p.j & (n - 1))) & (n - 1),
            j: (ln - p.j) & (ln - 1),
        })
    }
}

/// Discretized phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub i: usize,
    pub j: usize,
}

impl LatticePoint {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// Real-valued phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContinuousPoint {
    pub x: f64,
    pub y: f64,
}

impl ContinuousPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// Maps `v` onto `[-period/2, period/2)`.
#[inline]
pub fn wrap(v: f64, period: f64) -> f64 {
    v - period * (v / period + 0.5).floor()
}

#[inline]
pub fn forward_continuous(p: ContinuousPoint, torus_length: f64) -> ContinuousPoint {
    let y = wrap(p.y + p.x, torus_length);
    let x = wrap(p.x + y, 1.0);
    ContinuousPoint { x, y }
}

#[inline]
pub fn inverse_continuous(p: ContinuousPoint, torus_length: f64) -> ContinuousPoint {
    let x = wrap(p.x - p.y, 1.0);
    let y = wrap(p.y - x, torus_length);
    ContinuousPoint { x, y }
}

/// Amplitude of the additive error made when inverting velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionImprecision {
    epsilon: f64,
}

impl InversionImprecision {
    pub const EXACT: Self = Self { epsilon: 0.0 };

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return domain(format!("inversion imprecision must be finite and >= 0, got {epsilon}"));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Exact velocity inversion `(x, y) ← (x - y, -y)`; an involution.
#[inline]
pub fn invert_velocity_exact(p: ContinuousPoint, torus_length: f64) -> ContinuousPoint {
    ContinuousPoint { x: wrap(p.x - p.y, 1.0), y: wrap(-p.y, torus_length) }
}

/// Velocity inversion followed by independent uniform errors in `[-ε, ε]` on
/// both coordinates. Draw order: `δx`, then `δy`. No draws happen when `ε = 0`.
pub fn invert_velocity_continuous<R: Rng + ?Sized>(
    p: ContinuousPoint,
    torus_length: f64,
    imprecision: InversionImprecision,
    rng: &mut R,
) -> ContinuousPoint {
    let ContinuousPoint { mut x, mut y } = invert_velocity_exact(p, torus_length);
    let eps = imprecision.epsilon;
    if eps > 0.0 {
        let dx = rng.random_range(-eps..=eps);
        let dy = rng.random_range(-eps..=eps);
        x = wrap(x + dx, 1.0);
        y = wrap(y + dy, torus_length);
    }
    ContinuousPoint { x, y }
}

/// Probability (or mass) per lattice point, indexed `i + N·j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceDensity {
    cfg: PhaseSpaceConfig,
    p: Vec<f64>,
}

impl PhaseSpaceDensity {
    pub fn new(cfg: PhaseSpaceConfig, p: Vec<f64>) -> Result<Self> {
        if p.len() != cfg.lattice_size() {
            return domain(format!("density has {} entries, expected {}", p.len(), cfg.lattice_size()));
        }
        Ok(Self { cfg, p })
    }

    pub fn zeros(cfg: PhaseSpaceConfig) -> Self {
        Self { cfg, p: vec![0.0; cfg.lattice_size()] }
    }

    pub fn config(&self) -> PhaseSpaceConfig {
        self.cfg
    }

    pub fn get(&self, p: LatticePoint) -> f64 {
        self.p[self.cfg.flat_index(p)]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn total(&self) -> f64 {
        chunked_sum(&self.p)
    }

    /// Relabels every point through the exact velocity inversion.
    pub fn velocity_inverted(&self) -> Self {
        let mut out = vec![0.0; self.p.len()];
        for (flat, &v) in self.p.iter().enumerate() {
            let q = self.cfg.invert_velocity(self.cfg.point_at(flat)).expect("in range");
            out[self.cfg.flat_index(q)] = v;
        }
        Self { cfg: self.cfg, p: out }
    }

    /// Marginal over `x`, one entry per `j`.
    pub fn y_marginal(&self) -> Vec<f64> {
        self.p.chunks_exact(self.cfg.n()).map(|row| row.iter().sum()).collect()
    }
}

/// Sum with a fixed association order independent of thread count.
pub(crate) fn chunked_sum(values: &[f64]) -> f64 {
    let partials: Vec<f64> = values.par_chunks(REDUCE_CHUNK).map(|c| c.iter().sum::<f64>()).collect();
    partials.iter().sum()
}

/// Ensemble of classical orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    points: Vec<ContinuousPoint>,
    master_seed: u64,
    t: usize,
}

impl Ensemble {
    pub fn new(points: Vec<ContinuousPoint>, master_seed: u64) -> Self {
        Self { points, master_seed, t: 0 }
    }

    /// `count` orbits spread round-robin over the given lattice cells, each
    /// uniform inside its `1/N × 1/N` cell.
    pub fn in_cells(cfg: PhaseSpaceConfig, cells: &[LatticePoint], count: usize, master_seed: u64) -> Result<Self> {
        if cells.is_empty() {
            return domain("cannot seed an ensemble from an empty cell set");
        }
        for &c in cells {
            cfg.check(c)?;
        }
        let h = 1.0 / cfg.n() as f64;
        let points = (0..count)
            .into_par_iter()
            .map(|k| {
                let origin = cfg.to_continuous(cells[k % cells.len()]);
                let mut r = rng::stream(master_seed, rng::EPOCH_INITIAL, k as u64);
                let x = origin.x + h * r.random::<f64>();
                let y = origin.y + h * r.random::<f64>();
                ContinuousPoint { x: wrap(x, 1.0), y: wrap(y, cfg.torus_length()) }
            })
            .collect();
        Ok(Self::new(points, master_seed))
    }

    /// `count` orbits uniform in the central cell `-0.5 <= x, y < 0.5`.
    pub fn uniform_central_cell(count: usize, master_seed: u64) -> Self {
        let points = (0..count)
            .into_par_iter()
            .map(|k| {
                let mut r = rng::stream(master_seed, rng::EPOCH_INITIAL, k as u64);
                ContinuousPoint { x: r.random::<f64>() - 0.5, y: r.random::<f64>() - 0.5 }
            })
            .collect();
        Self::new(points, master_seed)
    }

    pub fn points(&self) -> &[ContinuousPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn evolve(&mut self, steps: usize, torus_length: f64) {
        if steps == 0 {
            return;
        }
        self.points.par_iter_mut().with_min_len(1024).for_each(|p| {
            for _ in 0..steps {
                *p = forward_continuous(*p, torus_length);
            }
        });
        self.t += steps;
    }

    /// Inverts every velocity with imprecision. Point `k` draws from the stream
    /// keyed by `(master_seed, t, k)`.
    pub fn invert_velocities(&mut self, torus_length: f64, imprecision: InversionImprecision) {
        let (seed, epoch) = (self.master_seed, self.t as u64);
        self.points.par_iter_mut().enumerate().with_min_len(1024).for_each(|(k, p)| {
            let mut r = rng::stream(seed, epoch, k as u64);
            *p = invert_velocity_continuous(*p, torus_length, imprecision, &mut r);
        });
    }

    /// `(⟨y⟩, ⟨y²⟩)` over the ensemble.
    pub fn moments(&self) -> (f64, f64) {
        if self.points.is_empty() {
            return (0.0, 0.0);
        }
        let partials: Vec<(f64, f64)> = self
            .points
            .par_chunks(REDUCE_CHUNK)
            .map(|c| c.iter().fold((0.0, 0.0), |(s, s2), p| (s + p.y, s2 + p.y * p.y)))
            .collect();
        let (s, s2) = partials.iter().fold((0.0, 0.0), |(a, b), &(c, d)| (a + c, b + d));
        let n = self.points.len() as f64;
        (s / n, s2 / n)
    }

    /// Fraction of orbits per lattice cell. With `readout_inverted`, points are
    /// first mapped through the exact velocity inversion.
    pub fn density(&self, cfg: PhaseSpaceConfig, readout_inverted: bool) -> PhaseSpaceDensity {
        let mut counts = vec![0u64; cfg.lattice_size()];
        let l = cfg.torus_length();
        for &p in &self.points {
            let q = if readout_inverted {
                invert_velocity_exact(p, l)
            } else {
                p
            };
            counts[cfg.flat_index(cfg.bin(q))] += 1;
        }
        let n = self.points.len().max(1) as f64;
        PhaseSpaceDensity { cfg, p: counts.into_iter().map(|c| c as f64 / n).collect() }
    }
}

/// Kolmogorov-Sinai entropy of the cat map, `ln((3 + √5)/2)`.
pub fn ks_entropy() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

const LYAPUNOV_BURN_IN: usize = 32;

/// Largest Lyapunov exponent from the tangent map, starting along `(1, 0)`.
pub fn lyapunov_exponent(steps: usize) -> Result<f64> {
    lyapunov_exponent_from(steps, [1.0, 0.0])
}

/// Tangent-map estimate from an arbitrary non-zero start vector `(dx, dy)`.
/// A short unrecorded burn-in aligns the vector with the unstable direction.
pub fn lyapunov_exponent_from(steps: usize, tangent: [f64; 2]) -> Result<f64> {
    if steps < 100 {
        return domain(format!("lyapunov estimate needs at least 100 steps, got {steps}"));
    }
    let norm = tangent[0].hypot(tangent[1]);
    if !(norm > 0.0) || !norm.is_finite() {
        return domain("tangent vector must be finite and non-zero");
    }
    // d(ȳ) = dx + dy, d(x̄) = dx + d(ȳ) = 2dx + dy; constant over the orbit.
    let step = |[dx, dy]: [f64; 2]| [2.0 * dx + dy, dx + dy];
    let mut v = [tangent[0] / norm, tangent[1] / norm];
    for _ in 0..LYAPUNOV_BURN_IN {
        v = step(v);
        let g = v[0].hypot(v[1]);
        v = [v[0] / g, v[1] / g];
    }
    let mut log_growth = 0.0;
    for _ in 0..steps {
        v = step(v);
        let g = v[0].hypot(v[1]);
        log_growth += g.ln();
        v = [v[0] / g, v[1] / g];
    }
    Ok(log_growth / steps as f64)
}
