//! Macroscopic observables and the reference laws they are compared to.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::lattice::{ks_entropy, PhaseSpaceConfig};

/// Diffusion coefficient of the kicked map, `⟨x²⟩` over the unit cell.
pub const DIFFUSION_COEFFICIENT: f64 = 1.0 / 12.0;

/// Momentum distribution on the `j` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct YDistribution {
    cfg: PhaseSpaceConfig,
    p: Vec<f64>,
}

impl YDistribution {
    pub fn new(cfg: PhaseSpaceConfig, p: Vec<f64>) -> Result<Self> {
        if p.len() != cfg.ln() {
            return domain(format!("distribution has {} bins, expected {}", p.len(), cfg.ln()));
        }
        if p.iter().any(|&v| !(v >= 0.0)) {
            return domain("probabilities must be non-negative");
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(Self { cfg, p })
    }

    pub fn point_mass(cfg: PhaseSpaceConfig, j: usize) -> Result<Self> {
        if j >= cfg.ln() {
            return domain(format!("bin {j} out of range"));
        }
        let mut p = vec![0.0; cfg.ln()];
        p[j] = 1.0;
        Ok(Self { cfg, p })
    }

    pub fn uniform(cfg: PhaseSpaceConfig) -> Self {
        Self { cfg, p: vec![1.0 / cfg.ln() as f64; cfg.ln()] }
    }

    pub fn config(&self) -> PhaseSpaceConfig {
        self.cfg
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(j, &w)| w * self.cfg.y_of(j)).sum()
    }

    /// `Σ_j p(j)·y_j²`.
    pub fn second_moment(&self) -> f64 {
        self.p.iter().enumerate().map(|(j, &w)| w * self.cfg.y_of(j).powi(2)).sum()
    }

    /// Distribution of `-y` (what a velocity-inverted readout reports).
    pub fn reflected(&self) -> Self {
        let ln = self.cfg.ln();
        let p = (0..ln).map(|j| self.p[(ln - j) & (ln - 1)]).collect();
        Self { cfg: self.cfg, p }
    }
}

/// Total-variation distance `½ Σ |p_a - p_b|`.
pub fn distribution_distance(a: &YDistribution, b: &YDistribution) -> Result<f64> {
    if a.cfg != b.cfg {
        return domain("distributions live on different grids");
    }
    Ok(0.5 * a.p.iter().zip(&b.p).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Periodized Gaussian solution of the diffusion equation on a torus of
/// length `l`, evaluated at `y`.
pub fn fokker_planck_gaussian(y: f64, t: f64, y0: f64, d: f64, l: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("time must be positive, got {t}"));
    }
    if !(d > 0.0) || !(l > 0.0) {
        return domain("diffusion coefficient and torus length must be positive");
    }
    let var = d * t;
    let sigma = var.sqrt();
    if sigma > l {
        // wide packet: Fourier series
        let mut sum = 1.0;
        for k in 1.. {
            let q = 2.0 * PI * k as f64 / l;
            let term = 2.0 * (-0.5 * q * q * var).exp();
            sum += term * (q * (y - y0)).cos();
            if term < 1e-16 {
                break;
            }
        }
        return Ok(sum / l);
    }
    let peak = 1.0 / (2.0 * PI * var).sqrt();
    let gauss = |k: i64| peak * (-(y + k as f64 * l - y0).powi(2) / (2.0 * var)).exp();
    let k0 = ((y0 - y) / l).round() as i64;
    let mut sum = gauss(k0);
    for step in 1.. {
        let (up, down) = (gauss(k0 + step), gauss(k0 - step));
        sum += up + down;
        if up < 1e-12 * peak && down < 1e-12 * peak {
            break;
        }
    }
    Ok(sum)
}

/// Reference distribution on the `j` grid: the periodized Gaussian sampled at
/// each `y_j` and normalized to unit mass.
pub fn fokker_planck_distribution(cfg: PhaseSpaceConfig, t: f64, y0: f64, d: f64) -> Result<YDistribution> {
    let l = cfg.torus_length();
    let raw: Vec<f64> = (0..cfg.ln()).map(|j| fokker_planck_gaussian(cfg.y_of(j), t, y0, d, l)).collect::<Result<_>>()?;
    let total: f64 = raw.iter().sum();
    YDistribution::new(cfg, raw.into_iter().map(|v| v / total).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord {
    pub t: usize,
    pub mean_y: f64,
    pub mean_y2: f64,
}

/// `(t, ⟨y⟩, ⟨y²⟩)` records with strictly increasing `t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentSeries {
    records: Vec<MomentRecord>,
}

impl MomentSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: usize, mean_y: f64, mean_y2: f64) -> Result<()> {
        if self.records.last().is_some_and(|r| r.t >= t) {
            return domain(format!("moment series times must increase, got {t}"));
        }
        self.records.push(MomentRecord { t, mean_y, mean_y2 });
        Ok(())
    }

    pub fn records(&self) -> &[MomentRecord] {
        &self.records
    }

    pub fn get(&self, t: usize) -> Option<&MomentRecord> {
        self.records.iter().find(|r| r.t == t)
    }

    /// Time of the smallest `⟨y²⟩` among records with `t > after`.
    pub fn argmin_after(&self, after: usize) -> Option<usize> {
        self.records
            .iter()
            .filter(|r| r.t > after)
            .min_by(|a, b| a.mean_y2.total_cmp(&b.mean_y2))
            .map(|r| r.t)
    }
}

/// Least-squares slope of `⟨y²⟩` against `t` over `lo <= t <= hi`.
pub fn fit_diffusion(series: &MomentSeries, lo: usize, hi: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> =
        series.records.iter().filter(|r| r.t >= lo && r.t <= hi).map(|r| (r.t as f64, r.mean_y2)).collect();
    if pts.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 records in [{lo}, {hi}], have {}", pts.len())));
    }
    least_squares_slope(&pts)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Result<f64> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate window: all records share one time".into()));
    }
    Ok(sxy / sxx)
}

/// Iterations after which an error of size `ε` reaches order one, `|ln ε|/h`.
pub fn escape_time(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    Ok(epsilon.ln().abs() / ks_entropy())
}

/// Fidelity horizon `C/(n_q·ε²)`.
pub fn fidelity_timescale(n_q: u32, epsilon: f64, c: f64) -> Result<f64> {
    if n_q < 1 || !(epsilon > 0.0) {
        return domain("fidelity timescale needs n_q >= 1 and epsilon > 0");
    }
    Ok(c / (n_q as f64 * epsilon * epsilon))
}

/// Diffusive relaxation time `L²/D`.
pub fn relaxation_time(l: f64, d: f64) -> f64 {
    l * l / d
}

/// Fidelity against iteration count for one noisy run.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    pub n_q: u32,
    pub n_q_prime: u32,
    pub epsilon: f64,
    pub seed: u64,
    records: Vec<(usize, f64)>,
}

impl FidelitySeries {
    pub fn new(n_q: u32, n_q_prime: u32, epsilon: f64, seed: u64) -> Self {
        Self { n_q, n_q_prime, epsilon, seed, records: vec![(0, 1.0)] }
    }

    pub fn push(&mut self, t: usize, f: f64) -> Result<()> {
        if !(0.0..=1.0 + 1e-12).contains(&f) {
            return domain(format!("fidelity {f} outside [0, 1]"));
        }
        if self.records.last().is_some_and(|&(last, _)| last >= t) {
            return domain(format!("fidelity series times must increase, got {t}"));
        }
        self.records.push((t, f.min(1.0)));
        Ok(())
    }

    pub fn records(&self) -> &[(usize, f64)] {
        &self.records
    }

    /// Scaling variable `ε²·n_q·t`.
    pub fn scaled_time(&self, t: usize) -> f64 {
        self.epsilon * self.epsilon * self.n_q as f64 * t as f64
    }

    /// First downward crossing of `f = 0.5` in scaled time, linearly
    /// interpolated between neighbouring records.
    pub fn half_crossing(&self) -> Option<f64> {
        self.records.windows(2).find_map(|w| {
            let ((ta, fa), (tb, fb)) = (w[0], w[1]);
            (fa >= 0.5 && fb < 0.5).then(|| {
                let (xa, xb) = (self.scaled_time(ta), self.scaled_time(tb));
                xa + (fa - 0.5) * (xb - xa) / (fa - fb)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseFit {
    /// Median of the per-run crossings.
    pub c_fit: f64,
    /// Largest over smallest crossing.
    pub diagnostic: f64,
    /// `(run index, crossing)` for every run that crossed.
    pub crossings: Vec<(usize, f64)>,
    /// Indices of runs that never dropped below one half.
    pub excluded: Vec<usize>,
}

/// Collapses runs onto `x = ε²·n_q·t` and reads off the `f = 0.5` crossing.
pub fn fit_collapse_constant(runs: &[FidelitySeries]) -> Result<CollapseFit> {
    if runs.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 runs, got {}", runs.len())));
    }
    for (a, ra) in runs.iter().enumerate() {
        if runs[..a].iter().any(|rb| rb.n_q == ra.n_q && rb.epsilon == ra.epsilon) {
            return Err(Error::Fit(format!("duplicate run for n_q={}, epsilon={}", ra.n_q, ra.epsilon)));
        }
    }
    let mut crossings = Vec::new();
    let mut excluded = Vec::new();
    for (k, run) in runs.iter().enumerate() {
        match run.half_crossing() {
            Some(x) => crossings.push((k, x)),
            None => excluded.push(k),
        }
    }
    if crossings.is_empty() {
        return Err(Error::Fit("no run crossed f = 0.5".into()));
    }
    let mut xs: Vec<f64> = crossings.iter().map(|c| c.1).collect();
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    let c_fit = if xs.len() % 2 == 1 { xs[mid] } else { 0.5 * (xs[mid - 1] + xs[mid]) };
    let diagnostic = xs[xs.len() - 1] / xs[0];
    Ok(CollapseFit { c_fit, diagnostic, crossings, excluded })
}
