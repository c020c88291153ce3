//! `key=value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use catreverse_core::{NoisePlacement, PhaseSpaceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Diffusion,
    Profile,
    Image,
    Fidelity,
    Verify,
    Resources,
}

impl Scenario {
    pub const ALL: [Scenario; 6] =
        [Scenario::Diffusion, Scenario::Profile, Scenario::Image, Scenario::Fidelity, Scenario::Verify, Scenario::Resources];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Diffusion => "diffusion",
            Scenario::Profile => "profile",
            Scenario::Image => "image",
            Scenario::Fidelity => "fidelity",
            Scenario::Verify => "verify",
            Scenario::Resources => "resources",
        }
    }
}

impl FromStr for Scenario {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .with_context(|| format!("unknown scenario {s:?}; expected one of diffusion, profile, image, fidelity, verify, resources"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Track {
    Classical,
    QuantumNoisy,
    QuantumExact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_q: u32,
    pub n_q_prime: u32,
    pub epsilon_quantum: f64,
    pub epsilon_classical: Vec<f64>,
    pub t_total: usize,
    pub t_r: usize,
    pub orbit_count: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub image: Option<PathBuf>,
    /// 0 uses every available core.
    pub threads: usize,
    pub noise_placement: NoisePlacement,
    pub tracks: Vec<Track>,
    pub fit_t_min: usize,
    pub fit_t_max: usize,
    pub profile_times: Vec<usize>,
    pub fidelity_n_q: Vec<u32>,
    pub fidelity_epsilon: Vec<f64>,
    pub fidelity_seeds: usize,
    pub fidelity_x_max: f64,
    pub fidelity_t_max: usize,
    pub fidelity_stop_below: f64,
    pub particles: Vec<f64>,
    pub collapse_c: f64,
    pub gamma: f64,
    pub corrupt_adder: bool,
    /// Advance the noise-free quantum track by permuting lattice amplitudes.
    pub permute_exact: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_q: 5,
            n_q_prime: 8,
            epsilon_quantum: 0.01,
            epsilon_classical: vec![1e-8, 1e-4],
            t_total: 70,
            t_r: 35,
            orbit_count: 100_000,
            seed: 1,
            out: PathBuf::from("out"),
            image: None,
            threads: 0,
            noise_placement: NoisePlacement::EveryTouchedQubit,
            tracks: vec![Track::Classical, Track::QuantumNoisy, Track::QuantumExact],
            fit_t_min: 5,
            fit_t_max: 30,
            profile_times: vec![20, 35],
            fidelity_n_q: vec![4, 5, 6],
            fidelity_epsilon: vec![0.03, 0.1],
            fidelity_seeds: 1,
            fidelity_x_max: 1.6,
            fidelity_t_max: 500,
            fidelity_stop_below: 0.4,
            particles: vec![6.022e23, 1e6],
            collapse_c: 0.5,
            gamma: 1.0,
            corrupt_adder: false,
            permute_exact: false,
        }
    }
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| s.parse::<T>().with_context(|| format!("bad list item {s:?}"))).collect()
}

fn one<T: FromStr>(v: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.trim().parse::<T>().with_context(|| format!("bad value {v:?}"))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Shortest round-trip form, in exponent notation for very large or small
/// magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && !(1e-3..1e6).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn nums(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Defaults for one scenario; `verify` starts from the smallest exhaustive
    /// register pair.
    pub fn for_scenario(scenario: Scenario) -> Self {
        let mut rc = Self::default();
        if scenario == Scenario::Verify {
            rc.n_q = 3;
            rc.n_q_prime = 4;
        }
        rc
    }

    /// Desk-scale defaults switched to the 26-qubit, 10⁶-orbit setting.
    pub fn apply_full(&mut self) {
        self.n_q = 7;
        self.n_q_prime = 10;
        self.orbit_count = 1_000_000;
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "n_q" => self.n_q = one(v)?,
            "n_q_prime" => self.n_q_prime = one(v)?,
            "epsilon_quantum" => self.epsilon_quantum = one(v)?,
            "epsilon_classical" => self.epsilon_classical = list(v)?,
            "t_total" => self.t_total = one(v)?,
            "t_r" => self.t_r = one(v)?,
            "orbit_count" => self.orbit_count = one(v)?,
            "seed" => self.seed = one(v)?,
            "out" => self.out = PathBuf::from(v),
            "image" => self.image = (!v.is_empty()).then(|| PathBuf::from(v)),
            "threads" => self.threads = one(v)?,
            "noise_placement" => {
                self.noise_placement = match v {
                    "every_touched" => NoisePlacement::EveryTouchedQubit,
                    "target_only" => NoisePlacement::TargetOnly,
                    _ => bail!("noise_placement must be every_touched or target_only, got {v:?}"),
                }
            }
            "tracks" => {
                self.tracks = v
                    .split(',')
                    .map(|t| match t.trim() {
                        "classical" => Ok(Track::Classical),
                        "quantum_noisy" => Ok(Track::QuantumNoisy),
                        "quantum_exact" => Ok(Track::QuantumExact),
                        other => bail!("unknown track {other:?}"),
                    })
                    .collect::<Result<_>>()?
            }
            "fit_t_min" => self.fit_t_min = one(v)?,
            "fit_t_max" => self.fit_t_max = one(v)?,
            "profile_times" => self.profile_times = list(v)?,
            "fidelity_n_q" => self.fidelity_n_q = list(v)?,
            "fidelity_epsilon" => self.fidelity_epsilon = list(v)?,
            "fidelity_seeds" => self.fidelity_seeds = one(v)?,
            "fidelity_x_max" => self.fidelity_x_max = one(v)?,
            "fidelity_t_max" => self.fidelity_t_max = one(v)?,
            "fidelity_stop_below" => self.fidelity_stop_below = one(v)?,
            "particles" => self.particles = list(v)?,
            "collapse_c" => self.collapse_c = one(v)?,
            "gamma" => self.gamma = one(v)?,
            "corrupt_adder" => self.corrupt_adder = one(v)?,
            "permute_exact" => self.permute_exact = one(v)?,
            other => bail!("unknown configuration key {other:?}"),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').with_context(|| format!("line {}: expected key=value", n + 1))?;
            self.set(k, v).with_context(|| format!("line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn apply_assignment(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects key=value, got {kv:?}"))?;
        self.set(k, v)
    }

    pub fn phase_space(&self) -> Result<PhaseSpaceConfig> {
        Ok(PhaseSpaceConfig::new(self.n_q, self.n_q_prime)?)
    }

    pub fn has_track(&self, t: Track) -> bool {
        self.tracks.contains(&t)
    }

    pub fn validate(&self) -> Result<()> {
        self.phase_space()?;
        if self.t_r > self.t_total {
            bail!("t_r = {} exceeds t_total = {}", self.t_r, self.t_total);
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.epsilon_quantum) {
            bail!("epsilon_quantum must lie in [0, pi]");
        }
        if self.epsilon_classical.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            bail!("epsilon_classical entries must be finite and non-negative");
        }
        if self.fit_t_min >= self.fit_t_max {
            bail!("fit_t_min must be below fit_t_max");
        }
        if self.fidelity_seeds == 0 {
            bail!("fidelity_seeds must be at least 1");
        }
        if self.gamma <= 0.0 {
            bail!("gamma must be positive");
        }
        Ok(())
    }

    /// Every setting except the thread count and output directory, one
    /// `key=value` per line in a fixed order.
    pub fn echo(&self) -> String {
        let placement = match self.noise_placement {
            NoisePlacement::EveryTouchedQubit => "every_touched",
            NoisePlacement::TargetOnly => "target_only",
        };
        let tracks: Vec<&str> = self
            .tracks
            .iter()
            .map(|t| match t {
                Track::Classical => "classical",
                Track::QuantumNoisy => "quantum_noisy",
                Track::QuantumExact => "quantum_exact",
            })
            .collect();
        let image = self.image.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let pairs: [(&str, String); 26] = [
            ("n_q", self.n_q.to_string()),
            ("n_q_prime", self.n_q_prime.to_string()),
            ("epsilon_quantum", num(self.epsilon_quantum)),
            ("epsilon_classical", nums(&self.epsilon_classical)),
            ("t_total", self.t_total.to_string()),
            ("t_r", self.t_r.to_string()),
            ("orbit_count", self.orbit_count.to_string()),
            ("seed", self.seed.to_string()),
            ("image", image),
            ("noise_placement", placement.to_string()),
            ("tracks", tracks.join(",")),
            ("fit_t_min", self.fit_t_min.to_string()),
            ("fit_t_max", self.fit_t_max.to_string()),
            ("profile_times", join(&self.profile_times)),
            ("fidelity_n_q", join(&self.fidelity_n_q)),
            ("fidelity_epsilon", nums(&self.fidelity_epsilon)),
            ("fidelity_seeds", self.fidelity_seeds.to_string()),
            ("fidelity_x_max", num(self.fidelity_x_max)),
            ("fidelity_t_max", self.fidelity_t_max.to_string()),
            ("fidelity_stop_below", num(self.fidelity_stop_below)),
            ("particles", nums(&self.particles)),
            ("collapse_c", num(self.collapse_c)),
            ("gamma", num(self.gamma)),
            ("corrupt_adder", self.corrupt_adder.to_string()),
            ("permute_exact", self.permute_exact.to_string()),
            ("torus_length", self.phase_space().map(|c| c.l().to_string()).unwrap_or_default()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# desk run\nn_q = 4\nn_q_prime=6\nepsilon_classical=1e-8, 1e-3\n\ntracks=classical\n").unwrap();
        assert_eq!((c.n_q, c.n_q_prime), (4, 6));
        assert_eq!(c.epsilon_classical, vec![1e-8, 1e-3]);
        assert_eq!(c.tracks, vec![Track::Classical]);
        c.apply_assignment("t_r=71").unwrap();
        assert!(c.validate().is_err());
        assert!(c.apply_text("bogus=1").is_err());
        assert!(c.apply_text("n_q").is_err());
        assert!(c.apply_assignment("n_q=abc").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut c = RunConfig::default();
        c.set("image", "demon.pbm").unwrap();
        c.set("noise_placement", "target_only").unwrap();
        let mut d = RunConfig::default();
        let echo: String = c.echo().lines().filter(|l| !l.starts_with("torus_length")).map(|l| format!("{l}\n")).collect();
        d.apply_text(&echo).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn full_switches_to_paper_scale() {
        let mut c = RunConfig::default();
        c.apply_full();
        assert_eq!((c.n_q, c.n_q_prime, c.orbit_count), (7, 10, 1_000_000));
    }
}
