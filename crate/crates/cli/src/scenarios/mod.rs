mod diffusion;
mod fidelity;
mod image;
mod profile;
mod resources;
mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use catreverse_core::imageio::image_to_points;
use catreverse_core::{generate_demon_image, BinaryImage, LatticePoint, NoiseModel, PhaseSpaceConfig};

use crate::config::{RunConfig, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// In-run checks and named scalar results of one scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
}

impl Report {
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn value(&mut self, key: impl Into<String>, v: f64) {
        self.values.insert(key.into(), v);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}{}", if c.passed { "PASS" } else { "FAIL" }, c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
        }
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Output directory that remembers what was written.
pub struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

impl Sink {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

/// CSV text with a header row.
pub(crate) struct Csv(String);

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv(header.join(",") + "\n")
    }

    pub fn row(&mut self, cells: &[&dyn std::fmt::Display]) {
        let line: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
        self.0.push_str(&line.join(","));
        self.0.push('\n');
    }

    pub fn finish(self) -> String {
        self.0
    }
}

/// The configured image, or the procedural demon, or (below N = 16) the
/// whole central cell.
pub(crate) fn initial_image(rc: &RunConfig, cfg: PhaseSpaceConfig) -> Result<BinaryImage> {
    let img = match &rc.image {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            BinaryImage::from_pbm(&bytes).with_context(|| format!("parsing {}", path.display()))?
        }
        None if cfg.n() >= 16 => generate_demon_image(cfg.n())?,
        None => {
            let mut img = BinaryImage::new(cfg.n())?;
            for r in 0..cfg.n() {
                for c in 0..cfg.n() {
                    img.set(r, c, true);
                }
            }
            img
        }
    };
    if img.size() != cfg.n() {
        bail!("image is {0}x{0} but N = {1}", img.size(), cfg.n());
    }
    if img.count() == 0 {
        bail!("initial image has no set pixels");
    }
    Ok(img)
}

pub(crate) fn initial_points(rc: &RunConfig, cfg: PhaseSpaceConfig) -> Result<(BinaryImage, Vec<LatticePoint>)> {
    let img = initial_image(rc, cfg)?;
    let pts = image_to_points(&img, cfg)?;
    Ok((img, pts))
}

pub(crate) fn noise_model(rc: &RunConfig, epsilon: f64, a: u64, b: u64) -> Result<NoiseModel> {
    let seed = catreverse_core::rng::derive_seed(rc.seed, a, b);
    Ok(NoiseModel::new(epsilon, seed)?.with_placement(rc.noise_placement))
}

pub(crate) fn classical_track_name(eps: f64) -> String {
    format!("classical_eps{eps:e}")
}

pub(crate) fn dispatch(scenario: Scenario, rc: &RunConfig, sink: &mut Sink) -> Result<Report> {
    let mut report = Report::default();
    match scenario {
        Scenario::Diffusion => diffusion::run(rc, sink, &mut report)?,
        Scenario::Profile => profile::run(rc, sink, &mut report)?,
        Scenario::Image => image::run(rc, sink, &mut report)?,
        Scenario::Fidelity => fidelity::run(rc, sink, &mut report)?,
        Scenario::Verify => verify::run(rc, sink, &mut report)?,
        Scenario::Resources => resources::run(rc, sink, &mut report)?,
    }
    Ok(report)
}
