//! Scenario runner for the cat-map time-reversal experiments.
//!
//! Each scenario writes its CSV/PGM outputs, `report.txt` (in-run checks and
//! scalar results) and `manifest.txt` (configuration echo and version) into
//! the output directory.

pub mod config;
pub mod scenarios;

use anyhow::{Context, Result};

pub use config::{RunConfig, Scenario, Track};
pub use scenarios::{Check, Report};

pub const THREADS_ENV: &str = "CATREVERSE_THREADS";

/// Worker count: the configured value (0 = all cores), capped by
/// `CATREVERSE_THREADS` when set.
pub fn effective_threads(requested: usize) -> Result<usize> {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut n = if requested == 0 { available } else { requested };
    if let Ok(cap) = std::env::var(THREADS_ENV) {
        let cap: usize = cap.trim().parse().with_context(|| format!("{THREADS_ENV} must be a positive integer, got {cap:?}"))?;
        n = n.min(cap.max(1));
    }
    Ok(n)
}

pub fn manifest(scenario: Scenario, rc: &RunConfig) -> String {
    format!("catreverse {}\nscenario={}\n{}", env!("CARGO_PKG_VERSION"), scenario.name(), rc.echo())
}

/// Runs `scenario` on a dedicated thread pool and writes all outputs.
pub fn run_scenario(scenario: Scenario, rc: &RunConfig) -> Result<Report> {
    rc.validate()?;
    let threads = effective_threads(rc.threads)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let mut sink = scenarios::Sink::new(&rc.out)?;
    log::info!("running {} with {threads} worker(s) into {}", scenario.name(), rc.out.display());
    let report = pool.install(|| scenarios::dispatch(scenario, rc, &mut sink))?;
    sink.write("report.txt", report.render())?;
    sink.write("manifest.txt", manifest(scenario, rc))?;
    Ok(report)
}
