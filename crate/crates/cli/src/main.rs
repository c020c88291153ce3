use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use catreverse::{run_scenario, RunConfig, Scenario};
use clap::Parser;

/// Time-reversal experiments on the generalized Arnold cat map.
#[derive(Parser, Debug)]
#[command(name = "catreverse", version)]
struct Cli {
    /// diffusion, profile, image, fidelity, verify or resources
    scenario: Scenario,
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Paper scale: n_q=7, n_q'=10, 10^6 orbits
    #[arg(long)]
    full: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure(cli: &Cli) -> Result<RunConfig> {
    let mut rc = RunConfig::for_scenario(cli.scenario);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        rc.apply_text(&text).with_context(|| format!("in {}", path.display()))?;
    }
    if cli.full {
        rc.apply_full();
    }
    for kv in &cli.set {
        rc.apply_assignment(kv)?;
    }
    if let Some(seed) = cli.seed {
        rc.seed = seed;
    }
    if let Some(out) = &cli.out {
        rc.out = out.clone();
    }
    Ok(rc)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure(&cli).and_then(|rc| run_scenario(cli.scenario, &rc));
    match result {
        Ok(report) => {
            print!("{}", report.render());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
