use std::path::PathBuf;
use std::process::ExitCode;

use aci_harness::{apply_overrides, execute, oracle_report, preset, preset_catalog, ExperimentConfig, RunOptions};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aci-harness", version, about = "Run online conformal selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in preset name (see `list-presets`)
    #[arg(long)]
    preset: Option<String>,
    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write config.json, trace CSVs and metrics.json
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<u32>,
        /// Worker threads for replicas
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also write coverage.svg and regret.svg
        #[arg(long)]
        plot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in presets
    ListPresets,
    /// Print benchmark values as JSON
    Oracle {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(source: &Source) -> anyhow::Result<ExperimentConfig> {
    match (&source.preset, &source.config) {
        (Some(name), None) => Ok(preset(name)?),
        (None, Some(path)) => Ok(ExperimentConfig::load(path)?),
        _ => bail!("exactly one of --preset or --config is required"),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run { source, seed, replicas, jobs, plot, out } => {
            let cfg = apply_overrides(load(&source)?, seed, replicas, out)?;
            let metrics = execute(&cfg, RunOptions { jobs, plot })
                .with_context(|| format!("running {}", cfg.preset))?;
            for v in &metrics.variants {
                println!(
                    "{:<12} coverage {:.4} ± {:.4}  regret {:.2} ± {:.2}",
                    v.label, v.coverage_mean, v.coverage_se, v.regret_mean, v.regret_se
                );
            }
            if let Some(f) = metrics.slope_fit {
                println!("log-log slope {:.3} (r² {:.3})", f.slope, f.r2);
            }
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::ListPresets => {
            for p in preset_catalog() {
                let variants = if p.sweep.is_empty() { String::new() } else { format!(" ({} variants)", p.sweep.len()) };
                println!("{:<20} {:?}, T={}, phi={}{}", p.preset, p.algorithm, p.horizon, p.phi, variants);
            }
        }
        Command::Oracle { source, seed } => {
            let cfg = apply_overrides(load(&source)?, seed, None, None)?;
            println!("{}", serde_json::to_string_pretty(&oracle_report(&cfg)?)?);
        }
    }
    Ok(())
}
