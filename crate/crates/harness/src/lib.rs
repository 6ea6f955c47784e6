//! Config-driven experiment harness: presets, replica execution and
//! CSV / JSON / SVG output.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod presets;
pub mod run;

use std::fs;
use std::path::{Path, PathBuf};

use aci_core::metrics::sublinearity_fit;
use aci_core::rng::replica_seed;
use rayon::prelude::*;
use serde_json::json;

pub use config::{Algorithm, EnvironmentSpec, ExperimentConfig, RunSpec, StepRule, SweepEntry};
pub use error::{HarnessError, Result};
use output::{render_trace_csv, MetricsFile, VariantSummary};
pub use presets::{preset, preset_catalog, PRESET_NAMES};
pub use run::{oracle, simulate, ReplicaOutput};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub jobs: usize,
    pub plot: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 1, plot: false }
    }
}

/// Output file name of one replica's trace.
pub fn trace_file_name(cfg: &ExperimentConfig, label: &str, replica: u32) -> String {
    if cfg.sweep.is_empty() {
        format!("trace_{replica}.csv")
    } else {
        format!("trace_{label}_{replica}.csv")
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Series of replica 0 kept for plotting.
struct Kept {
    label: String,
    coverage: Vec<f64>,
    regret: Vec<f64>,
    regret_pos: Vec<f64>,
}

/// Runs every variant and replica, writing config.json, the trace CSVs,
/// metrics.json and (optionally) coverage.svg / regret.svg.
pub fn execute(cfg: &ExperimentConfig, opts: RunOptions) -> Result<MetricsFile> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write(&dir.join("config.json"), &(cfg.to_json() + "\n"))?;

    let variants = cfg.variants();
    let tasks: Vec<(usize, u32)> =
        (0..variants.len()).flat_map(|v| (0..cfg.replicas).map(move |k| (v, k))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| HarnessError::config("jobs", e.to_string()))?;

    let mut summaries: Vec<Vec<run::ReplicaSummary>> = vec![Vec::new(); variants.len()];
    let mut benchmarks: Vec<Option<run::Benchmark>> = vec![None; variants.len()];
    let mut kept: Vec<Kept> = Vec::new();
    // bounded batches keep memory flat; the collector writes in task order
    for batch in tasks.chunks(opts.jobs.max(1) * 2) {
        let results: Vec<Result<(ReplicaOutput, String)>> = pool.install(|| {
            batch
                .par_iter()
                .map(|&(v, k)| {
                    let out = simulate(&variants[v], k, replica_seed(cfg.seed, k as u64))?;
                    let csv = render_trace_csv(&out);
                    Ok((out, csv))
                })
                .collect()
        });
        for (&(v, k), res) in batch.iter().zip(results) {
            let (out, csv) = res?;
            write(&dir.join(trace_file_name(cfg, &variants[v].label, k)), &csv)?;
            summaries[v].push(out.summary(variants[v].phi));
            if k == 0 {
                benchmarks[v] = Some(out.benchmark.clone());
                if kept.len() < 2 {
                    kept.push(Kept {
                        label: variants[v].label.clone(),
                        coverage: out.metrics.coverage_cum.clone(),
                        regret: out.metrics.regret_cum.clone(),
                        regret_pos: out.metrics.regret_pos_cum.clone(),
                    });
                }
            }
        }
    }

    let summaries: Vec<VariantSummary> = variants
        .iter()
        .zip(summaries)
        .zip(benchmarks)
        .map(|((spec, reps), b)| VariantSummary::new(spec, b.expect("replica 0 ran"), reps))
        .collect();
    let slope_fit = horizon_sweep_fit(cfg, &summaries)?;
    let metrics = MetricsFile { preset: cfg.preset.clone(), seed: cfg.seed, variants: summaries, slope_fit };
    write(&dir.join("metrics.json"), &(serde_json::to_string_pretty(&metrics).expect("serializable") + "\n"))?;

    if opts.plot {
        write_plots(dir, cfg, &kept)?;
    }
    Ok(metrics)
}

/// Slope of mean regret against T when the sweep varies only the horizon.
fn horizon_sweep_fit(cfg: &ExperimentConfig, variants: &[VariantSummary]) -> Result<Option<aci_core::metrics::SlopeFit>> {
    let only_t = cfg.sweep.len() >= 3
        && cfg.sweep.iter().all(|s| s.horizon.is_some() && s.algorithm.is_none() && s.schedule.is_none());
    if !only_t {
        return Ok(None);
    }
    let pts: Vec<(f64, f64)> = variants.iter().map(|v| (v.horizon as f64, v.regret_mean)).collect();
    Ok(Some(sublinearity_fit(&pts)?))
}

fn write_plots(dir: &Path, cfg: &ExperimentConfig, kept: &[Kept]) -> Result<()> {
    let phi = cfg.phi;
    let (cov, reg) = if kept.len() == 1 {
        let k = &kept[0];
        (
            plot::line_chart("Cumulative coverage", "coverage", &[("coverage", &k.coverage)], Some(("phi", phi))),
            plot::line_chart(
                "Cumulative regret",
                "regret",
                &[("regret", &k.regret), ("positive-part regret", &k.regret_pos)],
                None,
            ),
        )
    } else {
        let cs: Vec<(&str, &[f64])> = kept.iter().map(|k| (k.label.as_str(), k.coverage.as_slice())).collect();
        let rs: Vec<(&str, &[f64])> = kept.iter().map(|k| (k.label.as_str(), k.regret.as_slice())).collect();
        (
            plot::line_chart("Cumulative coverage", "coverage", &cs, Some(("phi", phi))),
            plot::line_chart("Cumulative regret", "regret", &rs, None),
        )
    };
    write(&dir.join("coverage.svg"), &cov)?;
    write(&dir.join("regret.svg"), &reg)
}

/// Benchmarks of every variant as seen by replica 0.
pub fn oracle_report(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    cfg.validate()?;
    let seed = replica_seed(cfg.seed, 0);
    let mut out = Vec::new();
    for v in cfg.variants() {
        let b = oracle(&v, seed)?;
        out.push(json!({ "label": v.label, "phi": v.phi, "replica_seed": seed, "benchmark": b }));
    }
    Ok(json!({ "preset": cfg.preset, "variants": out }))
}

/// Applies CLI overrides; the result is what gets written as config.json.
pub fn apply_overrides(
    mut cfg: ExperimentConfig,
    seed: Option<u64>,
    replicas: Option<u32>,
    out: Option<PathBuf>,
) -> Result<ExperimentConfig> {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(r) = replicas {
        cfg.replicas = r;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    cfg.validate()?;
    Ok(cfg)
}
