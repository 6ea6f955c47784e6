//! Built-in experiment configurations.

use std::path::PathBuf;

use aci_core::env::PointDist;

use crate::config::{Algorithm, EnvironmentSpec, ExperimentConfig, StepRule, SweepEntry};
use crate::error::{HarnessError, Result};

pub const PRESET_NAMES: [&str; 8] = [
    "interval-beta",
    "interval-eta-sweep",
    "adversarial-shift",
    "threshold-primal",
    "threshold-decay",
    "newsvendor-shift",
    "combinatorial-or",
    "regret-scaling",
];

pub const DEFAULT_SEED: u64 = 1;

/// Horizons of the regret-scaling sweep.
pub const SCALING_HORIZONS: [u64; 5] = [2000, 4000, 8000, 16000, 32000];

/// Decay exponents of the threshold-decay sweep.
pub const DECAY_EXPONENTS: [f64; 3] = [0.3, 0.5, 0.7];

fn beta_interval() -> EnvironmentSpec {
    EnvironmentSpec::Interval { delta: 0.05, dist: PointDist::Beta { a: 2.0, b: 5.0 } }
}

fn base(name: &str, algorithm: Algorithm, environment: EnvironmentSpec, horizon: u64, phi: f64, schedule: StepRule) -> ExperimentConfig {
    ExperimentConfig {
        preset: name.to_string(),
        algorithm,
        environment,
        horizon,
        phi,
        schedule,
        initial_state: 0.0,
        seed: DEFAULT_SEED,
        replicas: 1,
        output_dir: PathBuf::from("out").join(name),
        sweep: Vec::new(),
    }
}

fn label_f(prefix: &str, x: f64) -> String {
    format!("{prefix}-{x}")
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "interval-beta" => base(name, Algorithm::PdBandit, beta_interval(), 25_000, 0.8, StepRule::RootHorizon { scale: 2.0 }),
        "interval-eta-sweep" => {
            let mut c = base(name, Algorithm::PdBandit, beta_interval(), 25_000, 0.8, StepRule::RootHorizon { scale: 2.0 });
            c.sweep = [0.01, 0.05, 0.2]
                .iter()
                .map(|&eta| SweepEntry {
                    label: label_f("eta", eta),
                    algorithm: None,
                    horizon: None,
                    schedule: Some(StepRule::Constant { eta }),
                })
                .collect();
            c
        }
        "adversarial-shift" => {
            let horizon = 20_000;
            let env = EnvironmentSpec::Trap { window_start: horizon / 2, window_end: horizon / 2 + horizon / 4 };
            let mut c = base(name, Algorithm::PdBandit, env, horizon, 0.5, StepRule::RootHorizon { scale: 2.0 });
            c.sweep = vec![
                SweepEntry { label: "boundary".into(), algorithm: Some(Algorithm::PdBandit), horizon: None, schedule: None },
                SweepEntry {
                    label: "projected".into(),
                    algorithm: Some(Algorithm::PdBanditProjected),
                    horizon: None,
                    schedule: None,
                },
            ];
            c
        }
        "threshold-primal" => base(
            name,
            Algorithm::PrimalThreshold,
            EnvironmentSpec::ScoreUniform { tau_min: 0.0, tau_max: 1.0 },
            25_000,
            0.8,
            StepRule::RootHorizon { scale: 1.0 },
        ),
        "threshold-decay" => {
            let mut c = base(
                name,
                Algorithm::PrimalThreshold,
                EnvironmentSpec::ScoreUniform { tau_min: 0.0, tau_max: 1.0 },
                50_000,
                0.8,
                StepRule::PowerDecay { c: 1.0, p: 0.5, index_offset: 0 },
            );
            c.replicas = 20;
            c.sweep = DECAY_EXPONENTS
                .iter()
                .map(|&p| SweepEntry {
                    label: label_f("p", p),
                    algorithm: None,
                    horizon: None,
                    schedule: Some(StepRule::PowerDecay { c: 1.0, p, index_offset: 0 }),
                })
                .collect();
            c
        }
        "newsvendor-shift" => {
            let env = EnvironmentSpec::PoissonDemand {
                lambda_before: 20.0,
                lambda_after: 50.0,
                shift_t: 500,
                cap: 100.0,
                carryover: false,
            };
            let mut c = base(name, Algorithm::Newsvendor, env, 1000, 0.9, StepRule::PowerDecay { c: 5.0, p: 0.5, index_offset: 1 });
            c.initial_state = 1.0;
            c
        }
        "combinatorial-or" => {
            let n = 20;
            base(
                name,
                Algorithm::AcogPosition,
                EnvironmentSpec::OrWorld { n, p_lo: 0.05, p_hi: 0.30 },
                20_000,
                0.8,
                StepRule::RootHorizon { scale: n as f64 / 2.0 },
            )
        }
        "regret-scaling" => {
            let mut c = base(name, Algorithm::PdBandit, beta_interval(), 32_000, 0.8, StepRule::RootHorizon { scale: 2.0 });
            c.replicas = 20;
            c.sweep = SCALING_HORIZONS
                .iter()
                .map(|&t| SweepEntry { label: format!("T-{t}"), algorithm: None, horizon: Some(t), schedule: None })
                .collect();
            c
        }
        _ => return Err(HarnessError::UnknownPreset(name.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn preset_catalog() -> Vec<ExperimentConfig> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("built-in presets are valid")).collect()
}
