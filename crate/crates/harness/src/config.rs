use std::path::{Path, PathBuf};

use aci_core::env::{ArmSpec, PointDist};
use aci_core::StepSchedule;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    PdBandit,
    PdBanditProjected,
    PrimalThreshold,
    Newsvendor,
    AcogPrefix,
    AcogPosition,
}

/// Simulated world, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// Grid of sub-intervals of [0, 1]; the hidden point has law `dist`.
    Interval { delta: f64, dist: PointDist },
    /// Safe / trap / zero arms; the trap fails on elapsed steps `[window_start, window_end)`.
    Trap { window_start: u64, window_end: u64 },
    IidArms { arms: Vec<ArmSpec>, c_max: f64 },
    ScoreUniform { tau_min: f64, tau_max: f64 },
    PoissonDemand {
        lambda_before: f64,
        lambda_after: f64,
        /// Last step drawn at `lambda_before`.
        shift_t: u64,
        cap: f64,
        /// Leftover stock carries over (no-returns dynamics).
        carryover: bool,
    },
    /// OR of independent arms with `p_i ~ U[p_lo, p_hi]` drawn from the replica seed.
    OrWorld { n: usize, p_lo: f64, p_hi: f64 },
}

/// Step-size rule; `root_horizon` resolves to `scale / sqrt(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepRule {
    Constant { eta: f64 },
    RootHorizon { scale: f64 },
    PowerDecay { c: f64, p: f64, index_offset: u64 },
}

impl StepRule {
    pub fn resolve(&self, horizon: u64) -> aci_core::Result<StepSchedule> {
        match *self {
            StepRule::Constant { eta } => StepSchedule::constant(eta),
            StepRule::RootHorizon { scale } => StepSchedule::constant(scale / (horizon as f64).sqrt()),
            StepRule::PowerDecay { c, p, index_offset } => StepSchedule::power_decay(c, p, index_offset),
        }
    }
}

/// Per-variant overrides of the base run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<StepRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub algorithm: Algorithm,
    pub environment: EnvironmentSpec,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub phi: f64,
    pub schedule: StepRule,
    /// Starting value of the controlled state (tau_1 or q_1); the bandit
    /// dual and the AC-OG budget always start at 0.
    pub initial_state: f64,
    pub seed: u64,
    pub replicas: u32,
    pub output_dir: PathBuf,
    /// Empty for a single run.
    #[serde(default)]
    pub sweep: Vec<SweepEntry>,
}

/// One fully resolved variant.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub label: String,
    pub algorithm: Algorithm,
    pub environment: EnvironmentSpec,
    pub horizon: u64,
    pub phi: f64,
    pub schedule: StepRule,
    pub initial_state: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Base run followed by nothing, or one entry per sweep label.
    pub fn variants(&self) -> Vec<RunSpec> {
        let base = RunSpec {
            label: "base".into(),
            algorithm: self.algorithm,
            environment: self.environment.clone(),
            horizon: self.horizon,
            phi: self.phi,
            schedule: self.schedule,
            initial_state: self.initial_state,
        };
        if self.sweep.is_empty() {
            return vec![base];
        }
        self.sweep
            .iter()
            .map(|s| RunSpec {
                label: s.label.clone(),
                algorithm: s.algorithm.unwrap_or(base.algorithm),
                horizon: s.horizon.unwrap_or(base.horizon),
                schedule: s.schedule.unwrap_or(base.schedule),
                ..base.clone()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(HarnessError::config("replicas", "must be at least 1"));
        }
        let mut labels: Vec<&str> = self.sweep.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::config("sweep", "labels must be unique"));
        }
        if let Some(bad) = self.sweep.iter().find(|s| !valid_label(&s.label)) {
            return Err(HarnessError::config("sweep", format!("label {:?} must be non-empty [A-Za-z0-9._-]", bad.label)));
        }
        for v in self.variants() {
            v.validate()?;
        }
        Ok(())
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        let key = |k: &str| format!("{k} (variant {})", self.label);
        if self.horizon == 0 {
            return Err(HarnessError::config(&key("T"), "must be positive"));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(HarnessError::config(&key("phi"), format!("{} outside (0, 1)", self.phi)));
        }
        self.schedule
            .resolve(self.horizon)
            .map_err(|e| HarnessError::config(&key("schedule"), e.to_string()))?;
        use Algorithm::*;
        use EnvironmentSpec as E;
        let ok = matches!(
            (self.algorithm, &self.environment),
            (PdBandit | PdBanditProjected, E::Interval { .. } | E::Trap { .. } | E::IidArms { .. })
                | (PrimalThreshold, E::ScoreUniform { .. })
                | (Newsvendor, E::PoissonDemand { .. })
                | (AcogPrefix | AcogPosition, E::OrWorld { .. })
        );
        if !ok {
            return Err(HarnessError::config(
                &key("algorithm"),
                format!("{:?} cannot run on this environment", self.algorithm),
            ));
        }
        if let E::Trap { window_start, window_end } = self.environment {
            if window_start >= window_end || window_end > self.horizon {
                return Err(HarnessError::config(&key("environment"), "trap window must satisfy start < end <= T"));
            }
        }
        if let E::OrWorld { n, p_lo, p_hi } = self.environment {
            if n == 0 || !(0.0 <= p_lo && p_lo <= p_hi && p_hi <= 1.0) {
                return Err(HarnessError::config(&key("environment"), "or_world needs n >= 1 and 0 <= p_lo <= p_hi <= 1"));
            }
        }
        Ok(())
    }
}
