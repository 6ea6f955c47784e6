//! Memoryless primal controllers: the threshold calibrator and the
//! conformal base-stock inventory policy.

use serde::{Deserialize, Serialize};

use crate::control::{ControllerState, StepSchedule};
use crate::env::{DemandStream, ThresholdEnvironment};
use crate::error::{invalid, AciError, Result};
use crate::trace::{Action, Extras, TraceRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub phi: f64,
    pub schedule: StepSchedule,
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_max > self.tau_min) {
            return Err(invalid("need tau_max > tau_min"));
        }
        self.schedule.validate()
    }

    pub fn range(&self) -> f64 {
        self.tau_max - self.tau_min
    }

    /// Fresh controller at `initial` (unclamped).
    pub fn start(&self, initial: f64) -> Result<ControllerState> {
        self.validate()?;
        ControllerState::new(initial, self.phi, self.schedule)
    }
}

/// Submit `clamp(tau, tau_min, tau_max)`, then update the raw `tau` with the
/// observed success bit.
pub fn threshold_step(
    tau: &mut ControllerState,
    cfg: &ThresholdConfig,
    env: &mut impl ThresholdEnvironment,
) -> Result<TraceRecord> {
    let raw = tau.value;
    let effective = raw.clamp(cfg.tau_min, cfg.tau_max);
    let fb = env.respond(effective);
    if fb.reward != 0.0 && fb.reward != 1.0 {
        return Err(AciError::NonBinaryReward(fb.reward));
    }
    let t = tau.step_index;
    let eta = tau.update(fb.reward)?;
    Ok(TraceRecord {
        t,
        action: Action::Threshold(effective),
        reward: fb.reward,
        cost: fb.cost,
        state: raw,
        state_next: tau.value,
        eta,
        boundary: effective != raw,
        extras: Extras::Threshold,
    })
}

pub fn run_threshold(
    cfg: &ThresholdConfig,
    initial: f64,
    horizon: u64,
    env: &mut impl ThresholdEnvironment,
) -> Result<(Vec<TraceRecord>, ControllerState)> {
    let mut tau = cfg.start(initial)?;
    let mut trace = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        trace.push(threshold_step(&mut tau, cfg, env)?);
    }
    Ok((trace, tau))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsvendorConfig {
    /// Demand cap `D`; inventory above it is treated as `D`.
    pub demand_cap: f64,
    pub phi: f64,
    pub schedule: StepSchedule,
    /// Leftover stock carries over; requires every step size in (0, 1).
    pub dynamic_carryover: bool,
}

impl NewsvendorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.demand_cap >= 1.0) {
            return Err(invalid("demand cap must be at least 1"));
        }
        self.schedule.validate()?;
        if self.dynamic_carryover && self.schedule.eta_max() >= 1.0 {
            return Err(invalid(format!(
                "carry-over mode needs step sizes in (0, 1), schedule starts at {}",
                self.schedule.eta_max()
            )));
        }
        Ok(())
    }

    pub fn start(&self, initial: f64) -> Result<ControllerState> {
        self.validate()?;
        if initial < 0.0 {
            return Err(invalid("initial inventory must be non-negative"));
        }
        ControllerState::new(initial, self.phi, self.schedule)
    }
}

/// Base-stock update `q <- q + eta (phi a - min(a, q_eff))`.
///
/// The controller's reward is the fill fraction `y / a`; scaling the ACI step
/// by `a` gives exactly the inventory update.
pub fn newsvendor_step(q: &mut ControllerState, cfg: &NewsvendorConfig, demand: f64) -> Result<TraceRecord> {
    if !(1.0..=cfg.demand_cap).contains(&demand) {
        return Err(AciError::DemandOutOfRange { demand, cap: cfg.demand_cap });
    }
    let raw = q.value;
    let q_eff = raw.min(cfg.demand_cap);
    let fulfilled = demand.min(q_eff).max(0.0);
    let leftover = (q_eff - demand).max(0.0);
    let t = q.step_index;
    let eta = q.current_eta();
    q.value = raw + eta * (q.target_phi * demand - fulfilled);
    q.step_index += 1;
    if cfg.dynamic_carryover && q.value < leftover {
        return Err(invalid(format!(
            "no-returns violated at step {t}: next level {} below leftover {leftover}",
            q.value
        )));
    }
    Ok(TraceRecord {
        t,
        action: Action::Inventory(q_eff),
        reward: fulfilled / demand,
        cost: q_eff,
        state: raw,
        state_next: q.value,
        eta,
        boundary: q_eff != raw,
        extras: Extras::Newsvendor { demand, fulfilled, q_eff, leftover },
    })
}

pub fn run_newsvendor(
    cfg: &NewsvendorConfig,
    initial: f64,
    horizon: u64,
    demand: &mut impl DemandStream,
) -> Result<(Vec<TraceRecord>, ControllerState)> {
    let mut q = cfg.start(initial)?;
    let mut trace = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let a = demand.next_demand();
        trace.push(newsvendor_step(&mut q, cfg, a)?);
    }
    Ok((trace, q))
}

/// Fraction of demand served, `sum y / sum a`.
pub fn fill_rate(trace: &[TraceRecord]) -> Result<f64> {
    let mut served = 0.0;
    let mut asked = 0.0;
    for r in trace {
        if let Extras::Newsvendor { demand, fulfilled, .. } = r.extras {
            served += fulfilled;
            asked += demand;
        }
    }
    if asked == 0.0 {
        return Err(AciError::Empty("newsvendor trace"));
    }
    Ok(served / asked)
}
