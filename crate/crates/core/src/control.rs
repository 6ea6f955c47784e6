//! Unprojected ACI update engine.
//!
//! Every controller in this crate (dual price, threshold, probing budget,
//! inventory level) is a scalar driven by
//!
//! ```text
//! value <- value + eta_t * (phi - Y_t)
//! ```
//!
//! with no projection. Consumers may clamp the *action* they derive from the
//! value, but the stored value is never touched, which is what makes the
//! telescoping identity in [`ValidityLedger`] exact.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, AciError, Result};

/// Step-size rule `eta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    /// `eta_t = c` for all t.
    Constant { c: f64 },
    /// `eta_t = c * (t + index_offset)^(-p)`.
    PowerDecay {
        c: f64,
        p: f64,
        #[serde(default)]
        index_offset: u64,
    },
}

impl StepSchedule {
    pub fn constant(c: f64) -> Result<Self> {
        let s = StepSchedule::Constant { c };
        s.validate()?;
        Ok(s)
    }

    pub fn power_decay(c: f64, p: f64, index_offset: u64) -> Result<Self> {
        let s = StepSchedule::PowerDecay { c, p, index_offset };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Constant { c } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(invalid(format!("step scale must be positive, got {c}")));
                }
            }
            StepSchedule::PowerDecay { c, p, .. } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(invalid(format!("step scale must be positive, got {c}")));
                }
                if !(0.0..1.0).contains(&p) {
                    return Err(invalid(format!("decay exponent must lie in [0, 1), got {p}")));
                }
            }
        }
        Ok(())
    }

    /// Step size at 1-based step index `t`.
    pub fn eta(&self, t: u64) -> f64 {
        match *self {
            StepSchedule::Constant { c } => c,
            StepSchedule::PowerDecay { c, p, index_offset } => {
                c * ((t + index_offset) as f64).powf(-p)
            }
        }
    }

    /// Largest step size the schedule ever produces (attained at t = 1).
    pub fn eta_max(&self) -> f64 {
        self.eta(1)
    }

    pub fn constant_eta(&self) -> Option<f64> {
        match *self {
            StepSchedule::Constant { c } => Some(c),
            StepSchedule::PowerDecay { .. } => None,
        }
    }
}

/// The ACI-controlled scalar together with its target and step schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub value: f64,
    pub target_phi: f64,
    pub schedule: StepSchedule,
    /// 1-based index of the *next* update.
    pub step_index: u64,
    /// Value at the last ledger reset.
    pub history_anchor: f64,
}

impl ControllerState {
    pub fn new(initial: f64, target_phi: f64, schedule: StepSchedule) -> Result<Self> {
        if !(target_phi > 0.0 && target_phi < 1.0) {
            return Err(invalid(format!("target phi must lie in (0, 1), got {target_phi}")));
        }
        if !initial.is_finite() {
            return Err(invalid("initial controller value must be finite"));
        }
        schedule.validate()?;
        Ok(ControllerState {
            value: initial,
            target_phi,
            schedule,
            step_index: 1,
            history_anchor: initial,
        })
    }

    /// Step size the next update will use.
    pub fn current_eta(&self) -> f64 {
        self.schedule.eta(self.step_index)
    }

    /// Apply one unprojected update in place and return the step size used.
    pub fn update(&mut self, reward: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(AciError::RewardOutOfRange(reward));
        }
        let eta = self.current_eta();
        self.value += eta * (self.target_phi - reward);
        self.step_index += 1;
        Ok(eta)
    }

    /// Start a fresh ledger window at the current value.
    pub fn open_ledger(&mut self) -> ValidityLedger {
        self.history_anchor = self.value;
        ValidityLedger::new(self.step_index, self.target_phi, self.schedule)
    }
}

/// Functional form of [`ControllerState::update`].
pub fn aci_update(state: &ControllerState, reward: f64) -> Result<ControllerState> {
    let mut next = state.clone();
    next.update(reward)?;
    Ok(next)
}

/// Running sum of rewards over a window, used to verify coverage exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityLedger {
    pub window_start: u64,
    pub reward_sum: f64,
    pub step_count: u64,
    pub target_phi: f64,
    pub eta_used: StepSchedule,
}

impl ValidityLedger {
    pub fn new(window_start: u64, target_phi: f64, eta_used: StepSchedule) -> Self {
        ValidityLedger {
            window_start,
            reward_sum: 0.0,
            step_count: 0,
            target_phi,
            eta_used,
        }
    }

    pub fn record(&mut self, reward: f64) {
        self.reward_sum += reward;
        self.step_count += 1;
    }

    pub fn coverage(&self) -> Option<f64> {
        (self.step_count > 0).then(|| self.reward_sum / self.step_count as f64)
    }
}

/// Residual of the telescoping identity
/// `(sum Y)/L - phi + (end - start)/(eta L)`, which is zero for any run
/// driven only by unprojected constant-step updates.
pub fn telescoping_check(ledger: &ValidityLedger, state_start: f64, state_end: f64) -> Result<f64> {
    let eta = ledger.eta_used.constant_eta().ok_or(AciError::NonConstantSchedule)?;
    if ledger.step_count == 0 {
        return Err(AciError::Empty("ledger window"));
    }
    let l = ledger.step_count as f64;
    Ok((ledger.reward_sum / l - ledger.target_phi) + (state_end - state_start) / (eta * l))
}

/// Worst-case deviation of windowed coverage from the target given an a-priori
/// bound on how far the state can move.
pub fn coverage_bound(state_range: f64, eta: f64, window_len: u64) -> Result<f64> {
    if state_range < 0.0 || eta <= 0.0 || window_len == 0 {
        return Err(invalid("coverage_bound needs range >= 0, eta > 0, L >= 1"));
    }
    Ok(state_range / (eta * window_len as f64))
}
