use serde::{Deserialize, Serialize};

use super::components::{ARM_COST, ARM_REWARD};
use super::{ArmEnvironment, ArmFeedback};
use crate::error::{invalid, Result};
use crate::rng::uniform;

/// Cost model of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    Fixed { value: f64 },
    /// Two-point law on `{lo, hi}` with the given mean.
    Stochastic { mean: f64, lo: f64, hi: f64 },
}

impl CostSpec {
    pub fn mean(&self) -> f64 {
        match *self {
            CostSpec::Fixed { value } => value,
            CostSpec::Stochastic { mean, .. } => mean,
        }
    }

    fn validate(&self, c_max: f64) -> Result<()> {
        let ok = match *self {
            CostSpec::Fixed { value } => (0.0..=c_max).contains(&value),
            CostSpec::Stochastic { mean, lo, hi } => {
                lo >= 0.0 && hi <= c_max && lo <= mean && mean <= hi && lo < hi
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("cost {self:?} not within [0, {c_max}]")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub p: f64,
    pub cost: CostSpec,
}

impl ArmSpec {
    pub fn fixed(p: f64, cost: f64) -> Self {
        ArmSpec { p, cost: CostSpec::Fixed { value: cost } }
    }

    fn is_null(&self) -> bool {
        self.p == 0.0 && self.cost == CostSpec::Fixed { value: 0.0 }
    }

    fn is_full(&self, c_max: f64) -> bool {
        self.p == 1.0 && self.cost == CostSpec::Fixed { value: c_max }
    }
}

/// Stationary arms with independent Bernoulli rewards.
#[derive(Debug, Clone)]
pub struct IidArms {
    specs: Vec<ArmSpec>,
    c_max: f64,
    i_min: usize,
    i_max: usize,
    seed: u64,
    t: u64,
}

/// Builds an i.i.d. arm world. When no arm is a guaranteed null arm
/// (p = 0, cost 0) or full arm (p = 1, cost `c_max`), one is appended.
pub fn make_iid_arms(specs: Vec<ArmSpec>, c_max: f64, seed: u64) -> Result<IidArms> {
    if specs.is_empty() {
        return Err(invalid("at least one arm is required"));
    }
    if !(c_max > 0.0 && c_max.is_finite()) {
        return Err(invalid(format!("c_max must be positive, got {c_max}")));
    }
    for s in &specs {
        if !(0.0..=1.0).contains(&s.p) {
            return Err(invalid(format!("arm mean reward {} outside [0, 1]", s.p)));
        }
        s.cost.validate(c_max)?;
    }
    let mut specs = specs;
    let i_min = match specs.iter().position(ArmSpec::is_null) {
        Some(i) => i,
        None => {
            specs.push(ArmSpec::fixed(0.0, 0.0));
            specs.len() - 1
        }
    };
    let i_max = match specs.iter().position(|s| s.is_full(c_max)) {
        Some(i) => i,
        None => {
            specs.push(ArmSpec::fixed(1.0, c_max));
            specs.len() - 1
        }
    };
    Ok(IidArms { specs, c_max, i_min, i_max, seed, t: 0 })
}

impl IidArms {
    pub fn specs(&self) -> &[ArmSpec] {
        &self.specs
    }
}

impl ArmEnvironment for IidArms {
    fn n_arms(&self) -> usize {
        self.specs.len()
    }
    fn c_max(&self) -> f64 {
        self.c_max
    }
    fn i_min(&self) -> usize {
        self.i_min
    }
    fn i_max(&self) -> usize {
        self.i_max
    }

    fn pull(&mut self, arm: usize) -> ArmFeedback {
        self.t += 1;
        let spec = self.specs[arm];
        let u = uniform(self.seed, ARM_REWARD + arm as u64, self.t);
        let reward = if u < spec.p { 1.0 } else { 0.0 };
        let cost = match spec.cost {
            CostSpec::Fixed { value } => value,
            CostSpec::Stochastic { mean, lo, hi } => {
                let v = uniform(self.seed, ARM_COST + arm as u64, self.t);
                if v < (mean - lo) / (hi - lo) {
                    hi
                } else {
                    lo
                }
            }
        };
        ArmFeedback { reward, cost }
    }

    fn arm_means(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((
            self.specs.iter().map(|s| s.p).collect(),
            self.specs.iter().map(|s| s.cost.mean()).collect(),
        ))
    }
}

/// Deterministic three-arm world: a safe arm (index 0, cost 1, always
/// succeeds), a cheap trap arm (index 1, cost 0.05) that fails during
/// `[window.0, window.1)`, and a zero arm (index 2, cost 0, never succeeds).
#[derive(Debug, Clone)]
pub struct TrapWorld {
    window: (u64, u64),
    t: u64,
}

pub const TRAP_COST: f64 = 0.05;

/// The window is 0-based in elapsed steps: step `t` (1-based) fails on the
/// trap arm iff `start <= t - 1 < end`.
pub fn make_adversarial_trap(_seed: u64, shift_window: (u64, u64)) -> Result<TrapWorld> {
    if shift_window.0 >= shift_window.1 {
        return Err(invalid("trap window must satisfy start < end"));
    }
    Ok(TrapWorld { window: shift_window, t: 0 })
}

impl TrapWorld {
    pub const SAFE: usize = 0;
    pub const TRAP: usize = 1;
    pub const ZERO: usize = 2;

    pub fn in_window(&self, t: u64) -> bool {
        let elapsed = t - 1;
        elapsed >= self.window.0 && elapsed < self.window.1
    }

    pub fn window(&self) -> (u64, u64) {
        self.window
    }
}

impl ArmEnvironment for TrapWorld {
    fn n_arms(&self) -> usize {
        3
    }
    fn c_max(&self) -> f64 {
        1.0
    }
    fn i_min(&self) -> usize {
        Self::ZERO
    }
    fn i_max(&self) -> usize {
        Self::SAFE
    }

    fn pull(&mut self, arm: usize) -> ArmFeedback {
        self.t += 1;
        match arm {
            Self::SAFE => ArmFeedback { reward: 1.0, cost: 1.0 },
            Self::TRAP => ArmFeedback {
                reward: if self.in_window(self.t) { 0.0 } else { 1.0 },
                cost: TRAP_COST,
            },
            _ => ArmFeedback { reward: 0.0, cost: 0.0 },
        }
    }

    /// Out-of-window means; the world is not stationary.
    fn arm_means(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((vec![1.0, 1.0, 0.0], vec![1.0, TRAP_COST, 0.0]))
    }
}

/// Arm world driven by an arbitrary script `(step, arm) -> feedback`. The
/// script is responsible for keeping `i_min` and `i_max` honest.
pub struct ScriptedArms<F> {
    n: usize,
    c_max: f64,
    i_min: usize,
    i_max: usize,
    script: F,
    t: u64,
}

impl<F: FnMut(u64, usize) -> ArmFeedback> ScriptedArms<F> {
    pub fn new(n: usize, c_max: f64, i_min: usize, i_max: usize, script: F) -> Self {
        ScriptedArms { n, c_max, i_min, i_max, script, t: 0 }
    }
}

impl<F: FnMut(u64, usize) -> ArmFeedback> ArmEnvironment for ScriptedArms<F> {
    fn n_arms(&self) -> usize {
        self.n
    }
    fn c_max(&self) -> f64 {
        self.c_max
    }
    fn i_min(&self) -> usize {
        self.i_min
    }
    fn i_max(&self) -> usize {
        self.i_max
    }
    fn pull(&mut self, arm: usize) -> ArmFeedback {
        self.t += 1;
        (self.script)(self.t, arm)
    }
}
