//! Simulated worlds.
//!
//! Each environment advances its own step counter on every query and draws
//! all randomness from [`crate::rng::derive_seed`], so observations are a pure
//! function of `(seed, step, action)`.

mod arms;
mod beta;
mod demand;
mod or_world;
mod score;

pub use arms::{make_adversarial_trap, make_iid_arms, ArmSpec, CostSpec, IidArms, ScriptedArms, TrapWorld};
pub use beta::{adaptive_simpson, CdfTable, PointDist};
pub use demand::{make_poisson_demand, DemandStream, DiscreteDist, PoissonDemand};
pub use or_world::{make_or_world, or_value, OrWorld, ScriptedSet};
pub use score::{make_score_world, ScoreWorld};

mod interval;
pub use interval::{make_interval_world, IntervalWorld};

/// Component ids used for seed derivation.
pub mod components {
    pub const POINTS: u64 = 1;
    pub const SCORES: u64 = 2;
    pub const DEMAND: u64 = 3;
    pub const ARM_COST: u64 = 1 << 20;
    pub const ARM_REWARD: u64 = 1 << 32;
    pub const P_VECTOR: u64 = 1 << 40;
}

/// Everything the algorithm sees after pulling one arm. Deliberately nothing
/// else: in the interval world the realized point stays hidden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmFeedback {
    pub reward: f64,
    pub cost: f64,
}

/// Discrete-arm world with bandit feedback.
pub trait ArmEnvironment {
    fn n_arms(&self) -> usize;
    fn c_max(&self) -> f64;
    /// Arm with reward 0 and cost 0 at every step.
    fn i_min(&self) -> usize;
    /// Arm with reward 1 and cost `c_max` at every step.
    fn i_max(&self) -> usize;
    /// Play `arm` at the next step.
    fn pull(&mut self, arm: usize) -> ArmFeedback;
    /// True mean reward and mean cost per arm, when the world is stationary.
    fn arm_means(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
}

/// Outcome of running the black-box routine at a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdFeedback {
    pub reward: f64,
    pub cost: f64,
}

/// Scalar-threshold world: success is monotone in the submitted threshold.
pub trait ThresholdEnvironment {
    fn bounds(&self) -> (f64, f64);
    fn respond(&mut self, tau: f64) -> ThresholdFeedback;
}

/// Monotone set-function world with semi-bandit feedback along a chain.
pub trait SetEnvironment {
    fn n(&self) -> usize;
    /// Values `v_t(S_0), ..., v_t(S_K)` of every prefix of `chain`, where
    /// `S_0` is empty. Advances time by one step.
    fn probe(&mut self, chain: &[usize]) -> Vec<f64>;
    /// Expected value `f(S)`, if known in closed form.
    fn expected_value(&self, _set: &[usize]) -> Option<f64> {
        None
    }
}

impl<E: ArmEnvironment + ?Sized> ArmEnvironment for Box<E> {
    fn n_arms(&self) -> usize {
        (**self).n_arms()
    }
    fn c_max(&self) -> f64 {
        (**self).c_max()
    }
    fn i_min(&self) -> usize {
        (**self).i_min()
    }
    fn i_max(&self) -> usize {
        (**self).i_max()
    }
    fn pull(&mut self, arm: usize) -> ArmFeedback {
        (**self).pull(arm)
    }
    fn arm_means(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        (**self).arm_means()
    }
}
