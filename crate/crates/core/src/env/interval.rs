use super::components::POINTS;
use super::{ArmEnvironment, ArmFeedback, PointDist};
use crate::bandit::{discretize_intervals, IntervalArm, IntervalGrid};
use crate::error::Result;
use crate::rng::SplitMix64;

/// Online interval selection: each step a hidden point `y_t` is drawn on
/// [0, 1]; playing an interval reveals only whether it contains `y_t`.
#[derive(Debug, Clone)]
pub struct IntervalWorld {
    grid: IntervalGrid,
    dist: PointDist,
    seed: u64,
    t: u64,
    last_point: Option<f64>,
}

pub fn make_interval_world(delta: f64, point_dist: PointDist, seed: u64) -> Result<IntervalWorld> {
    point_dist.validate()?;
    let grid = discretize_intervals(delta)?;
    Ok(IntervalWorld { grid, dist: point_dist, seed, t: 0, last_point: None })
}

impl IntervalWorld {
    pub fn grid(&self) -> &IntervalGrid {
        &self.grid
    }

    pub fn dist(&self) -> PointDist {
        self.dist
    }

    /// Debug side channel, never routed to an algorithm.
    pub fn last_point_debug(&self) -> Option<f64> {
        self.last_point
    }

    fn point(&self, t: u64) -> f64 {
        self.dist.sample(&mut SplitMix64::for_step(self.seed, POINTS, t))
    }
}

impl ArmEnvironment for IntervalWorld {
    fn n_arms(&self) -> usize {
        self.grid.arms.len()
    }
    fn c_max(&self) -> f64 {
        1.0
    }
    fn i_min(&self) -> usize {
        self.grid.empty_index
    }
    fn i_max(&self) -> usize {
        self.grid.full_index
    }

    fn pull(&mut self, arm: usize) -> ArmFeedback {
        self.t += 1;
        let y = self.point(self.t);
        self.last_point = Some(y);
        let a: IntervalArm = self.grid.arms[arm];
        ArmFeedback {
            reward: if a.contains(y) { 1.0 } else { 0.0 },
            cost: a.length(),
        }
    }

    fn arm_means(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let p = self.grid.arms.iter().map(|a| a.mass(&self.dist)).collect();
        let w = self.grid.arms.iter().map(|a| a.length()).collect();
        Some((p, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_arms_behave() {
        let mut env = make_interval_world(0.25, PointDist::Beta { a: 2.0, b: 5.0 }, 3).unwrap();
        let (lo, hi) = (env.i_min(), env.i_max());
        for _ in 0..200 {
            assert_eq!(env.pull(hi), ArmFeedback { reward: 1.0, cost: 1.0 });
            assert_eq!(env.pull(lo), ArmFeedback { reward: 0.0, cost: 0.0 });
        }
    }

    #[test]
    fn containment_matches_hidden_point() {
        let mut env = make_interval_world(0.05, PointDist::Uniform, 9).unwrap();
        let arm = env
            .grid()
            .arms
            .iter()
            .position(|a| matches!(a, IntervalArm::Closed { i: 2, j: 7, .. }))
            .unwrap();
        for _ in 0..1000 {
            let fb = env.pull(arm);
            let y = env.last_point_debug().unwrap();
            assert_eq!(fb.reward == 1.0, (0.1..=0.35).contains(&y));
            assert!((fb.cost - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn success_rate_tracks_beta_mass() {
        let dist = PointDist::Beta { a: 2.0, b: 5.0 };
        let mut env = make_interval_world(0.05, dist, 17).unwrap();
        let arm = env
            .grid()
            .arms
            .iter()
            .position(|a| matches!(a, IntervalArm::Closed { i: 0, j: 9, .. }))
            .unwrap();
        let n = 100_000;
        let hits: f64 = (0..n).map(|_| env.pull(arm).reward).sum();
        let p = 0.836_432_578_125;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits / n as f64 - p).abs() < 4.0 * sd);
    }

    #[test]
    fn replay_is_deterministic() {
        let mk = || make_interval_world(0.1, PointDist::Beta { a: 2.0, b: 5.0 }, 42).unwrap();
        let (mut a, mut b) = (mk(), mk());
        for t in 0..500 {
            let arm = (t * 7) % a.n_arms();
            assert_eq!(a.pull(arm), b.pull(arm));
        }
    }
}
