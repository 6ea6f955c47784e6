use super::components::SCORES;
use super::{ThresholdEnvironment, ThresholdFeedback};
use crate::error::{invalid, Result};
use crate::rng::uniform;

type Quantile = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type CostFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Fixed scoring rule with a hidden per-step critical threshold `tau_x`:
/// the routine succeeds iff the submitted threshold is at least `tau_x`.
pub struct ScoreWorld {
    tau_min: f64,
    tau_max: f64,
    quantile: Quantile,
    cost_fn: CostFn,
    seed: u64,
    t: u64,
}

impl std::fmt::Debug for ScoreWorld {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScoreWorld")
            .field("tau_min", &self.tau_min)
            .field("tau_max", &self.tau_max)
            .field("t", &self.t)
            .finish_non_exhaustive()
    }
}

/// `tau_quantile` maps a uniform draw to `tau_x` (the inverse CDF of its
/// law); `cost_fn(tau_x, tau)` must be non-decreasing in `tau`.
pub fn make_score_world(
    tau_min: f64,
    tau_max: f64,
    tau_quantile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    cost_fn: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    seed: u64,
) -> Result<ScoreWorld> {
    if !(tau_max > tau_min) {
        return Err(invalid(format!("need tau_max > tau_min, got [{tau_min}, {tau_max}]")));
    }
    Ok(ScoreWorld {
        tau_min,
        tau_max,
        quantile: Box::new(tau_quantile),
        cost_fn: Box::new(cost_fn),
        seed,
        t: 0,
    })
}

impl ScoreWorld {
    /// `tau_x ~ Uniform[tau_min, tau_max]`, cost equal to the threshold.
    /// Then `r(tau)` is linear with slope `1/Q` and `c(tau) = tau`.
    pub fn uniform(tau_min: f64, tau_max: f64, seed: u64) -> Result<Self> {
        make_score_world(tau_min, tau_max, move |u| tau_min + u * (tau_max - tau_min), |_, tau| tau, seed)
    }

    /// Hidden critical threshold at 1-based step `t`.
    pub fn tau_x(&self, t: u64) -> f64 {
        (self.quantile)(uniform(self.seed, SCORES, t)).clamp(self.tau_min, self.tau_max)
    }
}

impl ThresholdEnvironment for ScoreWorld {
    fn bounds(&self) -> (f64, f64) {
        (self.tau_min, self.tau_max)
    }

    fn respond(&mut self, tau: f64) -> ThresholdFeedback {
        self.t += 1;
        let tau_x = self.tau_x(self.t);
        ThresholdFeedback {
            reward: if tau >= tau_x { 1.0 } else { 0.0 },
            cost: (self.cost_fn)(tau_x, tau),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries() {
        let mut w = ScoreWorld::uniform(0.0, 1.0, 4).unwrap();
        for _ in 0..1000 {
            assert_eq!(w.respond(1.0).reward, 1.0);
        }
        let mut w = ScoreWorld::uniform(0.0, 1.0, 4).unwrap();
        let wins: f64 = (0..1000).map(|_| w.respond(0.0).reward).sum();
        assert_eq!(wins, 0.0);
    }

    #[test]
    fn success_probability_is_linear() {
        let mut w = ScoreWorld::uniform(0.0, 1.0, 8).unwrap();
        let n = 100_000;
        let wins: f64 = (0..n).map(|_| w.respond(0.8).reward).sum();
        let sd = (0.8f64 * 0.2 / n as f64).sqrt();
        assert!((wins / n as f64 - 0.8).abs() < 4.0 * sd);
    }

    #[test]
    fn monotone_single_jump() {
        let w = ScoreWorld::uniform(-1.0, 2.0, 1).unwrap();
        for t in 1..200 {
            let tx = w.tau_x(t);
            let ys: Vec<bool> = (0..=60).map(|k| -1.0 + k as f64 * 0.05 >= tx).collect();
            let jumps = ys.windows(2).filter(|p| p[0] != p[1]).count();
            assert!(jumps <= 1);
            assert!(ys.windows(2).all(|p| !p[0] || p[1]));
        }
    }
}
