//! Primal-dual ACI bandit.
//!
//! The dual price `lambda` is driven by the unprojected ACI update on the
//! observed success bit. The primal step plays the arm minimizing the
//! optimistic Lagrangian `cost_lcb - lambda * reward_ucb`, except at the
//! boundary: `lambda >= cap` forces the full arm and `lambda <= 0` forces the
//! null arm. Those two forced plays keep `lambda` inside
//! `[-eta, cap + eta]` without ever projecting it.
//!
//! [`BanditMode::ProjectedBaseline`] is the comparison point: always play the
//! Lagrangian argmin and clip `lambda` to `[0, cap]` after every update.

use serde::{Deserialize, Serialize};

use crate::control::{ControllerState, StepSchedule};
use crate::env::{ArmEnvironment, PointDist};
use crate::error::{invalid, AciError, Result};
use crate::trace::{Action, Extras, TraceRecord};

/// Running statistics of one arm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub plays: u64,
    pub mean_reward: f64,
    pub mean_cost: f64,
}

impl ArmStats {
    pub fn observe(&mut self, reward: f64, cost: f64) {
        self.plays += 1;
        let k = self.plays as f64;
        self.mean_reward += (reward - self.mean_reward) / k;
        self.mean_cost += (cost - self.mean_cost) / k;
    }
}

/// Confidence width `sqrt(2 ln(nT) / plays)`.
pub fn confidence_width(log_nt: f64, plays: u64) -> f64 {
    (2.0 * log_nt / plays as f64).sqrt()
}

/// Optimistic reward and pessimistic-low cost, both unclipped.
pub fn ucb_bounds(stats: &ArmStats, n: usize, horizon_t: u64, c_max: f64) -> Result<(f64, f64)> {
    if stats.plays == 0 {
        return Err(AciError::Unplayed(usize::MAX));
    }
    let nt = n as f64 * horizon_t as f64;
    if nt < 3.0 {
        return Err(invalid("n * T must be at least 3"));
    }
    let width = confidence_width(nt.ln(), stats.plays);
    Ok((stats.mean_reward + width, stats.mean_cost - c_max * width))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BanditMode {
    BoundaryRule,
    ProjectedBaseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditConfig {
    pub n: usize,
    pub c_max: f64,
    pub phi: f64,
    pub horizon_t: u64,
    /// Dual cap `Lambda`.
    pub lambda_cap: f64,
    pub i_min: usize,
    pub i_max: usize,
    pub mode: BanditMode,
}

impl BanditConfig {
    /// Config matching `env`, with `Lambda = c_max / (1 - phi)`.
    pub fn for_env(env: &impl ArmEnvironment, phi: f64, horizon_t: u64, mode: BanditMode) -> Result<Self> {
        let c_max = env.c_max();
        let cfg = BanditConfig {
            n: env.n_arms(),
            c_max,
            phi,
            horizon_t,
            lambda_cap: c_max / (1.0 - phi),
            i_min: env.i_min(),
            i_max: env.i_max(),
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.i_min >= self.n || self.i_max >= self.n {
            return Err(invalid("arm indices out of range"));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(invalid(format!("phi must lie in (0, 1), got {}", self.phi)));
        }
        if !(self.lambda_cap > 0.0 && self.c_max > 0.0) {
            return Err(invalid("lambda cap and c_max must be positive"));
        }
        if (self.n as f64) * (self.horizon_t as f64) < 3.0 {
            return Err(invalid("n * T must be at least 3"));
        }
        Ok(())
    }

    fn log_nt(&self) -> f64 {
        (self.n as f64 * self.horizon_t as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditState {
    pub dual: ControllerState,
    pub stats: Vec<ArmStats>,
    /// Steps completed so far.
    pub step: u64,
}

impl BanditState {
    /// Fresh state with `lambda_1 = 0`.
    pub fn new(cfg: &BanditConfig, schedule: StepSchedule) -> Result<Self> {
        cfg.validate()?;
        Ok(BanditState {
            dual: ControllerState::new(0.0, cfg.phi, schedule)?,
            stats: vec![ArmStats::default(); cfg.n],
            step: 0,
        })
    }

    pub fn initialized(&self) -> bool {
        self.step as usize >= self.stats.len()
    }
}

/// Arm chosen after initialization, plus whether a boundary branch fired.
pub fn select_arm(state: &BanditState, cfg: &BanditConfig) -> Result<(usize, bool)> {
    let lambda = state.dual.value;
    if cfg.mode == BanditMode::BoundaryRule {
        if lambda >= cfg.lambda_cap {
            return Ok((cfg.i_max, true));
        }
        if lambda <= 0.0 {
            return Ok((cfg.i_min, true));
        }
    }
    let log_nt = cfg.log_nt();
    let mut best = usize::MAX;
    let mut best_score = f64::INFINITY;
    for (i, s) in state.stats.iter().enumerate() {
        if s.plays == 0 {
            return Err(AciError::Unplayed(i));
        }
        let w = confidence_width(log_nt, s.plays);
        let score = (s.mean_cost - cfg.c_max * w) - lambda * (s.mean_reward + w);
        // strict comparison keeps the lowest index on ties
        if score < best_score || best == usize::MAX {
            best = i;
            best_score = score;
        }
    }
    Ok((best, false))
}

/// One step: initialization plays arms `0..n` in order, then the primal rule.
/// The dual is updated with the observed reward at every step.
pub fn bandit_step(state: &mut BanditState, cfg: &BanditConfig, env: &mut impl ArmEnvironment) -> Result<TraceRecord> {
    let (arm, forced) = if state.initialized() {
        select_arm(state, cfg)?
    } else {
        (state.step as usize, false)
    };
    let fb = env.pull(arm);
    if !(0.0..=cfg.c_max).contains(&fb.cost) {
        return Err(AciError::CostOutOfRange { arm, cost: fb.cost, c_max: cfg.c_max });
    }
    let lambda = state.dual.value;
    let eta = state.dual.update(fb.reward)?;
    let mut boundary = forced;
    if cfg.mode == BanditMode::ProjectedBaseline {
        let clipped = state.dual.value.clamp(0.0, cfg.lambda_cap);
        boundary = clipped != state.dual.value;
        state.dual.value = clipped;
    }
    state.stats[arm].observe(fb.reward, fb.cost);
    state.step += 1;
    Ok(TraceRecord {
        t: state.step,
        action: Action::Arm(arm),
        reward: fb.reward,
        cost: fb.cost,
        state: lambda,
        state_next: state.dual.value,
        eta,
        boundary,
        extras: Extras::Bandit,
    })
}

/// Runs `cfg.horizon_t` steps from a fresh state.
pub fn run_bandit(
    cfg: &BanditConfig,
    schedule: StepSchedule,
    env: &mut impl ArmEnvironment,
) -> Result<(Vec<TraceRecord>, BanditState)> {
    let mut state = BanditState::new(cfg, schedule)?;
    let mut trace = Vec::with_capacity(cfg.horizon_t as usize);
    for _ in 0..cfg.horizon_t {
        trace.push(bandit_step(&mut state, cfg, env)?);
    }
    Ok((trace, state))
}

/// Threshold grid `tau_min, tau_min + delta, ...` with the last point forced
/// to `tau_max`.
pub fn discretize_threshold(tau_min: f64, tau_max: f64, delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(invalid(format!("grid width must be positive, got {delta}")));
    }
    if !(tau_max > tau_min) || delta > tau_max - tau_min {
        return Err(invalid("need tau_max > tau_min and delta <= tau_max - tau_min"));
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let x = tau_min + k as f64 * delta;
        if x >= tau_max - 1e-12 * (tau_max - tau_min) {
            break;
        }
        grid.push(x);
        k += 1;
    }
    grid.push(tau_max);
    Ok(grid)
}

/// One arm of the interval grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IntervalArm {
    Empty,
    /// `[i / m, j / m]` with `i < j`.
    Closed { i: usize, j: usize, lo: f64, hi: f64 },
}

impl IntervalArm {
    pub fn contains(&self, y: f64) -> bool {
        match *self {
            IntervalArm::Empty => false,
            IntervalArm::Closed { lo, hi, .. } => lo <= y && y <= hi,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            IntervalArm::Empty => 0.0,
            IntervalArm::Closed { lo, hi, .. } => hi - lo,
        }
    }

    pub fn lo(&self) -> Option<f64> {
        match *self {
            IntervalArm::Empty => None,
            IntervalArm::Closed { lo, .. } => Some(lo),
        }
    }

    pub fn mass(&self, dist: &PointDist) -> f64 {
        match *self {
            IntervalArm::Empty => 0.0,
            IntervalArm::Closed { lo, hi, .. } => dist.mass(lo, hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub delta: f64,
    pub m: usize,
    /// Empty arm first, then `[i, j]` in lexicographic order.
    pub arms: Vec<IntervalArm>,
    pub empty_index: usize,
    pub full_index: usize,
}

/// All grid intervals `[i delta, j delta]`, `0 <= i < j <= m`, plus the empty arm.
pub fn discretize_intervals(delta: f64) -> Result<IntervalGrid> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("grid width must lie in (0, 1], got {delta}")));
    }
    let m_real = 1.0 / delta;
    let m = m_real.round();
    if (m * delta - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("grid width {delta} does not divide 1")));
    }
    let m = m as usize;
    let mut arms = Vec::with_capacity(m * (m + 1) / 2 + 1);
    arms.push(IntervalArm::Empty);
    let mut full_index = 0;
    for i in 0..m {
        for j in (i + 1)..=m {
            if i == 0 && j == m {
                full_index = arms.len();
            }
            arms.push(IntervalArm::Closed {
                i,
                j,
                lo: i as f64 / m as f64,
                hi: j as f64 / m as f64,
            });
        }
    }
    Ok(IntervalGrid { delta, m, arms, empty_index: 0, full_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_iid_arms, ArmSpec, ScriptedArms};
    use approx::assert_abs_diff_eq;

    fn stats(mu: f64, chi: f64, plays: u64) -> ArmStats {
        ArmStats { plays, mean_reward: mu, mean_cost: chi }
    }

    #[test]
    fn ucb_examples() {
        // sqrt(2 ln 16 / 4) = 1.1774100225154747 (scipy)
        let (r, c) = ucb_bounds(&stats(0.5, 0.3, 4), 2, 8, 1.0).unwrap();
        assert_abs_diff_eq!(r, 0.5 + 1.177_410_022_515_474_7, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 0.3 - 1.177_410_022_515_474_7, epsilon = 1e-12);

        let (r, c) = ucb_bounds(&stats(1.0, 2.0, 1_000_000_000_000), 2, 10, 2.0).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(c, 2.0, epsilon = 1e-5);

        // sqrt(2 ln 3) = 1.4823038073675112
        let (r, c) = ucb_bounds(&stats(0.0, 0.0, 1), 1, 3, 0.5).unwrap();
        assert_abs_diff_eq!(r, 1.482_303_807_367_511_2, epsilon = 1e-12);
        assert_abs_diff_eq!(c, -0.5 * 1.482_303_807_367_511_2, epsilon = 1e-12);

        assert!(ucb_bounds(&stats(0.0, 0.0, 0), 2, 8, 1.0).is_err());
    }

    fn cfg3(mode: BanditMode) -> BanditConfig {
        BanditConfig {
            n: 3,
            c_max: 1.0,
            phi: 0.5,
            horizon_t: 100,
            lambda_cap: 2.0,
            i_min: 2,
            i_max: 0,
            mode,
        }
    }

    fn played_state(cfg: &BanditConfig, lambda: f64) -> BanditState {
        let mut s = BanditState::new(cfg, StepSchedule::constant(0.1).unwrap()).unwrap();
        s.dual.value = lambda;
        s.stats = vec![stats(1.0, 1.0, 5), stats(0.6, 0.1, 5), stats(0.0, 0.0, 5)];
        s.step = 15;
        s
    }

    #[test]
    fn boundary_branches() {
        let cfg = cfg3(BanditMode::BoundaryRule);
        assert_eq!(select_arm(&played_state(&cfg, 2.0), &cfg).unwrap(), (0, true));
        assert_eq!(select_arm(&played_state(&cfg, -0.001), &cfg).unwrap(), (2, true));
        assert_eq!(select_arm(&played_state(&cfg, 0.0), &cfg).unwrap(), (2, true));
        let proj = cfg3(BanditMode::ProjectedBaseline);
        assert!(!select_arm(&played_state(&proj, 2.0), &proj).unwrap().1);
    }

    #[test]
    fn argmin_with_direct_scores() {
        // widths vanish at huge play counts, leaving raw (cost, reward)
        let cfg = BanditConfig { n: 2, i_min: 0, i_max: 1, ..cfg3(BanditMode::BoundaryRule) };
        let mut s = BanditState::new(&cfg, StepSchedule::constant(0.1).unwrap()).unwrap();
        s.stats = vec![stats(0.9, 0.5, 1 << 60), stats(0.3, 0.2, 1 << 60)];
        s.step = 2;
        s.dual.value = 1.0;
        assert_eq!(select_arm(&s, &cfg).unwrap(), (0, false));
        // equal scores resolve to the lowest index
        s.stats = vec![stats(0.3, 0.2, 1 << 60), stats(0.3, 0.2, 1 << 60)];
        assert_eq!(select_arm(&s, &cfg).unwrap().0, 0);
    }

    #[test]
    fn initialization_plays_in_order() {
        let mut env = make_iid_arms(
            vec![ArmSpec::fixed(0.0, 0.0), ArmSpec::fixed(0.5, 0.4), ArmSpec::fixed(1.0, 1.0), ArmSpec::fixed(0.7, 0.6)],
            1.0,
            1,
        )
        .unwrap();
        let cfg = BanditConfig::for_env(&env, 0.8, 50, BanditMode::BoundaryRule).unwrap();
        let (trace, state) = run_bandit(&cfg, StepSchedule::constant(0.1).unwrap(), &mut env).unwrap();
        let first: Vec<_> = trace[..4].iter().map(|r| r.action.clone()).collect();
        assert_eq!(first, vec![Action::Arm(0), Action::Arm(1), Action::Arm(2), Action::Arm(3)]);
        assert_eq!(state.stats.iter().map(|s| s.plays).sum::<u64>(), 50);
    }

    #[test]
    fn zero_reward_raises_dual() {
        let cfg = cfg3(BanditMode::BoundaryRule);
        let mut s = played_state(&cfg, 0.5);
        // interior: argmin picks trap arm 1; script makes it fail
        let mut env = ScriptedArms::new(3, 1.0, 2, 0, |_, arm| match arm {
            0 => crate::env::ArmFeedback { reward: 1.0, cost: 1.0 },
            _ => crate::env::ArmFeedback { reward: 0.0, cost: 0.0 },
        });
        let rec = bandit_step(&mut s, &cfg, &mut env).unwrap();
        assert_eq!(rec.reward, 0.0);
        assert_abs_diff_eq!(s.dual.value, 0.5 + 0.1 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn projected_dual_stays_in_box() {
        let cfg = cfg3(BanditMode::ProjectedBaseline);
        let mut s = played_state(&cfg, 1.99);
        let mut env = ScriptedArms::new(3, 1.0, 2, 0, |_, _| crate::env::ArmFeedback { reward: 0.0, cost: 0.0 });
        for _ in 0..50 {
            bandit_step(&mut s, &cfg, &mut env).unwrap();
            assert!((0.0..=2.0).contains(&s.dual.value));
        }
        assert_eq!(s.dual.value, 2.0);
    }

    #[test]
    fn rejects_out_of_range_cost() {
        let cfg = cfg3(BanditMode::BoundaryRule);
        let mut s = BanditState::new(&cfg, StepSchedule::constant(0.1).unwrap()).unwrap();
        let mut env = ScriptedArms::new(3, 1.0, 2, 0, |_, _| crate::env::ArmFeedback { reward: 1.0, cost: 1.5 });
        assert!(matches!(bandit_step(&mut s, &cfg, &mut env), Err(AciError::CostOutOfRange { .. })));
    }

    #[test]
    fn threshold_grids() {
        assert_eq!(discretize_threshold(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(discretize_threshold(0.0, 1.0, 1.0).unwrap(), vec![0.0, 1.0]);
        let g = discretize_threshold(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_abs_diff_eq!(g[3], 0.9, epsilon = 1e-12);
        assert_eq!(g[4], 1.0);
        assert!(discretize_threshold(0.0, 1.0, 0.0).is_err());
        assert!(discretize_threshold(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn interval_grids() {
        let g = discretize_intervals(0.25).unwrap();
        assert_eq!(g.arms.len(), 11);
        assert_eq!(g.arms[g.empty_index], IntervalArm::Empty);
        assert_eq!(g.arms[g.full_index].length(), 1.0);
        let g = discretize_intervals(1.0).unwrap();
        assert_eq!(g.arms.len(), 2);
        let g = discretize_intervals(0.05).unwrap();
        assert_eq!((g.m, g.arms.len()), (20, 211));
        assert!(discretize_intervals(0.3).is_err());
        assert!(discretize_intervals(0.0).is_err());
    }
}
