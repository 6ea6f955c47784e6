//! AC-OG: an expert chain picks an ordered probe set whose length is set by
//! an ACI-controlled continuous budget `theta`.
//!
//! Expert `k` keeps UCB statistics of the marginal gain of each arm at
//! position `k`. With [`ChainVariant::PrefixKeyed`] the statistics are
//! conditioned on the exact set of arms ahead of it (OG-UCB); with
//! [`ChainVariant::PositionKeyed`] only on the position.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bandit::{confidence_width, ArmStats};
use crate::control::{ControllerState, StepSchedule};
use crate::env::SetEnvironment;
use crate::error::{invalid, Result};
use crate::trace::{Action, Extras, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainVariant {
    PrefixKeyed,
    PositionKeyed,
}

#[derive(Debug, Clone)]
pub struct ChainStats {
    n: usize,
    variant: ChainVariant,
    log_nt: f64,
    width_scale: f64,
    by_prefix: HashMap<Vec<usize>, Vec<ArmStats>>,
    by_position: Vec<Vec<ArmStats>>,
}

impl ChainStats {
    pub fn new(n: usize, horizon_t: u64, variant: ChainVariant) -> Result<Self> {
        if n == 0 {
            return Err(invalid("chain needs at least one arm"));
        }
        let nt = n as f64 * horizon_t as f64;
        if nt < 3.0 {
            return Err(invalid("n * T must be at least 3"));
        }
        let by_position = match variant {
            ChainVariant::PositionKeyed => vec![vec![ArmStats::default(); n]; n],
            ChainVariant::PrefixKeyed => Vec::new(),
        };
        Ok(ChainStats {
            n,
            variant,
            log_nt: nt.ln(),
            width_scale: 1.0,
            by_prefix: HashMap::new(),
            by_position,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> ChainVariant {
        self.variant
    }

    /// Multiplier on the confidence width; 0 turns the chain greedy on the
    /// current means.
    pub fn set_width_scale(&mut self, scale: f64) {
        self.width_scale = scale;
    }

    /// Number of distinct prefix contexts stored.
    pub fn contexts(&self) -> usize {
        match self.variant {
            ChainVariant::PrefixKeyed => self.by_prefix.len(),
            ChainVariant::PositionKeyed => self.n,
        }
    }

    fn key(prefix: &[usize]) -> Vec<usize> {
        let mut k = prefix.to_vec();
        k.sort_unstable();
        k
    }

    fn row(&self, prefix: &[usize]) -> Option<&[ArmStats]> {
        match self.variant {
            ChainVariant::PrefixKeyed => self.by_prefix.get(&Self::key(prefix)).map(Vec::as_slice),
            ChainVariant::PositionKeyed => self.by_position.get(prefix.len()).map(Vec::as_slice),
        }
    }

    fn row_mut(&mut self, prefix: &[usize]) -> &mut Vec<ArmStats> {
        let n = self.n;
        match self.variant {
            ChainVariant::PrefixKeyed => self
                .by_prefix
                .entry(Self::key(prefix))
                .or_insert_with(|| vec![ArmStats::default(); n]),
            ChainVariant::PositionKeyed => &mut self.by_position[prefix.len()],
        }
    }

    /// Record the marginal gain of `arm` placed after `prefix`.
    pub fn observe(&mut self, prefix: &[usize], arm: usize, gain: f64) {
        self.row_mut(prefix)[arm].observe(gain, 0.0);
    }

    /// Overwrite the statistic for `arm` after `prefix`.
    pub fn set_estimate(&mut self, prefix: &[usize], arm: usize, mean: f64, plays: u64) {
        self.row_mut(prefix)[arm] = ArmStats { plays, mean_reward: mean, mean_cost: 0.0 };
    }

    pub fn stat(&self, prefix: &[usize], arm: usize) -> ArmStats {
        self.row(prefix).map(|r| r[arm]).unwrap_or_default()
    }

    /// UCB score of `arm` after `prefix`; unplayed pairs score +inf.
    pub fn score(&self, prefix: &[usize], arm: usize) -> f64 {
        self.score_in(self.row(prefix), arm)
    }

    fn score_in(&self, row: Option<&[ArmStats]>, arm: usize) -> f64 {
        let s = row.map(|r| r[arm]).unwrap_or_default();
        if s.plays == 0 {
            return f64::INFINITY;
        }
        s.mean_reward + self.width_scale * confidence_width(self.log_nt, s.plays)
    }
}

/// Greedy walk on UCB scores: each position takes the best unused arm,
/// lowest index on ties.
pub fn select_chain(stats: &ChainStats, k: usize) -> Result<Vec<usize>> {
    let n = stats.n();
    if k > n {
        return Err(invalid(format!("budget {k} exceeds arm count {n}")));
    }
    let mut chain = Vec::with_capacity(k);
    let mut used = vec![false; n];
    for _ in 0..k {
        let row = stats.row(&chain);
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for arm in 0..n {
            if used[arm] {
                continue;
            }
            let s = stats.score_in(row, arm);
            if best == usize::MAX || s > best_score {
                best = arm;
                best_score = s;
            }
        }
        used[best] = true;
        chain.push(best);
    }
    Ok(chain)
}

/// `min(n, ceil(theta))`, floored at 0.
pub fn budget_from_theta(theta: f64, n: usize) -> usize {
    let c = theta.ceil();
    if c <= 0.0 {
        0
    } else {
        (c as usize).min(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetState {
    pub theta: ControllerState,
    pub k: usize,
    pub n: usize,
}

impl BudgetState {
    /// `theta_1 = 0`, so the first step probes nothing.
    pub fn new(n: usize, phi: f64, schedule: StepSchedule) -> Result<Self> {
        Ok(BudgetState { theta: ControllerState::new(0.0, phi, schedule)?, k: 0, n })
    }
}

/// Play the length-`K_t` chain, feed each expert its marginal gain, update
/// `theta` with `Y_t = v_t(E_t)` and recompute the budget.
pub fn acog_step(budget: &mut BudgetState, stats: &mut ChainStats, env: &mut impl SetEnvironment) -> Result<TraceRecord> {
    let k = budget.k;
    let chain = select_chain(stats, k)?;
    let values = env.probe(&chain);
    if values.len() != k + 1 {
        return Err(invalid(format!("environment returned {} prefix values for a chain of {k}", values.len())));
    }
    let mut negative = 0;
    for pos in 0..k {
        let gain = values[pos + 1] - values[pos];
        if gain < 0.0 {
            negative += 1;
        }
        stats.observe(&chain[..pos], chain[pos], gain);
    }
    let y = values[k];
    let t = budget.theta.step_index;
    let theta = budget.theta.value;
    let eta = budget.theta.update(y)?;
    budget.k = budget_from_theta(budget.theta.value, budget.n);
    Ok(TraceRecord {
        t,
        action: Action::Chain(chain),
        reward: y,
        cost: k as f64,
        state: theta,
        state_next: budget.theta.value,
        eta,
        boundary: theta <= 0.0 || k == budget.n,
        extras: Extras::Chain { k, negative_marginals: negative },
    })
}

pub fn run_acog(
    n: usize,
    phi: f64,
    schedule: StepSchedule,
    horizon: u64,
    variant: ChainVariant,
    env: &mut impl SetEnvironment,
) -> Result<(Vec<TraceRecord>, BudgetState, ChainStats)> {
    if env.n() != n {
        return Err(invalid("environment arm count does not match"));
    }
    let mut budget = BudgetState::new(n, phi, schedule)?;
    let mut stats = ChainStats::new(n, horizon, variant)?;
    let mut trace = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        trace.push(acog_step(&mut budget, &mut stats, env)?);
    }
    Ok((trace, budget, stats))
}
