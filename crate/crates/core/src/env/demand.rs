use serde::{Deserialize, Serialize};

use super::components::DEMAND;
use crate::error::{invalid, Result};
use crate::rng::uniform;

/// Source of per-step demand `a_t`.
pub trait DemandStream {
    fn next_demand(&mut self) -> f64;
}

/// Finite discrete law, used by the inventory benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(invalid("discrete law needs matching non-empty values and probs"));
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("probabilities must be non-negative and sum to 1, got {total}")));
        }
        Ok(DiscreteDist { values, probs })
    }

    pub fn point(v: f64) -> Self {
        DiscreteDist { values: vec![v], probs: vec![1.0] }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(_, &p)| p > 0.0)
            .map(|(&v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Expected fulfilled demand `E[min(a, q)]`.
    pub fn expected_fill(&self, q: f64) -> f64 {
        self.values.iter().zip(&self.probs).map(|(&v, &p)| p * v.min(q)).sum()
    }
}

/// Poisson demand clamped to `[1, cap]`, with rate `lambda_before` for
/// steps `t <= shift_t` and `lambda_after` afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonDemand {
    pub lambda_before: f64,
    pub lambda_after: f64,
    pub shift_t: u64,
    pub cap: f64,
    seed: u64,
    t: u64,
}

pub fn make_poisson_demand(
    lambda_before: f64,
    lambda_after: f64,
    shift_t: u64,
    cap_d: f64,
    seed: u64,
) -> Result<PoissonDemand> {
    if !(cap_d >= 1.0) {
        return Err(invalid(format!("demand cap must be >= 1, got {cap_d}")));
    }
    if !(lambda_before > 0.0 && lambda_after > 0.0) || lambda_before > 700.0 || lambda_after > 700.0 {
        return Err(invalid("Poisson rates must lie in (0, 700]"));
    }
    Ok(PoissonDemand { lambda_before, lambda_after, shift_t, cap: cap_d, seed, t: 0 })
}

impl PoissonDemand {
    pub fn rate_at(&self, t: u64) -> f64 {
        if t <= self.shift_t {
            self.lambda_before
        } else {
            self.lambda_after
        }
    }

    /// Inversion sampling of Poisson(lambda) from `u`, clamped to `[1, cap]`.
    pub fn sample_clamped(lambda: f64, cap: f64, u: f64) -> f64 {
        let mut k = 0u64;
        let mut pmf = (-lambda).exp();
        let mut cdf = pmf;
        while u >= cdf && (k as f64) < cap {
            k += 1;
            pmf *= lambda / k as f64;
            cdf += pmf;
        }
        (k as f64).clamp(1.0, cap)
    }

    /// Law of the clamped demand at rate `lambda` on the integers `1..=floor(cap)`
    /// (plus `cap` itself when it is fractional).
    pub fn clamped_law(lambda: f64, cap: f64) -> DiscreteDist {
        let top = cap.floor() as u64;
        let mut values = Vec::new();
        let mut probs = Vec::new();
        let mut pmf = (-lambda).exp();
        let mut below = 0.0;
        for k in 0..=top {
            if k > 0 {
                pmf *= lambda / k as f64;
            }
            if k == 0 {
                below += pmf;
                continue;
            }
            let mut p = pmf;
            if k == 1 {
                p += below;
            }
            values.push(k as f64);
            probs.push(p);
        }
        let mass: f64 = probs.iter().sum();
        // remaining upper tail collapses onto the cap
        if cap > top as f64 {
            values.push(cap);
            probs.push((1.0 - mass).max(0.0));
        } else if let Some(last) = probs.last_mut() {
            *last += (1.0 - mass).max(0.0);
        }
        DiscreteDist { values, probs }
    }

    pub fn law_at(&self, t: u64) -> DiscreteDist {
        Self::clamped_law(self.rate_at(t), self.cap)
    }
}

impl DemandStream for PoissonDemand {
    fn next_demand(&mut self) -> f64 {
        self.t += 1;
        let u = uniform(self.seed, DEMAND, self.t);
        Self::sample_clamped(self.rate_at(self.t), self.cap, u)
    }
}
