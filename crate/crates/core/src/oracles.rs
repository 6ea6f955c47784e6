//! Exact offline benchmarks built from true environment parameters.

use serde::{Deserialize, Serialize};

use crate::bandit::{discretize_intervals, IntervalArm};
use crate::env::{DiscreteDist, PointDist};
use crate::error::{invalid, AciError, Result};

const FEAS_TOL: f64 = 1e-12;

/// Optimal randomized arm choice for the coverage-constrained cost LP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub c_star: f64,
    /// Probability of each arm; at most two are non-zero.
    pub mixture: Vec<f64>,
}

/// `min sum x_i w_i` over the simplex subject to `sum x_i p_i >= phi`.
///
/// One coverage row plus the simplex means some optimal vertex mixes at most
/// two arms, so enumerating single arms and coverage-tight pairs is exact.
pub fn lp_benchmark(p: &[f64], omega: &[f64], phi: f64) -> Result<LpSolution> {
    if p.is_empty() || p.len() != omega.len() {
        return Err(invalid("reward and cost vectors must be non-empty and equally long"));
    }
    let n = p.len();
    let mut best: Option<(f64, usize, usize, f64)> = None;
    let mut consider = |cost: f64, i: usize, j: usize, xi: f64| {
        if best.is_none_or(|b| cost < b.0) {
            best = Some((cost, i, j, xi));
        }
    };
    for i in 0..n {
        if p[i] >= phi - FEAS_TOL {
            consider(omega[i], i, i, 1.0);
        }
    }
    for i in 0..n {
        if p[i] <= phi {
            continue;
        }
        for j in 0..n {
            if p[j] >= phi {
                continue;
            }
            let xi = (phi - p[j]) / (p[i] - p[j]);
            consider(xi * omega[i] + (1.0 - xi) * omega[j], i, j, xi);
        }
    }
    let (c_star, i, j, xi) =
        best.ok_or_else(|| AciError::Infeasible(format!("no mixture of arms reaches coverage {phi}")))?;
    let mut mixture = vec![0.0; n];
    mixture[i] += xi;
    mixture[j] += 1.0 - xi;
    Ok(LpSolution { c_star, mixture })
}

/// Smallest `tau` in `[tau_min, tau_max]` with `r(tau) >= phi`, by bisection
/// to 1e-10, and the expected cost there.
pub fn threshold_benchmark(
    r_curve: impl Fn(f64) -> f64,
    c_curve: impl Fn(f64) -> f64,
    phi: f64,
    tau_min: f64,
    tau_max: f64,
) -> Result<(f64, f64)> {
    if r_curve(tau_max) < phi - FEAS_TOL || r_curve(tau_min) > phi + FEAS_TOL {
        return Err(AciError::Infeasible(format!("target {phi} outside the range of r")));
    }
    let (mut lo, mut hi) = (tau_min, tau_max);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if r_curve(mid) >= phi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, c_curve(hi)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalBenchmark {
    pub arm_index: usize,
    pub arm: IntervalArm,
    pub mass: f64,
    /// Length of the best grid interval.
    pub c_star: f64,
    /// Shortest continuous interval with mass `phi` (grid-free).
    pub continuous_c_star: f64,
    /// `c_star - continuous_c_star`, the discretization loss per step.
    pub discretization_gap: f64,
}

/// Shortest grid interval whose true mass is at least `phi` (smallest left
/// end on ties).
pub fn interval_benchmark(delta: f64, dist: &PointDist, phi: f64) -> Result<IntervalBenchmark> {
    let grid = discretize_intervals(delta)?;
    // F on the grid once; masses are differences
    let cdf: Vec<f64> = (0..=grid.m).map(|k| dist.cdf(k as f64 / grid.m as f64)).collect();
    let mut best: Option<(usize, f64, f64)> = None;
    for (idx, arm) in grid.arms.iter().enumerate() {
        let (len, mass) = match *arm {
            IntervalArm::Empty => (0.0, 0.0),
            IntervalArm::Closed { i, j, .. } => ((j - i) as f64 / grid.m as f64, (cdf[j] - cdf[i]).max(0.0)),
        };
        if mass < phi - FEAS_TOL {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, blen, _)) => {
                len < blen - 1e-15
                    || ((len - blen).abs() <= 1e-15 && arm.lo() < grid.arms[b].lo())
            }
        };
        if better {
            best = Some((idx, len, mass));
        }
    }
    let (arm_index, c_star, mass) =
        best.ok_or_else(|| AciError::Infeasible(format!("no grid interval has mass {phi}")))?;
    let continuous_c_star = shortest_continuous_interval(dist, phi);
    Ok(IntervalBenchmark {
        arm_index,
        arm: grid.arms[arm_index],
        mass,
        c_star,
        continuous_c_star,
        discretization_gap: c_star - continuous_c_star,
    })
}

/// Smallest `b - a` with `F(b) - F(a) >= phi`, scanning the left end on a
/// fine grid and bisecting for the right end inside its table cell.
fn shortest_continuous_interval(dist: &PointDist, phi: f64) -> f64 {
    if let PointDist::Uniform = dist {
        return phi.min(1.0);
    }
    let steps = 2000;
    let per_step = 10;
    let table = dist.cdf_table(steps * per_step);
    let n = table.cells();
    let mut best = 1.0f64;
    // the right end is non-decreasing in the left end
    let mut kb = 0;
    for s in 0..=steps {
        let ka = s * per_step;
        let a = ka as f64 / n as f64;
        let fa = table.at_node(ka);
        if 1.0 - fa < phi {
            break;
        }
        while kb < n && table.at_node(kb) - fa < phi {
            kb += 1;
        }
        let (mut lo, mut hi) = (a.max((kb.max(1) - 1) as f64 / n as f64), kb as f64 / n as f64);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if table.eval(mid) - fa >= phi {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        best = best.min(hi - a);
    }
    best
}

/// Inventory level solving `E[min(a, q)] = phi * E[a]`, by bisection to 1e-8.
pub fn newsvendor_benchmark(demand: &DiscreteDist, phi: f64) -> Result<(f64, f64)> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(AciError::Infeasible(format!("service target {phi} must lie in (0, 1)")));
    }
    let mu = demand.mean();
    let target = phi * mu;
    let (mut lo, mut hi) = (0.0, demand.max_value());
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if demand.expected_fill(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, mu))
}

/// Greedy chain over a monotone set function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyReport {
    pub chain: Vec<usize>,
    /// `f(G_k)` for `k = 0..=n`.
    pub prefix_values: Vec<f64>,
    /// Smallest positional gap between the greedy arm and any alternative.
    pub gap_delta: f64,
}

impl GreedyReport {
    /// `q(rho) = min { k : f(G_k) >= rho }`; `None` if no prefix reaches `rho`.
    pub fn budget_for(&self, rho: f64) -> Option<usize> {
        self.prefix_values.iter().position(|&v| v >= rho)
    }

    pub fn prefix(&self, k: usize) -> &[usize] {
        &self.chain[..k]
    }

    /// `f(G_{K*+1}) - phi` with `K* = q(phi)`, when defined.
    pub fn margin_above(&self, phi: f64) -> Option<f64> {
        let k = self.budget_for(phi)?;
        self.prefix_values.get(k + 1).map(|v| v - phi)
    }

    /// Instances where the margin is (numerically) zero make the budget
    /// efficiency bound vacuous.
    pub fn margin_degenerate(&self, phi: f64) -> bool {
        self.margin_above(phi).is_some_and(|d| d <= 1e-6)
    }
}

/// Builds `g_1, ..., g_n` by maximizing the marginal gain `f(G + i) - f(G)`
/// (lowest index on ties).
pub fn greedy_chain(f: impl Fn(&[usize]) -> f64, n: usize) -> Result<GreedyReport> {
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut prefix_values = vec![f(&[])];
    let mut gap_delta = f64::INFINITY;
    let mut probe = Vec::with_capacity(n);
    for k in 1..=n {
        let base = prefix_values[k - 1];
        let mut gains = Vec::with_capacity(n);
        for i in 0..n {
            if used[i] {
                continue;
            }
            probe.clear();
            probe.extend_from_slice(&chain);
            probe.push(i);
            gains.push((i, f(&probe) - base));
        }
        let (best, best_gain) = gains
            .iter()
            .copied()
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        for &(i, g) in &gains {
            if i != best {
                gap_delta = gap_delta.min(best_gain - g);
            }
        }
        used[best] = true;
        chain.push(best);
        let value = f(&chain);
        if value < base - 1e-12 {
            return Err(AciError::NonMonotone { k, value, prev_value: base });
        }
        prefix_values.push(value);
    }
    Ok(GreedyReport { chain, prefix_values, gap_delta })
}
