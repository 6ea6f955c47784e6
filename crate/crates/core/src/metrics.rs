//! Coverage, regret and greedy-deviation accounting over traces.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, AciError, Result};
use crate::oracles::GreedyReport;
use crate::trace::TraceRecord;

/// `coverage[t-1] = (1/t) sum_{s<=t} Y_s`.
pub fn coverage_series(trace: &[TraceRecord]) -> Vec<f64> {
    let mut sum = 0.0;
    trace
        .iter()
        .enumerate()
        .map(|(i, r)| {
            sum += r.reward;
            sum / (i + 1) as f64
        })
        .collect()
}

/// Mean reward over the 1-based inclusive step window `[lo, hi]`.
pub fn windowed_coverage(trace: &[TraceRecord], lo: usize, hi: usize) -> Result<f64> {
    if lo == 0 || hi < lo || hi > trace.len() {
        return Err(invalid(format!("window [{lo}, {hi}] outside trace of length {}", trace.len())));
    }
    let s: f64 = trace[lo - 1..hi].iter().map(|r| r.reward).sum();
    Ok(s / (hi - lo + 1) as f64)
}

/// Cumulative `sum (cost_t - c_star)`, or its positive-part version.
pub fn regret_series(trace: &[TraceRecord], c_star: f64, positive_part: bool) -> Vec<f64> {
    regret_series_with(trace, |_| c_star, positive_part)
}

/// Regret against a per-step benchmark `c_star(t)`.
pub fn regret_series_with(trace: &[TraceRecord], c_star: impl Fn(u64) -> f64, positive_part: bool) -> Vec<f64> {
    let mut acc = 0.0;
    trace
        .iter()
        .map(|r| {
            let d = r.cost - c_star(r.t);
            acc += if positive_part { d.max(0.0) } else { d };
            acc
        })
        .collect()
}

pub fn boundary_steps(trace: &[TraceRecord]) -> usize {
    trace.iter().filter(|r| r.boundary).count()
}

/// `(coverage_T - phi) + (state_{T+1} - state_1) / (eta T)`, which vanishes for
/// an unprojected constant-step controller driven by the trace's rewards.
pub fn telescoping_residual(trace: &[TraceRecord], phi: f64) -> Result<f64> {
    let (first, last) = match (trace.first(), trace.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(AciError::Empty("trace")),
    };
    let eta = first.eta;
    if trace.iter().any(|r| r.eta != eta) {
        return Err(AciError::NonConstantSchedule);
    }
    let n = trace.len() as f64;
    let cov = trace.iter().map(|r| r.reward).sum::<f64>() / n;
    Ok((cov - phi) + (last.state_next - first.state) / (eta * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Some regret values were raised to 1 before taking logs.
    pub clipped: bool,
}

/// Least-squares fit of `log(regret)` on `log(T)`.
pub fn sublinearity_fit(end_regrets: &[(f64, f64)]) -> Result<SlopeFit> {
    if end_regrets.len() < 3 {
        return Err(invalid(format!("slope fit needs at least 3 horizons, got {}", end_regrets.len())));
    }
    let mut clipped = false;
    let pts: Vec<(f64, f64)> = end_regrets
        .iter()
        .map(|&(t, r)| {
            let r = if r > 0.0 {
                r
            } else {
                clipped = true;
                1.0
            };
            (t.ln(), r.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(invalid("slope fit needs distinct horizons"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r2, clipped })
}

/// Per-step greedy-prefix mismatch flags `(as_set, as_sequence)`.
pub fn deviation_flags(trace: &[TraceRecord], report: &GreedyReport) -> Result<Vec<(bool, bool)>> {
    let n = report.chain.len();
    let mut out = Vec::with_capacity(trace.len());
    let mut sorted_played = Vec::new();
    let mut sorted_greedy = Vec::new();
    for r in trace {
        let chain = r
            .action
            .chain()
            .ok_or_else(|| invalid(format!("step {} carries no chain", r.t)))?;
        if chain.len() > n || chain.iter().any(|&a| a >= n) {
            return Err(invalid(format!("chain at step {} does not fit a greedy report over {n} arms", r.t)));
        }
        let greedy = report.prefix(chain.len());
        let order = chain != greedy;
        sorted_played.clear();
        sorted_played.extend_from_slice(chain);
        sorted_played.sort_unstable();
        sorted_greedy.clear();
        sorted_greedy.extend_from_slice(greedy);
        sorted_greedy.sort_unstable();
        out.push((sorted_played != sorted_greedy, order));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationCount {
    pub set_based: usize,
    pub order_based: usize,
}

/// Steps whose played chain differs from the greedy prefix of the same length.
pub fn deviation_counter(trace: &[TraceRecord], report: &GreedyReport) -> Result<DeviationCount> {
    let flags = deviation_flags(trace, report)?;
    Ok(DeviationCount {
        set_based: flags.iter().filter(|f| f.0).count(),
        order_based: flags.iter().filter(|f| f.1).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub coverage_cum: Vec<f64>,
    pub coverage_final: f64,
    pub regret_cum: Vec<f64>,
    pub regret_pos_cum: Vec<f64>,
    pub boundary_steps: usize,
    pub greedy_deviation_steps: Option<usize>,
    pub greedy_order_deviation_steps: Option<usize>,
    pub slope_fit: Option<SlopeFit>,
}

impl MetricsReport {
    pub fn build(trace: &[TraceRecord], c_star: impl Fn(u64) -> f64) -> Result<Self> {
        if trace.is_empty() {
            return Err(AciError::Empty("trace"));
        }
        let coverage_cum = coverage_series(trace);
        Ok(MetricsReport {
            coverage_final: *coverage_cum.last().unwrap_or(&0.0),
            coverage_cum,
            regret_cum: regret_series_with(trace, &c_star, false),
            regret_pos_cum: regret_series_with(trace, &c_star, true),
            boundary_steps: boundary_steps(trace),
            greedy_deviation_steps: None,
            greedy_order_deviation_steps: None,
            slope_fit: None,
        })
    }

    pub fn with_deviations(mut self, trace: &[TraceRecord], report: &GreedyReport) -> Result<Self> {
        let d = deviation_counter(trace, report)?;
        self.greedy_deviation_steps = Some(d.set_based);
        self.greedy_order_deviation_steps = Some(d.order_based);
        Ok(self)
    }

    pub fn regret_final(&self) -> f64 {
        self.regret_cum.last().copied().unwrap_or(0.0)
    }

    pub fn regret_pos_final(&self) -> f64 {
        self.regret_pos_cum.last().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Action, Extras};
    use approx::assert_abs_diff_eq;

    fn rec(t: u64, reward: f64, cost: f64) -> TraceRecord {
        TraceRecord {
            t,
            action: Action::Arm(0),
            reward,
            cost,
            state: 0.0,
            state_next: 0.0,
            eta: 0.1,
            boundary: false,
            extras: Extras::Bandit,
        }
    }

    fn chain_rec(t: u64, chain: Vec<usize>) -> TraceRecord {
        let k = chain.len();
        TraceRecord {
            action: Action::Chain(chain),
            extras: Extras::Chain { k, negative_marginals: 0 },
            ..rec(t, 1.0, k as f64)
        }
    }

    #[test]
    fn coverage_examples() {
        let ones: Vec<_> = (1..=10).map(|t| rec(t, 1.0, 0.0)).collect();
        assert!(coverage_series(&ones).iter().all(|&c| c == 1.0));
        let alt: Vec<_> = (1..=10).map(|t| rec(t, (t % 2) as f64, 0.0)).collect();
        let c = coverage_series(&alt);
        for k in 1..=5 {
            assert_eq!(c[2 * k - 1], 0.5);
        }
        assert_eq!(windowed_coverage(&alt, 3, 6).unwrap(), 0.5);
        assert_eq!(windowed_coverage(&alt, 3, 3).unwrap(), 1.0);
        assert!(windowed_coverage(&alt, 0, 3).is_err());
        assert!(windowed_coverage(&alt, 5, 11).is_err());
    }

    #[test]
    fn regret_examples() {
        let flat: Vec<_> = (1..=5).map(|t| rec(t, 1.0, 0.4)).collect();
        assert!(regret_series(&flat, 0.4, false).iter().all(|&r| r == 0.0));
        assert_eq!(regret_series(&[rec(1, 1.0, 1.5)], 0.5, false), vec![1.0]);

        let mixed = vec![rec(1, 1.0, 1.0), rec(2, 1.0, 0.0)];
        assert_eq!(regret_series(&mixed, 0.5, false), vec![0.5, 0.0]);
        assert_eq!(regret_series(&mixed, 0.5, true), vec![0.5, 0.5]);
    }

    #[test]
    fn slope_examples() {
        let f = sublinearity_fit(&[100.0, 400.0, 1600.0].map(|t: f64| (t, t.sqrt()))).unwrap();
        assert_abs_diff_eq!(f.slope, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.r2, 1.0, epsilon = 1e-12);
        assert!(!f.clipped);
        let f = sublinearity_fit(&[10.0, 20.0, 40.0, 80.0].map(|t: f64| (t, t))).unwrap();
        assert_abs_diff_eq!(f.slope, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.intercept, 0.0, epsilon = 1e-12);
        assert!(sublinearity_fit(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(sublinearity_fit(&[(10.0, -3.0), (20.0, 2.0), (40.0, 4.0)]).unwrap().clipped);
    }

    #[test]
    fn deviation_examples() {
        let report = GreedyReport { chain: vec![2, 0, 1], prefix_values: vec![0.0, 0.5, 0.7, 0.8], gap_delta: 0.1 };
        let trace = vec![
            chain_rec(1, vec![]),
            chain_rec(2, vec![2, 0]),
            chain_rec(3, vec![0, 2]),
            chain_rec(4, vec![1]),
        ];
        let d = deviation_counter(&trace, &report).unwrap();
        assert_eq!(d, DeviationCount { set_based: 1, order_based: 2 });
        assert!(deviation_counter(&[chain_rec(1, vec![5])], &report).is_err());
        assert!(deviation_counter(&[rec(1, 1.0, 0.0)], &report).is_err());
    }

    #[test]
    fn residual_needs_constant_eta() {
        let mut a = rec(1, 1.0, 0.0);
        let mut b = rec(2, 0.0, 0.0);
        a.state_next = 0.1 * (0.5 - 1.0);
        b.state = a.state_next;
        b.state_next = b.state + 0.1 * 0.5;
        assert_abs_diff_eq!(telescoping_residual(&[a.clone(), b.clone()], 0.5).unwrap(), 0.0, epsilon = 1e-15);
        b.eta = 0.2;
        assert_eq!(telescoping_residual(&[a, b], 0.5), Err(AciError::NonConstantSchedule));
    }

    #[test]
    fn report_scalars() {
        let trace: Vec<_> = (1..=4).map(|t| rec(t, 1.0, t as f64)).collect();
        let m = MetricsReport::build(&trace, |_| 2.0).unwrap();
        assert_eq!(m.coverage_final, 1.0);
        assert_eq!(m.regret_final(), 2.0);
        assert_eq!(m.regret_pos_final(), 3.0);
        assert_eq!(m.boundary_steps, 0);
    }
}
