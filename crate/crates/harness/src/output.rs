use std::fmt::Write as _;

use aci_core::trace::Extras;
use serde::Serialize;

use crate::config::{Algorithm, RunSpec};
use crate::run::{Benchmark, ReplicaOutput, ReplicaSummary};

pub const CSV_HEADER: &str = "t,action,reward,cost,state,K,coverage_cum,regret_cum,regret_pos_cum";

/// Round-trippable rendering: 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn extra_header(extras: &Extras) -> &'static str {
    match extras {
        Extras::Bandit | Extras::Threshold => "eta,boundary",
        Extras::Newsvendor { .. } => "eta,boundary,demand,fulfilled,q_eff,leftover",
        Extras::Chain { .. } => "eta,boundary,negative_marginals,greedy_deviation,greedy_order_deviation",
    }
}

/// One CSV per replica: the common columns, then setting-specific ones.
pub fn render_trace_csv(out: &ReplicaOutput) -> String {
    let mut s = String::with_capacity(out.trace.len() * 220);
    s.push_str(CSV_HEADER);
    if let Some(first) = out.trace.first() {
        s.push(',');
        s.push_str(extra_header(&first.extras));
    }
    s.push('\n');
    let m = &out.metrics;
    for (i, r) in out.trace.iter().enumerate() {
        let k = r.budget().map(|k| k.to_string()).unwrap_or_default();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.action,
            float(r.reward),
            float(r.cost),
            float(r.state),
            k,
            float(m.coverage_cum[i]),
            float(m.regret_cum[i]),
            float(m.regret_pos_cum[i]),
            float(r.eta),
            u8::from(r.boundary),
        );
        match r.extras {
            Extras::Bandit | Extras::Threshold => {}
            Extras::Newsvendor { demand, fulfilled, q_eff, leftover } => {
                let _ = write!(s, ",{},{},{},{}", float(demand), float(fulfilled), float(q_eff), float(leftover));
            }
            Extras::Chain { negative_marginals, .. } => {
                let (set, order) = out.deviations.as_ref().map(|d| d[i]).unwrap_or((false, false));
                let _ = write!(s, ",{},{},{}", negative_marginals, u8::from(set), u8::from(order));
            }
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantSummary {
    pub label: String,
    pub algorithm: Algorithm,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub phi: f64,
    /// Benchmark seen by replica 0.
    pub benchmark: Benchmark,
    pub coverage_mean: f64,
    pub coverage_se: f64,
    pub regret_mean: f64,
    pub regret_se: f64,
    pub regret_pos_mean: f64,
    pub regret_pos_se: f64,
    pub replicas: Vec<ReplicaSummary>,
}

/// Mean and standard error (0 for a single value).
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl VariantSummary {
    pub fn new(spec: &RunSpec, benchmark: Benchmark, replicas: Vec<ReplicaSummary>) -> Self {
        let col = |f: fn(&ReplicaSummary) -> f64| mean_se(&replicas.iter().map(f).collect::<Vec<_>>());
        let (coverage_mean, coverage_se) = col(|r| r.coverage_final);
        let (regret_mean, regret_se) = col(|r| r.regret_final);
        let (regret_pos_mean, regret_pos_se) = col(|r| r.regret_pos_final);
        VariantSummary {
            label: spec.label.clone(),
            algorithm: spec.algorithm,
            horizon: spec.horizon,
            phi: spec.phi,
            benchmark,
            coverage_mean,
            coverage_se,
            regret_mean,
            regret_se,
            regret_pos_mean,
            regret_pos_se,
            replicas,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsFile {
    pub preset: String,
    pub seed: u64,
    pub variants: Vec<VariantSummary>,
    /// Log-log fit of mean regret on T when the variants differ only in T.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_fit: Option<aci_core::metrics::SlopeFit>,
}
