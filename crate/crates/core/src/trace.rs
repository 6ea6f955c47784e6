use std::fmt;

use serde::{Deserialize, Serialize};

/// What the algorithm submitted to the environment at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Action {
    Arm(usize),
    Threshold(f64),
    Inventory(f64),
    Chain(Vec<usize>),
}

impl Action {
    pub fn chain(&self) -> Option<&[usize]> {
        match self {
            Action::Chain(c) => Some(c),
            _ => None,
        }
    }
}

/// Renders a chain as `3-7-1`; the empty chain renders as an empty string.
pub fn chain_string(chain: &[usize]) -> String {
    let mut s = String::new();
    for (i, a) in chain.iter().enumerate() {
        if i > 0 {
            s.push('-');
        }
        s.push_str(&a.to_string());
    }
    s
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Arm(i) => write!(f, "{i}"),
            Action::Threshold(x) | Action::Inventory(x) => write!(f, "{x:.16e}"),
            Action::Chain(c) => f.write_str(&chain_string(c)),
        }
    }
}

/// Setting-specific columns carried beside the common ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Extras {
    Bandit,
    Threshold,
    Newsvendor {
        demand: f64,
        fulfilled: f64,
        q_eff: f64,
        leftover: f64,
    },
    Chain {
        k: usize,
        negative_marginals: usize,
    },
}

/// One algorithm step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// 1-based step.
    pub t: u64,
    pub action: Action,
    pub reward: f64,
    pub cost: f64,
    /// Controlled value at decision time (lambda_t, tau_t, theta_t, q_t).
    pub state: f64,
    /// Value after this step's update.
    pub state_next: f64,
    /// Step size used by this step's update.
    pub eta: f64,
    /// The controller's boundary branch decided the action (forced arm, clamped threshold, ...).
    pub boundary: bool,
    pub extras: Extras,
}

impl TraceRecord {
    pub fn budget(&self) -> Option<usize> {
        match self.extras {
            Extras::Chain { k, .. } => Some(k),
            _ => None,
        }
    }
}
