use super::components::{ARM_REWARD, P_VECTOR};
use super::SetEnvironment;
use crate::error::{invalid, Result};
use crate::rng::uniform;

/// Expected value of the OR of independent arms: `1 - prod(1 - p_i)`.
pub fn or_value(p: &[f64], set: &[usize]) -> f64 {
    1.0 - set.iter().map(|&i| 1.0 - p[i]).product::<f64>()
}

/// Each arm succeeds independently with probability `p_i`; a set is worth 1
/// iff at least one of its arms succeeded this step.
#[derive(Debug, Clone)]
pub struct OrWorld {
    p: Vec<f64>,
    seed: u64,
    t: u64,
}

pub fn make_or_world(p: Vec<f64>, seed: u64) -> Result<OrWorld> {
    if p.is_empty() {
        return Err(invalid("OR world needs at least one arm"));
    }
    if let Some(bad) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(invalid(format!("arm probability {bad} outside [0, 1]")));
    }
    Ok(OrWorld { p, seed, t: 0 })
}

impl OrWorld {
    /// `n` probabilities drawn uniformly from `[lo, hi]`, reproducible from `seed`.
    pub fn random_probabilities(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
        (0..n as u64).map(|i| lo + (hi - lo) * uniform(seed, P_VECTOR, i)).collect()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Whether arm `i` succeeds at 1-based step `t`.
    pub fn success(&self, t: u64, i: usize) -> bool {
        uniform(self.seed, ARM_REWARD + i as u64, t) < self.p[i]
    }
}

impl SetEnvironment for OrWorld {
    fn n(&self) -> usize {
        self.p.len()
    }

    fn probe(&mut self, chain: &[usize]) -> Vec<f64> {
        self.t += 1;
        let mut out = Vec::with_capacity(chain.len() + 1);
        let mut hit = false;
        out.push(0.0);
        for &i in chain {
            hit = hit || self.success(self.t, i);
            out.push(if hit { 1.0 } else { 0.0 });
        }
        out
    }

    fn expected_value(&self, set: &[usize]) -> Option<f64> {
        Some(or_value(&self.p, set))
    }
}

/// Set world driven by a script `(step, chain) -> prefix values`.
pub struct ScriptedSet<F> {
    n: usize,
    script: F,
    t: u64,
}

impl<F: FnMut(u64, &[usize]) -> Vec<f64>> ScriptedSet<F> {
    pub fn new(n: usize, script: F) -> Self {
        ScriptedSet { n, script, t: 0 }
    }
}

impl<F: FnMut(u64, &[usize]) -> Vec<f64>> SetEnvironment for ScriptedSet<F> {
    fn n(&self) -> usize {
        self.n
    }
    fn probe(&mut self, chain: &[usize]) -> Vec<f64> {
        self.t += 1;
        (self.script)(self.t, chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_certain() {
        let mut w = make_or_world(vec![1.0], 0).unwrap();
        for _ in 0..100 {
            assert_eq!(w.probe(&[]), vec![0.0]);
            assert_eq!(w.probe(&[0]), vec![0.0, 1.0]);
        }
    }

    #[test]
    fn prefix_values_match_closed_form() {
        let mut w = make_or_world(vec![0.5, 0.5, 0.5], 21).unwrap();
        let n = 100_000;
        let mut sums = [0.0; 3];
        for _ in 0..n {
            let v = w.probe(&[0, 1, 2]);
            assert!(v.windows(2).all(|p| p[0] <= p[1]));
            for k in 0..3 {
                sums[k] += v[k + 1];
            }
        }
        for (k, expect) in [0.5, 0.75, 0.875].into_iter().enumerate() {
            assert_eq!(or_value(w.probabilities(), &[0, 1, 2][..=k]), expect);
            let sd = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!((sums[k] / n as f64 - expect).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn probabilities_reproducible() {
        let a = OrWorld::random_probabilities(20, 0.05, 0.3, 9);
        assert_eq!(a, OrWorld::random_probabilities(20, 0.05, 0.3, 9));
        assert_ne!(a, OrWorld::random_probabilities(20, 0.05, 0.3, 10));
        assert!(a.iter().all(|&p| (0.05..0.3).contains(&p)));
    }
}
