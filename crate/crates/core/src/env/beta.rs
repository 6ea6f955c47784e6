use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::SplitMix64;

/// Distribution of the hidden points in the interval world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointDist {
    /// Beta(a, b) with a, b >= 1 (bounded density, so quadrature is well behaved).
    Beta { a: f64, b: f64 },
    Uniform,
}

impl PointDist {
    pub fn validate(&self) -> Result<()> {
        if let PointDist::Beta { a, b } = *self {
            if !(a >= 1.0 && b >= 1.0 && a.is_finite() && b.is_finite()) {
                return Err(invalid(format!("Beta({a}, {b}) needs a, b >= 1")));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> f64 {
        match *self {
            PointDist::Uniform => rng.next_unit(),
            PointDist::Beta { a, b } => Beta::new(a, b).expect("validated beta parameters").sample(rng),
        }
    }

    fn density_unnormalized(a: f64, b: f64, x: f64) -> f64 {
        x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0)
    }

    /// Distribution function on [0, 1]. Beta is integrated numerically with
    /// adaptive Simpson to 1e-12 absolute per piece.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match *self {
            PointDist::Uniform => x,
            PointDist::Beta { a, b } => {
                let f = |u: f64| Self::density_unnormalized(a, b, u);
                let total = adaptive_simpson(&f, 0.0, 1.0, 1e-13);
                if x == 1.0 {
                    return 1.0;
                }
                (adaptive_simpson(&f, 0.0, x, 1e-13) / total).clamp(0.0, 1.0)
            }
        }
    }

    /// Probability of the closed interval [lo, hi].
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    /// CDF tabulated at `k / cells`, for repeated evaluation.
    pub fn cdf_table(&self, cells: usize) -> CdfTable {
        let cells = cells.max(1);
        let mut values = Vec::with_capacity(cells + 1);
        values.push(0.0);
        let total = match *self {
            PointDist::Uniform => 1.0,
            PointDist::Beta { a, b } => adaptive_simpson(&|u| Self::density_unnormalized(a, b, u), 0.0, 1.0, 1e-13),
        };
        let mut acc = 0.0;
        for k in 1..=cells {
            acc += self.piece(k as f64 / cells as f64 - 1.0 / cells as f64, k as f64 / cells as f64, total);
            values.push(acc.min(1.0));
        }
        *values.last_mut().expect("non-empty") = 1.0;
        CdfTable { dist: *self, total, values }
    }

    fn piece(&self, lo: f64, hi: f64, total: f64) -> f64 {
        match *self {
            PointDist::Uniform => hi - lo,
            PointDist::Beta { a, b } => {
                adaptive_simpson(&|u| Self::density_unnormalized(a, b, u), lo, hi, 1e-16) / total
            }
        }
    }
}

/// Tabulated CDF; off-grid points integrate only within their cell.
#[derive(Debug, Clone)]
pub struct CdfTable {
    dist: PointDist,
    total: f64,
    values: Vec<f64>,
}

impl CdfTable {
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    /// `F(k / cells)`.
    pub fn at_node(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let n = self.cells();
        let k = ((x * n as f64).floor() as usize).min(n - 1);
        let x0 = k as f64 / n as f64;
        (self.values[k] + self.dist.piece(x0, x, self.total)).clamp(0.0, 1.0)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::{Beta as SBeta, ContinuousCDF};

    #[test]
    fn table_agrees_with_direct_cdf() {
        for d in [PointDist::Beta { a: 2.0, b: 5.0 }, PointDist::Beta { a: 3.5, b: 1.0 }, PointDist::Uniform] {
            let t = d.cdf_table(997);
            assert_eq!(t.at_node(0), 0.0);
            assert_eq!(t.at_node(997), 1.0);
            for x in [0.0, 0.013, 0.25, 0.4999, 0.731, 0.999, 1.0] {
                assert_abs_diff_eq!(t.eval(x), d.cdf(x), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn beta_cdf_matches_incomplete_beta() {
        let d = PointDist::Beta { a: 2.0, b: 5.0 };
        let reference = SBeta::new(2.0, 5.0).unwrap();
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            assert_abs_diff_eq!(d.cdf(x), reference.cdf(x), epsilon = 1e-10);
        }
    }

    #[test]
    fn beta_2_5_cdf_closed_form() {
        // F(x) = 1 - (1-x)^5 (1 + 5x) for Beta(2, 5)
        let d = PointDist::Beta { a: 2.0, b: 5.0 };
        let x: f64 = 0.45;
        let closed = 1.0 - (1.0 - x).powi(5) * (1.0 + 5.0 * x);
        assert_abs_diff_eq!(d.cdf(x), closed, epsilon = 1e-11);
        assert_abs_diff_eq!(d.cdf(x), 0.836_432_578_125, epsilon = 1e-10);
    }

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_singular_beta() {
        assert!(PointDist::Beta { a: 0.5, b: 2.0 }.validate().is_err());
    }
}
