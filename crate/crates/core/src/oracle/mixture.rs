use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::Prng;

/// `ln Σ exp(v)`; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Gaussian mixture with diagonal covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, variances: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != variances.len() {
            return Err(Error::Argument(format!(
                "mixture needs matching non-empty weights/means/variances, got {}/{}/{}",
                weights.len(),
                means.len(),
                variances.len()
            )));
        }
        let dim = means[0].len();
        if dim == 0
            || means.iter().any(|m| m.len() != dim)
            || variances.iter().any(|v| v.len() != dim)
        {
            return Err(Error::Argument("mixture components disagree on dimension".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Argument(format!("weights must be positive: {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("weights sum to {total}, not 1")));
        }
        if variances.iter().flatten().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Argument("variances must be positive and finite".into()));
        }
        if means.iter().flatten().any(|m| !m.is_finite()) {
            return Err(Error::Argument("means must be finite".into()));
        }
        Ok(GaussianMixture {
            weights,
            means,
            variances,
        })
    }

    /// One-dimensional mixture from means and standard deviations.
    pub fn one_d(weights: &[f64], means: &[f64], stds: &[f64]) -> Result<Self> {
        Self::new(
            weights.to_vec(),
            means.iter().map(|&m| vec![m]).collect(),
            stds.iter().map(|&s| vec![s * s]).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn num_components(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn variances(&self) -> &[Vec<f64>] {
        &self.variances
    }

    /// Every mean lies in `(0,1)^d` and `mean ± 4 std` stays inside `(0,1)`.
    pub fn check_unit_cube(&self) -> Result<()> {
        for (mean, var) in self.means.iter().zip(&self.variances) {
            for (&m, &v) in mean.iter().zip(var) {
                let reach = 4.0 * v.sqrt();
                if !(m - reach > 0.0 && m + reach < 1.0) {
                    return Err(Error::Domain(format!(
                        "component at {m} with variance {v} leaves the unit cube"
                    )));
                }
            }
        }
        Ok(())
    }

    fn component_log_densities(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(&w, (mean, var))| {
                let mut lp = w.ln();
                for ((&xi, &m), &v) in x.iter().zip(mean).zip(var) {
                    let d = xi - m;
                    lp -= 0.5 * (2.0 * PI * v).ln() + d * d / (2.0 * v);
                }
                lp
            })
            .collect()
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        log_sum_exp(&self.component_log_densities(x))
    }

    /// Posterior component probabilities at `x`.
    pub fn responsibilities(&self, x: &[f64]) -> Vec<f64> {
        let lps = self.component_log_densities(x);
        let total = log_sum_exp(&lps);
        lps.iter().map(|lp| (lp - total).exp()).collect()
    }

    /// Index of the most responsible component.
    pub fn mode_of(&self, x: &[f64]) -> usize {
        let r = self.responsibilities(x);
        (0..r.len())
            .max_by(|&a, &b| r[a].total_cmp(&r[b]).then(b.cmp(&a)))
            .expect("non-empty mixture")
    }

    /// `∇ₓ ln p(x)`.
    pub fn score(&self, x: &[f64]) -> Vec<f64> {
        let r = self.responsibilities(x);
        let mut out = vec![0.0; self.dim()];
        for ((rk, mean), var) in r.iter().zip(&self.means).zip(&self.variances) {
            for (d, o) in out.iter_mut().enumerate() {
                *o += rk * (mean[d] - x[d]) / var[d];
            }
        }
        out
    }

    /// Largest log-density, located by mean-shift iterations started at
    /// every component mean.
    pub fn max_log_pdf(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for start in &self.means {
            let mut x = start.clone();
            for _ in 0..500 {
                let r = self.responsibilities(&x);
                let next: Vec<f64> = (0..self.dim())
                    .map(|d| {
                        let (mut num, mut den) = (0.0, 0.0);
                        for ((rk, mean), var) in r.iter().zip(&self.means).zip(&self.variances) {
                            num += rk * mean[d] / var[d];
                            den += rk / var[d];
                        }
                        num / den
                    })
                    .collect();
                let shift: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
                x = next;
                if shift < 1e-14 {
                    break;
                }
            }
            best = best.max(self.log_pdf(&x)).max(self.log_pdf(start));
        }
        best
    }

    /// Ancestral sampling: pick a component by weight, then draw from it.
    pub fn sample(&self, rng: &mut Prng) -> (usize, Vec<f64>) {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut k = self.weights.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = i;
                break;
            }
        }
        let x = self.means[k]
            .iter()
            .zip(&self.variances[k])
            .map(|(m, v)| m + v.sqrt() * rng.standard_normal())
            .collect();
        (k, x)
    }
}
