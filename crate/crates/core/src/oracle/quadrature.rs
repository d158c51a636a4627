use std::f64::consts::PI;

use crate::error::{Error, Result};

/// How the Gaussian expectations over the corruption noise are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    /// Tensor-product Gauss–Hermite rule.
    GaussHermite { nodes_per_dim: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::GaussHermite { nodes_per_dim: 64 }
    }
}

impl Quadrature {
    /// Gauss–Hermite up to two dimensions, Monte Carlo beyond.
    pub fn default_for_dim(dim: usize) -> Self {
        if dim <= 2 {
            Self::default()
        } else {
            Quadrature::MonteCarlo {
                samples: 100_000,
                seed: 0,
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Quadrature::GaussHermite { nodes_per_dim } if nodes_per_dim < 8 => Err(
                Error::Argument(format!("Gauss–Hermite needs ≥ 8 nodes, got {nodes_per_dim}")),
            ),
            Quadrature::MonteCarlo { samples, .. } if samples < 10_000 => Err(Error::Argument(
                format!("Monte Carlo needs ≥ 10⁴ samples, got {samples}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the weight
/// `exp(-t²)`. Nodes are returned in decreasing order. Outer weights of large rules
/// underflow to zero; [`gaussian_tensor_rule`] works with log-weights instead.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, log_weights) = gauss_hermite_log(n);
    (nodes, log_weights.into_iter().map(f64::exp).collect())
}

/// Orthonormal Hermite functions `ψ_n(z)` and `ψ_{n-1}(z)`, i.e. the
/// orthonormal polynomials times `exp(-z²/2)`, as `(p, q, ln_scale)` with
/// `ψ_n = p·exp(ln_scale)`. The running rescale keeps large `n` and `|z|`
/// finite.
fn hermite_functions(n: usize, z: f64) -> (f64, f64, f64) {
    const PI_M4: f64 = 0.751_125_544_464_942_5; // π^(-1/4)
    let (mut p1, mut p2) = (PI_M4, 0.0);
    let mut ln_scale = -0.5 * z * z;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        if p1.abs() > 1e150 {
            p1 *= 1e-150;
            p2 *= 1e-150;
            ln_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p2, ln_scale)
}

/// Safeguarded Newton iteration for the root of `ψ_n` inside `[lo, hi]`.
fn refine_root(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let scale = (2.0 * n as f64).sqrt();
    let lo_sign = hermite_functions(n, lo).0.signum();
    let mut z = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (p, q, _) = hermite_functions(n, z);
        if p == 0.0 {
            return z;
        }
        if p.signum() == lo_sign {
            lo = z;
        } else {
            hi = z;
        }
        // Newton on the polynomial part: the exp factor cancels in p / p'.
        let mut next = z - p / (scale * q);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - z).abs() <= 1e-15 * z.abs().max(1.0);
        z = next;
        if done {
            break;
        }
    }
    z
}

/// Nodes (decreasing) and natural-log weights. Roots are bracketed by a scan
/// much finer than the smallest root spacing, `≈ π/√(2n)`, then polished.
fn gauss_hermite_log(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Hermite rule needs at least one node");
    let nf = n as f64;
    let top = (2.0 * nf + 1.0).sqrt() + 2.0;
    let cells = 20 * n.max(8);
    let step = top / cells as f64;

    let mut positive = Vec::with_capacity(n / 2);
    let mut prev_z = if n % 2 == 1 { step } else { 0.0 };
    let mut prev = hermite_functions(n, prev_z).0;
    let mut k = if n % 2 == 1 { 1 } else { 0 };
    while positive.len() < n / 2 && k < cells {
        k += 1;
        let z = k as f64 * step;
        let v = hermite_functions(n, z).0;
        if v == 0.0 || v.signum() != prev.signum() {
            positive.push(if v == 0.0 { z } else { refine_root(n, prev_z, z) });
        }
        prev_z = z;
        prev = v;
    }
    assert_eq!(positive.len(), n / 2, "Gauss–Hermite root scan missed roots for n = {n}");

    let mut nodes: Vec<f64> = positive.iter().rev().copied().collect();
    if n % 2 == 1 {
        nodes.push(0.0);
    }
    nodes.extend(positive.iter().map(|z| -z));
    let log_weights = nodes
        .iter()
        .map(|&z| {
            let (_, q, ln_scale) = hermite_functions(n, z);
            // w = 2 / h'(z)², h' = √(2n)·ψ_{n-1}·exp(z²/2)
            std::f64::consts::LN_2 - z * z - (2.0 * nf).ln() - 2.0 * (q.abs().ln() + ln_scale)
        })
        .collect();
    (nodes, log_weights)
}

/// Points `ε` and log-weights approximating `E[f(ε)]` for `ε ~ N(0, σ² I_dim)`
/// on a tensor-product Gauss–Hermite grid.
pub(crate) fn gaussian_tensor_rule(nodes_per_dim: usize, dim: usize, sigma: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let (t, log_w) = gauss_hermite_log(nodes_per_dim);
    let scale = sigma * 2f64.sqrt();
    let log_norm = -0.5 * PI.ln();
    let mut points = vec![Vec::with_capacity(dim)];
    let mut log_weights = vec![0.0];
    for _ in 0..dim {
        let mut next_points = Vec::with_capacity(points.len() * nodes_per_dim);
        let mut next_weights = Vec::with_capacity(points.len() * nodes_per_dim);
        for (p, lw) in points.iter().zip(&log_weights) {
            for (ti, lwi) in t.iter().zip(&log_w) {
                let mut q = p.clone();
                q.push(scale * ti);
                next_points.push(q);
                next_weights.push(lw + lwi + log_norm);
            }
        }
        points = next_points;
        log_weights = next_weights;
    }
    (points, log_weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_the_weight_function() {
        for n in [8, 20, 64, 128, 257, 1000] {
            let (t, w) = gauss_hermite(n);
            let m0: f64 = w.iter().sum();
            let m2: f64 = t.iter().zip(&w).map(|(t, w)| w * t * t).sum();
            let m4: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(4)).sum();
            let sp = PI.sqrt();
            assert!((m0 - sp).abs() < 1e-12, "n={n} m0={m0}");
            assert!((m2 - sp / 2.0).abs() < 1e-12, "n={n}");
            assert!((m4 - 3.0 * sp / 4.0).abs() < 1e-11, "n={n}");
        }
    }

    #[test]
    fn large_rules_have_distinct_nodes() {
        let (t, lw) = gauss_hermite_log(1000);
        assert!(t.windows(2).all(|p| p[0] - p[1] > 0.05));
        assert!(lw.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn nodes_symmetric_and_sorted() {
        let (t, _) = gauss_hermite(9);
        assert!(t.windows(2).all(|p| p[0] > p[1]));
        assert!(t[4].abs() < 1e-15);
        for i in 0..9 {
            assert!((t[i] + t[8 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_integral() {
        let (t, w) = gauss_hermite(20);
        let integral: f64 = t.iter().zip(&w).map(|(t, w)| w * t.cos()).sum();
        assert!((integral - PI.sqrt() * (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tensor_rule_second_moment() {
        let (pts, lw) = gaussian_tensor_rule(16, 2, 0.3);
        assert_eq!(pts.len(), 256);
        let total: f64 = lw.iter().map(|l| l.exp()).sum();
        let var_x: f64 = pts.iter().zip(&lw).map(|(p, l)| l.exp() * p[0] * p[0]).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((var_x - 0.09).abs() < 1e-12);
    }

    #[test]
    fn validation_limits() {
        assert!(Quadrature::GaussHermite { nodes_per_dim: 7 }.validate().is_err());
        assert!(Quadrature::MonteCarlo { samples: 9_999, seed: 0 }.validate().is_err());
        assert!(Quadrature::default().validate().is_ok());
    }
}
