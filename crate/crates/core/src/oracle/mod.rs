//! Ground-truth densities and the optimal denoising reconstruction.
//!
//! For additive noise `ε ~ N(0, σ² I)` the reconstruction that minimizes the
//! expected BCE (or MSE) denoising loss is
//!
//! ```text
//! R*_σ(x) = E_ε[p(x − ε)(x − ε)] / E_ε[p(x − ε)]
//! ```
//!
//! and `(R*_σ(x) − x) / σ²` tends to `∇ ln p(x)` as `σ → 0`. This module
//! evaluates both sides directly for Gaussian mixtures so trained networks and
//! sampling chains can be checked against them.

mod mixture;
mod quadrature;

pub use mixture::{log_sum_exp, GaussianMixture};
pub use quadrature::{gauss_hermite, Quadrature};

use crate::error::{Error, Result};
use crate::rng::Prng;
use crate::sampler::Reconstructor;
use crate::tensor::Tensor;

/// Smallest admissible smoothed density, `ln(1e-300)`.
const LOG_DENOMINATOR_FLOOR: f64 = -690.775_527_898_213_7;

/// Points whose analytic score norm falls below this are left out of
/// relative-error statistics.
const SCORE_FLOOR: f64 = 1e-8;

/// Width of the high-density band, in nats below the peak log-density.
pub const HIGH_DENSITY_NATS: f64 = 4.0;

/// The optimal reconstruction `R*_σ(x)` of a point `x`.
///
/// Both expectations are accumulated in the log domain with the same
/// quadrature rule.
pub fn optimal_reconstruction(
    gm: &GaussianMixture,
    sigma: f64,
    x: &[f64],
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Argument(format!("sigma must be positive, got {sigma}")));
    }
    if x.len() != gm.dim() {
        return Err(Error::shape("optimal_reconstruction", &[x.len()], &[gm.dim()]));
    }
    quad.validate()?;
    let (noise, log_weights) = match *quad {
        Quadrature::GaussHermite { nodes_per_dim } => {
            if gm.dim() > 3 {
                return Err(Error::Argument(format!(
                    "tensor-product Gauss–Hermite limited to 3 dimensions, got {}",
                    gm.dim()
                )));
            }
            quadrature::gaussian_tensor_rule(nodes_per_dim, gm.dim(), sigma)
        }
        Quadrature::MonteCarlo { samples, seed } => {
            let mut rng = Prng::new(seed);
            let lw = -(samples as f64).ln();
            let pts = (0..samples)
                .map(|_| (0..gm.dim()).map(|_| sigma * rng.standard_normal()).collect())
                .collect();
            (pts, vec![lw; samples])
        }
    };

    let mut shifted = vec![0.0; x.len()];
    let mut log_terms = Vec::with_capacity(noise.len());
    for (eps, lw) in noise.iter().zip(&log_weights) {
        for ((s, xi), e) in shifted.iter_mut().zip(x).zip(eps) {
            *s = xi - e;
        }
        log_terms.push(lw + gm.log_pdf(&shifted));
    }
    let log_denominator = log_sum_exp(&log_terms);
    if !(log_denominator >= LOG_DENOMINATOR_FLOOR) {
        return Err(Error::Underflow {
            point: x.to_vec(),
            log_denominator,
        });
    }
    let mut out = vec![0.0; x.len()];
    for (eps, lt) in noise.iter().zip(&log_terms) {
        let w = (lt - log_denominator).exp();
        for ((o, xi), e) in out.iter_mut().zip(x).zip(eps) {
            *o += w * (xi - e);
        }
    }
    Ok(out)
}

/// Score estimate `(R(x) − x) / σ²` implied by a reconstruction.
pub fn score_from_reconstruction(reconstruction: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::Argument(format!("sigma must be positive, got {sigma}")));
    }
    if reconstruction.len() != x.len() {
        return Err(Error::shape(
            "score_from_reconstruction",
            &[reconstruction.len()],
            &[x.len()],
        ));
    }
    let s2 = sigma * sigma;
    Ok(reconstruction.iter().zip(x).map(|(r, x)| (r - x) / s2).collect())
}

/// Regular grid over `[lo, hi]^dim` restricted to points within
/// [`HIGH_DENSITY_NATS`] of the peak log-density.
pub fn high_density_grid(gm: &GaussianMixture, lo: f64, hi: f64, per_dim: usize) -> Vec<Vec<f64>> {
    let peak = gm.max_log_pdf();
    let step = if per_dim > 1 {
        (hi - lo) / (per_dim - 1) as f64
    } else {
        0.0
    };
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..gm.dim() {
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..per_dim).map(move |i| {
                    let mut q = p.clone();
                    q.push(lo + step * i as f64);
                    q
                })
            })
            .collect();
    }
    points.retain(|p| gm.log_pdf(p) >= peak - HIGH_DENSITY_NATS);
    points
}

fn euclidean(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `‖estimate − truth‖ / ‖truth‖`, or `None` when `truth` is ~0.
pub fn relative_score_error(estimate: &[f64], truth: &[f64]) -> Option<f64> {
    let norm = euclidean(truth);
    if norm < SCORE_FLOOR {
        return None;
    }
    let diff: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| a - b).collect();
    Some(euclidean(&diff) / norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub sigma: f64,
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<StudyRow>,
    /// Errors never grow (beyond 1e-6) as σ shrinks.
    pub monotone: bool,
}

/// For each σ (strictly decreasing), the worst relative error of the score
/// implied by `R*_σ` against the analytic score over `grid`.
pub fn limit_convergence_study(
    gm: &GaussianMixture,
    sigmas: &[f64],
    grid: &[Vec<f64>],
    quad: &Quadrature,
) -> Result<ConvergenceStudy> {
    if sigmas.is_empty() || grid.is_empty() {
        return Err(Error::Argument("need at least one sigma and one grid point".into()));
    }
    if sigmas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Argument(format!("sigmas must strictly decrease: {sigmas:?}")));
    }
    let peak = gm.max_log_pdf();
    if let Some(p) = grid.iter().find(|p| gm.log_pdf(p) < peak - HIGH_DENSITY_NATS) {
        return Err(Error::Argument(format!(
            "grid point {p:?} lies outside the high-density region"
        )));
    }
    let truths: Vec<Vec<f64>> = grid.iter().map(|p| gm.score(p)).collect();

    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let mut max_err: f64 = 0.0;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (p, truth) in grid.iter().zip(&truths) {
            let r = optimal_reconstruction(gm, sigma, p, quad)?;
            let est = score_from_reconstruction(&r, p, sigma)?;
            if let Some(e) = relative_score_error(&est, truth) {
                max_err = max_err.max(e);
                sum += e;
                count += 1;
            }
        }
        rows.push(StudyRow {
            sigma,
            max_relative_error: max_err,
            mean_relative_error: if count > 0 { sum / count as f64 } else { 0.0 },
        });
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].max_relative_error <= w[0].max_relative_error + 1e-6);
    Ok(ConvergenceStudy { rows, monotone })
}

/// `R*_σ` packaged as a reconstruction map, so sampling chains can run on
/// the exact optimum instead of a trained network.
#[derive(Debug, Clone)]
pub struct OptimalReconstructor {
    pub mixture: GaussianMixture,
    pub sigma: f64,
    pub quadrature: Quadrature,
}

impl Reconstructor for OptimalReconstructor {
    fn data_dim(&self) -> usize {
        self.mixture.dim()
    }

    fn reconstruct(&self, x: &Tensor) -> Result<Tensor> {
        let rows = x
            .iter_rows()
            .map(|row| optimal_reconstruction(&self.mixture, self.sigma, row, &self.quadrature))
            .collect::<Result<Vec<_>>>()?;
        Tensor::from_rows(&rows)
    }
}

/// A reconstruction map's implied score next to the analytic score on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreField {
    pub points: Vec<Vec<f64>>,
    pub estimates: Vec<Vec<f64>>,
    pub truths: Vec<Vec<f64>>,
}

impl ScoreField {
    /// Fraction of points whose estimate points the same way as the truth
    /// (positive inner product).
    pub fn sign_agreement(&self) -> f64 {
        let hits = self
            .estimates
            .iter()
            .zip(&self.truths)
            .filter(|(e, t)| e.iter().zip(t.iter()).map(|(a, b)| a * b).sum::<f64>() > 0.0)
            .count();
        hits as f64 / self.points.len() as f64
    }

    /// Pearson correlation over all score coordinates.
    pub fn correlation(&self) -> f64 {
        let a: Vec<f64> = self.estimates.iter().flatten().copied().collect();
        let b: Vec<f64> = self.truths.iter().flatten().copied().collect();
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(&b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    /// Largest relative error, skipping points with a vanishing true score.
    pub fn max_relative_error(&self) -> f64 {
        self.estimates
            .iter()
            .zip(&self.truths)
            .filter_map(|(e, t)| relative_score_error(e, t))
            .fold(0.0, f64::max)
    }
}

/// Evaluates `(R(x) − x) / σ²` for every grid point in a single batch.
pub fn score_field<R: Reconstructor + ?Sized>(
    model: &R,
    gm: &GaussianMixture,
    sigma: f64,
    grid: &[Vec<f64>],
) -> Result<ScoreField> {
    if grid.is_empty() {
        return Err(Error::Argument("score field needs at least one grid point".into()));
    }
    if model.data_dim() != gm.dim() {
        return Err(Error::shape("score_field", &[model.data_dim()], &[gm.dim()]));
    }
    let x = Tensor::from_rows(grid)?;
    let r = model.reconstruct(&x)?;
    let estimates = r
        .iter_rows()
        .zip(grid)
        .map(|(r, p)| score_from_reconstruction(r, p, sigma))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreField {
        points: grid.to_vec(),
        estimates,
        truths: grid.iter().map(|p| gm.score(p)).collect(),
    })
}
