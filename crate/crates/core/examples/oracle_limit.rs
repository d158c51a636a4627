//! Relative error of the score implied by the optimal reconstruction as the
//! noise level shrinks, for the two-mode mixture, plus the effect of the
//! quadrature size when σ is much wider than a component.
//!
//! ```text
//! cargo run --release --example oracle_limit
//! ```

use dae_score::io::RunConfig;
use dae_score::oracle::{high_density_grid, limit_convergence_study, optimal_reconstruction, GaussianMixture, Quadrature};

fn main() -> dae_score::Result<()> {
    let gm = RunConfig::default().mixture()?;
    let grid = high_density_grid(&gm, 0.0, 1.0, 201);
    let sigmas = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005];
    let study = limit_convergence_study(&gm, &sigmas, &grid, &Quadrature::default())?;
    println!("{:>8}  {:>12}  {:>12}", "sigma", "max rel err", "mean rel err");
    for row in &study.rows {
        println!("{:>8}  {:>12.3e}  {:>12.3e}", row.sigma, row.max_relative_error, row.mean_relative_error);
    }
    println!("monotone: {}", study.monotone);

    let (s, sigma, x) = (0.03, 0.2, 0.55);
    let narrow = GaussianMixture::one_d(&[1.0], &[0.5], &[s])?;
    let exact = (s * s * x + sigma * sigma * 0.5) / (s * s + sigma * sigma);
    println!("\ns = {s}, sigma = {sigma}: error of R*({x}) by node count");
    for n in [32, 64, 128, 256, 512] {
        let q = Quadrature::GaussHermite { nodes_per_dim: n };
        let r = optimal_reconstruction(&narrow, sigma, &[x], &q)?[0];
        println!("{n:>5}  {:.3e}", (r - exact).abs());
    }
    Ok(())
}
