//! Trains the same denoising autoencoder twice on a two-mode 1-D mixture,
//! once with binary cross-entropy and once with squared error, and compares
//! the two reconstruction maps and their implied scores.
//!
//! ```text
//! cargo run --release --example bce_vs_mse -- [sigma] [epochs]
//! ```

use dae_score::io::{generate_mixture_dataset, RunConfig};
use dae_score::losses::LossKind;
use dae_score::models::{train, Architecture, CorruptionSpec, ModelKind, TrainConfig};
use dae_score::oracle::{high_density_grid, score_field};
use dae_score::rng::Prng;
use dae_score::Tensor;

fn main() -> dae_score::Result<()> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().map_or(0.5, |s| s.parse().expect("sigma"));
    let epochs: usize = args.next().map_or(30, |s| s.parse().expect("epochs"));

    let gm = RunConfig::default().mixture()?;
    let data = generate_mixture_dataset(&gm, 10_000, &mut Prng::new(1))?;
    let grid = high_density_grid(&gm, 0.0, 1.0, 201);
    let arch = Architecture::with_latent(2);
    let corruption = CorruptionSpec::new(sigma)?;

    let mut models = Vec::new();
    for loss in [LossKind::Bce, LossKind::Mse] {
        let cfg = TrainConfig {
            loss,
            epochs,
            ..TrainConfig::default()
        };
        let (model, trace) = train(ModelKind::Dae, &data, &arch, corruption, &cfg)?;
        let last = trace.last().expect("epochs ≥ 1");
        println!("{loss}: final epoch loss {:.6}", last.reconstruction);
        let field = score_field(&model, &gm, sigma, &grid)?;
        println!(
            "{loss}: sign agreement {:.3}, correlation {:.3}",
            field.sign_agreement(),
            field.correlation()
        );
        models.push(model);
    }

    let x = Tensor::from_rows(&grid)?;
    let r_bce = models[0].reconstruct(&x)?;
    let r_mse = models[1].reconstruct(&x)?;
    let gap = r_bce
        .data()
        .iter()
        .zip(r_mse.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |R_bce - R_mse| over {} grid points: {gap:.4}", grid.len());
    for i in (0..grid.len()).step_by(grid.len() / 8) {
        println!(
            "  x = {:.3}  R_bce = {:.4}  R_mse = {:.4}",
            grid[i][0],
            r_bce.data()[i],
            r_mse.data()[i]
        );
    }
    Ok(())
}
