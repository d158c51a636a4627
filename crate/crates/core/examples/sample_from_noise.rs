//! Iterates a trained denoiser from uniform noise and tracks the true
//! log-density of the chain states.
//!
//! ```text
//! cargo run --release --example sample_from_noise -- [sigma] [epochs]
//! ```

use dae_score::io::{generate_mixture_dataset, RunConfig};
use dae_score::models::{train, Architecture, CorruptionSpec, ModelKind, TrainConfig};
use dae_score::rng::Prng;
use dae_score::sampler::{chain_diagnostics, sample_from_noise, ChainConfig};

fn main() -> dae_score::Result<()> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().map_or(0.05, |s| s.parse().expect("sigma"));
    let epochs: usize = args.next().map_or(30, |s| s.parse().expect("epochs"));

    let gm = RunConfig::default().mixture()?;
    let data = generate_mixture_dataset(&gm, 10_000, &mut Prng::new(1))?;
    let cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let (model, _) = train(
        ModelKind::Dae,
        &data,
        &Architecture::with_latent(2),
        CorruptionSpec::new(sigma)?,
        &cfg,
    )?;

    let chain = ChainConfig::new(20, 0.0, 1)?;
    let trace = sample_from_noise(&model, 256, &chain, &mut Prng::new(7))?;
    let summary = chain_diagnostics(&trace, &gm)?;
    let gains = summary.log_density_gain();
    let improved = gains.iter().filter(|g| **g > 0.0).count();
    let mut sorted = gains.clone();
    sorted.sort_by(f64::total_cmp);

    println!("sigma {sigma}, {epochs} epochs, 256 chains of 20 steps");
    println!("step  mean log p");
    for (step, ld) in trace.steps.iter().zip(&summary.log_density) {
        if step % 5 == 0 {
            println!("{step:>4}  {:.4}", ld.iter().sum::<f64>() / ld.len() as f64);
        }
    }
    println!("{improved} of 256 chains gained density; median gain {:.3} nats", sorted[128]);
    let near: Vec<f64> = trace.last().data().to_vec();
    let left = near.iter().filter(|&&x| x < 0.5).count();
    println!("final states: {left} below 0.5, {} above", near.len() - left);
    Ok(())
}
