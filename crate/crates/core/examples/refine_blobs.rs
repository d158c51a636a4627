//! Trains a denoising VAE on 8 × 8 blob images, decodes prior draws and
//! refines them with the denoiser. Writes PGM grids of the decoded and
//! refined images.
//!
//! ```text
//! cargo run --release --example refine_blobs -- [out_dir] [epochs]
//! ```

use dae_score::io::{generate_blobs8x8, write_pgm_grid};
use dae_score::models::{train, Architecture, CorruptionSpec, ModelKind, TrainConfig};
use dae_score::rng::Prng;
use dae_score::sampler::{refine_from_prior, ChainConfig};
use dae_score::Error;

fn main() -> dae_score::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "out/refine_blobs".into()));
    let epochs: usize = args.next().map_or(20, |s| s.parse().expect("epochs"));

    let data = generate_blobs8x8(2_000, &mut Prng::new(1))?;
    let cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let (model, losses) = train(ModelKind::Dvae, &data, &Architecture::with_latent(8), CorruptionSpec::new(0.2)?, &cfg)?;
    let last = losses.last().expect("at least one epoch");
    println!("final epoch: reconstruction {:.4}, KL {:.4}", last.reconstruction, last.regularizer);

    let trace = refine_from_prior(&model, 36, &ChainConfig::new(10, 0.0, 1)?, &mut Prng::new(3))?;
    let moved: f64 = trace.displacements.iter().flatten().sum();
    println!("mean displacement per step {:.4}", moved / (36.0 * 10.0));

    std::fs::create_dir_all(&out).map_err(|source| Error::Io { path: out.clone(), source })?;
    write_pgm_grid(out.join("decoded.pgm"), trace.initial(), 8, 6)?;
    write_pgm_grid(out.join("refined.pgm"), trace.last(), 8, 6)?;
    println!("wrote {}/decoded.pgm and refined.pgm", out.display());
    Ok(())
}
