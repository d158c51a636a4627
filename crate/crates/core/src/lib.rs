//! Denoising autoencoders as score estimators.
//!
//! A denoiser `R` trained on `x + ε, ε ~ N(0, σ² I)` satisfies
//! `(R(x) − x) / σ² ≈ ∇ ln p(x)` for small `σ`, whether it is trained with
//! squared error or binary cross-entropy. This crate trains plain, variational
//! and adversarial denoising autoencoders on `[0, 1]`-valued data, checks
//! their implied scores against exact Gaussian-mixture oracles, and runs the
//! iterated-reconstruction chains that turn a denoiser into a sampler.
//!
//! ```no_run
//! use dae_score::io::{generate_mixture_dataset, RunConfig};
//! use dae_score::models::{train, Architecture, CorruptionSpec, ModelKind, TrainConfig};
//! use dae_score::rng::Prng;
//! use dae_score::sampler::{sample_from_noise, ChainConfig};
//!
//! let gm = RunConfig::default().mixture()?;
//! let data = generate_mixture_dataset(&gm, 10_000, &mut Prng::new(1))?;
//! let (model, _losses) = train(
//!     ModelKind::Dae,
//!     &data,
//!     &Architecture::with_latent(2),
//!     CorruptionSpec::new(0.1)?,
//!     &TrainConfig::default(),
//! )?;
//! let trace = sample_from_noise(&model, 256, &ChainConfig::new(20, 0.0, 1)?, &mut Prng::new(2))?;
//! println!("{:?}", trace.last().row(0));
//! # Ok::<(), dae_score::Error>(())
//! ```

pub mod activation;
pub mod cli;
pub mod error;
pub mod io;
pub mod losses;
pub mod models;
pub mod nn;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::Tensor;
