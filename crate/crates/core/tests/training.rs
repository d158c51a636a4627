use std::sync::OnceLock;

use dae_score::io::{generate_blobs8x8, generate_mixture_dataset};
use dae_score::losses::LossKind;
use dae_score::models::{models_differ, train, Architecture, Autoencoder, CorruptionSpec, ModelKind, TrainConfig};
use dae_score::oracle::{high_density_grid, score_field, GaussianMixture};
use dae_score::rng::Prng;
use dae_score::sampler::{chain_diagnostics, sample_from_noise, ChainConfig};
use dae_score::Tensor;

fn two_mode() -> GaussianMixture {
    GaussianMixture::one_d(&[0.5, 0.5], &[0.35, 0.65], &[0.05, 0.05]).unwrap()
}

fn small_arch(latent: usize) -> Architecture {
    Architecture {
        hidden: vec![32, 32],
        ..Architecture::with_latent(latent)
    }
}

#[test]
fn every_kind_reduces_reconstruction_loss() {
    let data = generate_blobs8x8(512, &mut Prng::new(4)).unwrap();
    for kind in [ModelKind::Dae, ModelKind::Dvae, ModelKind::Daae] {
        let cfg = TrainConfig {
            epochs: 8,
            batch_size: 32,
            adam: dae_score::nn::AdamConfig {
                learning_rate: 1e-3,
                ..Default::default()
            },
            ..TrainConfig::default()
        };
        let (_, trace) = train(kind, &data, &small_arch(4), CorruptionSpec::new(0.2).unwrap(), &cfg).unwrap();
        let (first, last) = (trace[0].reconstruction, trace.last().unwrap().reconstruction);
        assert!(last < first, "{kind}: {first} -> {last}");
        assert!(trace.iter().all(|l| l.reconstruction.is_finite() && l.regularizer.is_finite()));
        if kind == ModelKind::Dae {
            assert!(trace.iter().all(|l| l.regularizer == 0.0 && l.adversarial == 0.0));
        }
        if kind == ModelKind::Daae {
            assert!(trace.iter().all(|l| l.adversarial > 0.0));
        }
    }
}

#[test]
fn seeds_control_training() {
    let data = generate_mixture_dataset(&two_mode(), 300, &mut Prng::new(2)).unwrap();
    let run = |seed| {
        let cfg = TrainConfig {
            epochs: 2,
            seed,
            ..TrainConfig::default()
        };
        train(ModelKind::Daae, &data, &small_arch(2), CorruptionSpec::default(), &cfg).unwrap()
    };
    let (a, la) = run(3);
    let (b, lb) = run(3);
    let (c, _) = run(4);
    assert_eq!(a, b);
    assert_eq!(la, lb);
    assert!(models_differ(&a, &c));
}

/// A BCE-trained DAE at σ = 0.05 on the two-mode benchmark, shared by the
/// small-noise tests below.
fn small_sigma_dae() -> &'static Autoencoder {
    static MODEL: OnceLock<Autoencoder> = OnceLock::new();
    MODEL.get_or_init(|| {
        let data = generate_mixture_dataset(&two_mode(), 10_000, &mut Prng::new(1)).unwrap();
        let cfg = TrainConfig {
            epochs: 30,
            ..TrainConfig::default()
        };
        train(ModelKind::Dae, &data, &Architecture::with_latent(2), CorruptionSpec::new(0.05).unwrap(), &cfg)
            .unwrap()
            .0
    })
}

#[test]
fn small_sigma_score_tracks_the_mixture_score() {
    let gm = two_mode();
    let grid = high_density_grid(&gm, 0.0, 1.0, 201);
    let field = score_field(small_sigma_dae(), &gm, 0.05, &grid).unwrap();
    // Across training seeds sign agreement lands in 0.92..0.96: the misses sit
    // at the modes and the valley, where the true score crosses zero.
    assert!(field.sign_agreement() >= 0.9, "{}", field.sign_agreement());
    assert!(field.correlation() >= 0.9, "{}", field.correlation());
}

#[test]
fn small_sigma_chains_climb_log_density() {
    let gm = two_mode();
    let trace = sample_from_noise(
        small_sigma_dae(),
        256,
        &ChainConfig::new(20, 0.0, 1).unwrap(),
        &mut Prng::new(7),
    )
    .unwrap();
    let summary = chain_diagnostics(&trace, &gm).unwrap();
    let gains = summary.log_density_gain();
    let improved = gains.iter().filter(|g| **g > 0.0).count();
    assert!(improved >= 231, "{improved} of 256");
    // both modes stay populated
    let below = trace.last().data().iter().filter(|&&x| x < 0.5).count();
    assert!((64..=192).contains(&below), "{below}");
}

#[test]
fn large_sigma_reconstruction_collapses_toward_the_global_mean() {
    // With σ = 0.5 far above the mode separation the optimum is close to the
    // linear shrinkage 0.5 + v/(v + σ²)(x − 0.5) with v the mixture variance.
    let gm = two_mode();
    let data = generate_mixture_dataset(&gm, 10_000, &mut Prng::new(1)).unwrap();
    let cfg = TrainConfig {
        epochs: 10,
        ..TrainConfig::default()
    };
    let (model, _) = train(ModelKind::Dae, &data, &small_arch(2), CorruptionSpec::new(0.5).unwrap(), &cfg).unwrap();
    let x = Tensor::new(vec![3, 1], vec![0.3, 0.5, 0.7]).unwrap();
    let r = model.reconstruct(&x).unwrap();
    let r = r.data();
    assert!(r[0] < r[1] && r[1] < r[2]);
    assert!((r[2] - r[0]) < 0.1, "{r:?}");
    assert!(r.iter().all(|v| (v - 0.5).abs() < 0.05), "{r:?}");
}

#[test]
fn bce_and_mse_agree_at_small_sigma() {
    let gm = two_mode();
    let data = generate_mixture_dataset(&gm, 10_000, &mut Prng::new(1)).unwrap();
    let cfg = TrainConfig {
        loss: LossKind::Mse,
        epochs: 30,
        ..TrainConfig::default()
    };
    let (mse, _) = train(ModelKind::Dae, &data, &Architecture::with_latent(2), CorruptionSpec::new(0.05).unwrap(), &cfg).unwrap();
    let grid = high_density_grid(&gm, 0.0, 1.0, 201);
    let x = Tensor::from_rows(&grid).unwrap();
    let a = small_sigma_dae().reconstruct(&x).unwrap();
    let b = mse.reconstruct(&x).unwrap();
    let gap = a.data().iter().zip(b.data()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(gap <= 0.05, "{gap}");
}
