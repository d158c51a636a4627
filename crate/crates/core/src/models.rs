//! Denoising autoencoders (plain, variational and adversarial) and their
//! training loops.
//!
//! All three share the corruption `x̃ = x + ε, ε ~ N(0, σ² I)` and a decoder
//! with a sigmoid head, so the reconstruction map `R(x) = d(e(x))` is
//! `(0,1)`-valued. Corrupted inputs are deliberately left unclamped.

use std::fmt;
use std::str::FromStr;

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::losses::{self, LossKind};
use crate::nn::{AdamConfig, AdamState, ForwardMode, Mlp, MlpParams, MlpSpec};
use crate::rng::{sample_gaussian, Prng};
use crate::sampler::{Generator, Reconstructor};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    pub sigma: f64,
}

impl Default for CorruptionSpec {
    /// Noise variance 0.25.
    fn default() -> Self {
        CorruptionSpec { sigma: 0.5 }
    }
}

impl CorruptionSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::Argument(format!("corruption sigma must be ≥ 0, got {sigma}")));
        }
        Ok(CorruptionSpec { sigma })
    }
}

/// `x + ε` with `ε ~ N(0, σ² I)`, not clamped.
pub fn corrupt(x: &Tensor, spec: CorruptionSpec, rng: &mut Prng) -> Result<Tensor> {
    if spec.sigma == 0.0 {
        return Ok(x.clone());
    }
    let noise = sample_gaussian(rng, x.shape(), spec.sigma)?;
    x.add(&noise)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Dae,
    Dvae,
    Daae,
}

impl ModelKind {
    pub fn tag(self) -> u8 {
        match self {
            ModelKind::Dae => 0,
            ModelKind::Dvae => 1,
            ModelKind::Daae => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ModelKind::Dae),
            1 => Some(ModelKind::Dvae),
            2 => Some(ModelKind::Daae),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Dae => "dae",
            ModelKind::Dvae => "dvae",
            ModelKind::Daae => "daae",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dae" => Ok(ModelKind::Dae),
            "dvae" => Ok(ModelKind::Dvae),
            "daae" => Ok(ModelKind::Daae),
            other => Err(Error::Argument(format!("unknown model kind {other:?}"))),
        }
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bce" => Ok(LossKind::Bce),
            "mse" => Ok(LossKind::Mse),
            other => Err(Error::Argument(format!("unknown loss kind {other:?}"))),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Bce => "bce",
            LossKind::Mse => "mse",
        })
    }
}

/// Layer widths and regularizer-network settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    /// Encoder hidden widths; the decoder mirrors them.
    pub hidden: Vec<usize>,
    pub latent_dim: usize,
    pub discriminator_hidden: Vec<usize>,
    pub dropout_rate: f64,
    pub leaky_slope: f64,
}

impl Architecture {
    /// Two hidden layers of 128 units around a latent of size `latent_dim`.
    pub fn with_latent(latent_dim: usize) -> Self {
        Architecture {
            hidden: vec![128, 128],
            latent_dim,
            discriminator_hidden: vec![64, 64],
            dropout_rate: 0.2,
            leaky_slope: 0.2,
        }
    }
}

/// The adversary of a DAAE: scores latent codes as prior draws (→1) or
/// encodings (→0).
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    pub net: Mlp,
    pub dropout_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder {
    pub kind: ModelKind,
    pub encoder: Mlp,
    pub decoder: Mlp,
    pub discriminator: Option<Discriminator>,
    pub corruption: CorruptionSpec,
}

impl Autoencoder {
    pub fn new(
        kind: ModelKind,
        data_dim: usize,
        arch: &Architecture,
        corruption: CorruptionSpec,
        rng: &mut Prng,
    ) -> Result<Self> {
        if data_dim == 0 || arch.latent_dim == 0 {
            return Err(Error::Argument("data and latent dimensions must be positive".into()));
        }
        let encoder_out = match kind {
            ModelKind::Dvae => 2 * arch.latent_dim,
            _ => arch.latent_dim,
        };
        let mut enc_sizes = vec![data_dim];
        enc_sizes.extend(&arch.hidden);
        enc_sizes.push(encoder_out);
        let mut dec_sizes = vec![arch.latent_dim];
        dec_sizes.extend(arch.hidden.iter().rev());
        dec_sizes.push(data_dim);

        let encoder = Mlp::init(
            MlpSpec::new(enc_sizes, Activation::Relu, Activation::Identity)?,
            rng,
        )?;
        let decoder = Mlp::init(
            MlpSpec::new(dec_sizes, Activation::Relu, Activation::Sigmoid)?,
            rng,
        )?;
        let discriminator = if kind == ModelKind::Daae {
            let mut sizes = vec![arch.latent_dim];
            sizes.extend(&arch.discriminator_hidden);
            sizes.push(1);
            let spec = MlpSpec::new(sizes, Activation::LeakyRelu(arch.leaky_slope), Activation::Sigmoid)?;
            Some(Discriminator {
                net: Mlp::init(spec, rng)?,
                dropout_rate: arch.dropout_rate,
            })
        } else {
            None
        };
        Self::from_parts(kind, encoder, decoder, discriminator, corruption)
    }

    /// Assembles a model from existing networks, checking that their
    /// dimensions line up.
    pub fn from_parts(
        kind: ModelKind,
        encoder: Mlp,
        decoder: Mlp,
        discriminator: Option<Discriminator>,
        corruption: CorruptionSpec,
    ) -> Result<Self> {
        CorruptionSpec::new(corruption.sigma)?;
        let latent = decoder.spec.input_dim();
        let expected_enc_out = match kind {
            ModelKind::Dvae => 2 * latent,
            _ => latent,
        };
        if encoder.spec.output_dim() != expected_enc_out {
            return Err(Error::Argument(format!(
                "encoder emits {} values, {kind} with latent {latent} needs {expected_enc_out}",
                encoder.spec.output_dim()
            )));
        }
        if decoder.spec.output_dim() != encoder.spec.input_dim() {
            return Err(Error::Argument(format!(
                "decoder emits {} values for data of dimension {}",
                decoder.spec.output_dim(),
                encoder.spec.input_dim()
            )));
        }
        if decoder.spec.output_activation != Activation::Sigmoid {
            return Err(Error::Argument("decoder needs a sigmoid output head".into()));
        }
        match (&discriminator, kind) {
            (Some(d), ModelKind::Daae) => {
                if d.net.spec.input_dim() != latent || d.net.spec.output_dim() != 1 {
                    return Err(Error::Argument(format!(
                        "discriminator must map {latent} → 1, got {:?}",
                        d.net.spec.layer_sizes
                    )));
                }
                if !(0.0..1.0).contains(&d.dropout_rate) {
                    return Err(Error::Argument(format!("dropout rate {} outside [0, 1)", d.dropout_rate)));
                }
            }
            (None, ModelKind::Daae) => {
                return Err(Error::Argument("a DAAE needs a discriminator".into()))
            }
            (Some(_), _) => {
                return Err(Error::Argument(format!("{kind} takes no discriminator")))
            }
            (None, _) => {}
        }
        Ok(Autoencoder {
            kind,
            encoder,
            decoder,
            discriminator,
            corruption,
        })
    }

    pub fn data_dim(&self) -> usize {
        self.encoder.spec.input_dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.decoder.spec.input_dim()
    }

    /// Deterministic latent code: the encoder output, or its mean half for
    /// a DVAE.
    pub fn encode(&self, x: &Tensor) -> Result<Tensor> {
        let out = self.encoder.predict(x)?;
        match self.kind {
            ModelKind::Dvae => Ok(out.split_cols(self.latent_dim())?.0),
            _ => Ok(out),
        }
    }

    pub fn decode(&self, z: &Tensor) -> Result<Tensor> {
        self.decoder.predict(z)
    }

    /// `R(x) = d(e(x))` in eval mode.
    pub fn reconstruct(&self, x: &Tensor) -> Result<Tensor> {
        self.decode(&self.encode(x)?)
    }
}

impl Reconstructor for Autoencoder {
    fn data_dim(&self) -> usize {
        Autoencoder::data_dim(self)
    }

    fn reconstruct(&self, x: &Tensor) -> Result<Tensor> {
        Autoencoder::reconstruct(self, x)
    }
}

impl Generator for Autoencoder {
    fn latent_dim(&self) -> usize {
        Autoencoder::latent_dim(self)
    }

    fn decode(&self, z: &Tensor) -> Result<Tensor> {
        Autoencoder::decode(self, z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub loss: LossKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Weight of the KL term (DVAE) or adversarial encoder loss (DAAE).
    pub regularizer_weight: f64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            loss: LossKind::Bce,
            epochs: 20,
            batch_size: 64,
            seed: 0,
            regularizer_weight: 1.0,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Argument("epochs and batch size must be ≥ 1".into()));
        }
        if !(self.regularizer_weight >= 0.0) {
            return Err(Error::Argument(format!(
                "regularizer weight must be ≥ 0, got {}",
                self.regularizer_weight
            )));
        }
        self.adam.validate()
    }
}

/// Adam state for every network a model trains.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimizers {
    pub encoder: AdamState,
    pub decoder: AdamState,
    pub discriminator: Option<AdamState>,
    /// Separate state for the encoder's adversarial update.
    pub encoder_adversarial: Option<AdamState>,
}

impl Optimizers {
    pub fn new(model: &Autoencoder, config: AdamConfig) -> Result<Self> {
        let (discriminator, encoder_adversarial) = match &model.discriminator {
            Some(d) => (
                Some(AdamState::new(&d.net.params, config)?),
                Some(AdamState::new(&model.encoder.params, config)?),
            ),
            None => (None, None),
        };
        Ok(Optimizers {
            encoder: AdamState::new(&model.encoder.params, config)?,
            decoder: AdamState::new(&model.decoder.params, config)?,
            discriminator,
            encoder_adversarial,
        })
    }
}

/// Losses from one optimizer step. `regularizer` is the KL term for a DVAE
/// or the discriminator loss for a DAAE; `adversarial` is the DAAE encoder
/// loss.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepLosses {
    pub reconstruction: f64,
    pub regularizer: f64,
    pub adversarial: f64,
}

fn check_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numeric(format!("{name} loss became {value}")))
    }
}

fn train_mode<'a>() -> ForwardMode<'a> {
    ForwardMode::Train {
        dropout_rate: 0.0,
        rng: None,
    }
}

/// One denoising step: corrupt, reconstruct, backpropagate the loss between
/// the clean batch and `R(x̃)` through both networks, update.
pub fn dae_train_step(
    model: &mut Autoencoder,
    batch: &Tensor,
    cfg: &TrainConfig,
    rng: &mut Prng,
    optim: &mut Optimizers,
) -> Result<f64> {
    let noisy = corrupt(batch, model.corruption, rng)?;
    let (z, enc_cache) = model.encoder.forward(&noisy, train_mode())?;
    let (recon, dec_cache) = model.decoder.forward(&z, train_mode())?;
    let loss = losses::reconstruction_loss(cfg.loss, batch, &recon)?;
    check_finite("reconstruction", loss.value)?;

    let (dec_grads, grad_z) = model.decoder.backward(&dec_cache, &loss.grad)?;
    let (enc_grads, _) = model.encoder.backward(&enc_cache, &grad_z)?;
    optim.decoder.step(&mut model.decoder.params, &dec_grads)?;
    optim.encoder.step(&mut model.encoder.params, &enc_grads)?;
    Ok(loss.value)
}

/// Returns `(reconstruction, kl)`.
pub fn dvae_train_step(
    model: &mut Autoencoder,
    batch: &Tensor,
    cfg: &TrainConfig,
    rng: &mut Prng,
    optim: &mut Optimizers,
) -> Result<(f64, f64)> {
    if model.kind != ModelKind::Dvae {
        return Err(Error::Argument(format!("dvae step on a {}", model.kind)));
    }
    let latent = model.latent_dim();
    let noisy = corrupt(batch, model.corruption, rng)?;
    let (enc_out, enc_cache) = model.encoder.forward(&noisy, train_mode())?;
    let (mu, logvar) = enc_out.split_cols(latent)?;
    let eta = sample_gaussian(rng, mu.shape(), 1.0)?;
    let std = logvar.map(|lv| (0.5 * lv).exp());
    let z = mu.add(&std.mul(&eta)?)?;

    let (recon, dec_cache) = model.decoder.forward(&z, train_mode())?;
    let rec = losses::reconstruction_loss(cfg.loss, batch, &recon)?;
    let kl = losses::kl_to_standard_normal(&mu, &logvar)?;
    check_finite("reconstruction", rec.value)?;
    check_finite("KL", kl.value)?;

    let w = cfg.regularizer_weight;
    let (dec_grads, grad_z) = model.decoder.backward(&dec_cache, &rec.grad)?;
    let grad_mu = grad_z.add(&kl.grad_mu.scale(w))?;
    let grad_logvar = grad_z
        .mul(&eta)?
        .mul(&std.scale(0.5))?
        .add(&kl.grad_logvar.scale(w))?;
    let (enc_grads, _) = model
        .encoder
        .backward(&enc_cache, &grad_mu.concat_cols(&grad_logvar)?)?;
    optim.decoder.step(&mut model.decoder.params, &dec_grads)?;
    optim.encoder.step(&mut model.encoder.params, &enc_grads)?;
    Ok((rec.value, kl.value))
}

fn discriminator_parts<'a>(
    model: &'a mut Autoencoder,
    optim: &'a mut Optimizers,
) -> Result<(&'a mut Discriminator, &'a mut AdamState)> {
    match (model.discriminator.as_mut(), optim.discriminator.as_mut()) {
        (Some(d), Some(o)) => Ok((d, o)),
        _ => Err(Error::Argument("adversarial phase needs a DAAE and its optimizers".into())),
    }
}

/// Phase 1 of a DAAE step: a plain denoising update of encoder and decoder.
pub fn daae_reconstruction_phase(
    model: &mut Autoencoder,
    batch: &Tensor,
    noisy: &Tensor,
    cfg: &TrainConfig,
    optim: &mut Optimizers,
) -> Result<f64> {
    let (z, enc_cache) = model.encoder.forward(noisy, train_mode())?;
    let (recon, dec_cache) = model.decoder.forward(&z, train_mode())?;
    let loss = losses::reconstruction_loss(cfg.loss, batch, &recon)?;
    check_finite("reconstruction", loss.value)?;
    let (dec_grads, grad_z) = model.decoder.backward(&dec_cache, &loss.grad)?;
    let (enc_grads, _) = model.encoder.backward(&enc_cache, &grad_z)?;
    optim.decoder.step(&mut model.decoder.params, &dec_grads)?;
    optim.encoder.step(&mut model.encoder.params, &enc_grads)?;
    Ok(loss.value)
}

/// Phase 2: teach the discriminator to tell prior draws from encodings.
pub fn daae_discriminator_phase(
    model: &mut Autoencoder,
    noisy: &Tensor,
    rng: &mut Prng,
    optim: &mut Optimizers,
) -> Result<f64> {
    let encoded = model.encoder.predict(noisy)?;
    let prior = sample_gaussian(rng, encoded.shape(), 1.0)?;
    let (disc, disc_opt) = discriminator_parts(model, optim)?;
    let rate = disc.dropout_rate;
    let (on_prior, prior_cache) = disc.net.forward(
        &prior,
        ForwardMode::Train { dropout_rate: rate, rng: Some(rng) },
    )?;
    let (on_encoded, enc_cache) = disc.net.forward(
        &encoded,
        ForwardMode::Train { dropout_rate: rate, rng: Some(rng) },
    )?;
    let adv = losses::adversarial_losses(&on_prior, &on_encoded)?;
    check_finite("discriminator", adv.disc_loss)?;
    let (mut grads, _) = disc.net.backward(&prior_cache, &adv.disc_grad_prior)?;
    let (grads_enc, _) = disc.net.backward(&enc_cache, &adv.disc_grad_encoded)?;
    grads.add_assign(&grads_enc)?;
    disc_opt.step(&mut disc.net.params, &grads)?;
    Ok(adv.disc_loss)
}

/// Phase 3: push encodings toward regions the discriminator calls prior.
pub fn daae_encoder_phase(
    model: &mut Autoencoder,
    noisy: &Tensor,
    cfg: &TrainConfig,
    rng: &mut Prng,
    optim: &mut Optimizers,
) -> Result<f64> {
    let (z, enc_cache) = model.encoder.forward(noisy, train_mode())?;
    let disc = model
        .discriminator
        .as_ref()
        .ok_or_else(|| Error::Argument("encoder phase needs a DAAE".into()))?;
    let (scores, disc_cache) = disc.net.forward(
        &z,
        ForwardMode::Train { dropout_rate: disc.dropout_rate, rng: Some(rng) },
    )?;
    // non-saturating: BCE against the "prior" label
    let adv = losses::bce_loss(&Tensor::full(scores.shape(), 1.0), &scores)?;
    check_finite("encoder adversarial", adv.value)?;
    let (_, grad_z) = disc
        .net
        .backward(&disc_cache, &adv.grad.scale(cfg.regularizer_weight))?;
    let (enc_grads, _) = model.encoder.backward(&enc_cache, &grad_z)?;
    let opt = optim
        .encoder_adversarial
        .as_mut()
        .ok_or_else(|| Error::Argument("missing adversarial encoder optimizer".into()))?;
    opt.step(&mut model.encoder.params, &enc_grads)?;
    Ok(adv.value)
}

/// Returns `(reconstruction, discriminator, encoder adversarial)` losses
/// after the three phases in order.
pub fn daae_train_step(
    model: &mut Autoencoder,
    batch: &Tensor,
    cfg: &TrainConfig,
    rng: &mut Prng,
    optim: &mut Optimizers,
) -> Result<(f64, f64, f64)> {
    if model.kind != ModelKind::Daae {
        return Err(Error::Argument(format!("daae step on a {}", model.kind)));
    }
    let noisy = corrupt(batch, model.corruption, rng)?;
    let rec = daae_reconstruction_phase(model, batch, &noisy, cfg, optim)?;
    let disc = daae_discriminator_phase(model, &noisy, rng, optim)?;
    let enc = daae_encoder_phase(model, &noisy, cfg, rng, optim)?;
    Ok((rec, disc, enc))
}

/// One optimizer step of whichever variant `model` is.
pub fn train_step(
    model: &mut Autoencoder,
    batch: &Tensor,
    cfg: &TrainConfig,
    rng: &mut Prng,
    optim: &mut Optimizers,
) -> Result<StepLosses> {
    Ok(match model.kind {
        ModelKind::Dae => StepLosses {
            reconstruction: dae_train_step(model, batch, cfg, rng, optim)?,
            ..StepLosses::default()
        },
        ModelKind::Dvae => {
            let (reconstruction, regularizer) = dvae_train_step(model, batch, cfg, rng, optim)?;
            StepLosses {
                reconstruction,
                regularizer,
                adversarial: 0.0,
            }
        }
        ModelKind::Daae => {
            let (reconstruction, regularizer, adversarial) =
                daae_train_step(model, batch, cfg, rng, optim)?;
            StepLosses {
                reconstruction,
                regularizer,
                adversarial,
            }
        }
    })
}

/// Per-epoch means of the step losses.
pub type LossTrace = Vec<StepLosses>;

fn check_dataset(model: &Autoencoder, data: &Tensor) -> Result<()> {
    if data.shape().len() != 2 || data.cols() != model.data_dim() {
        return Err(Error::shape("dataset", data.shape(), &[data.rows(), model.data_dim()]));
    }
    if let Some(v) = data.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("dataset value {v} outside [0, 1]")));
    }
    Ok(())
}

/// Continues training `model` for `cfg.epochs` shuffled minibatch epochs.
pub fn train_model(
    model: &mut Autoencoder,
    optim: &mut Optimizers,
    data: &Tensor,
    cfg: &TrainConfig,
    rng: &mut Prng,
) -> Result<LossTrace> {
    cfg.validate()?;
    check_dataset(model, data)?;
    let n = data.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let mut total = StepLosses::default();
        let mut steps = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = data.select_rows(chunk)?;
            let l = train_step(model, &batch, cfg, rng, optim).map_err(|e| match e {
                Error::Numeric(msg) => Error::Numeric(format!("epoch {epoch}, step {steps}: {msg}")),
                other => other,
            })?;
            total.reconstruction += l.reconstruction;
            total.regularizer += l.regularizer;
            total.adversarial += l.adversarial;
            steps += 1;
        }
        let s = steps as f64;
        trace.push(StepLosses {
            reconstruction: total.reconstruction / s,
            regularizer: total.regularizer / s,
            adversarial: total.adversarial / s,
        });
    }
    Ok(trace)
}

/// Builds a fresh model from `cfg.seed` and trains it on `data`.
pub fn train(
    kind: ModelKind,
    data: &Tensor,
    arch: &Architecture,
    corruption: CorruptionSpec,
    cfg: &TrainConfig,
) -> Result<(Autoencoder, LossTrace)> {
    cfg.validate()?;
    if data.is_empty() || data.shape().len() != 2 {
        return Err(Error::Argument("training needs a non-empty n × d dataset".into()));
    }
    let mut init_rng = Prng::with_stream(cfg.seed, 0);
    let mut model = Autoencoder::new(kind, data.cols(), arch, corruption, &mut init_rng)?;
    let mut optim = Optimizers::new(&model, cfg.adam)?;
    let mut rng = Prng::with_stream(cfg.seed, 1);
    let trace = train_model(&mut model, &mut optim, data, cfg, &mut rng)?;
    Ok((model, trace))
}

/// Total number of trainable scalars.
pub fn parameter_count(model: &Autoencoder) -> usize {
    let disc: usize = model
        .discriminator
        .as_ref()
        .map(|d| d.net.params.num_scalars())
        .unwrap_or(0);
    model.encoder.params.num_scalars() + model.decoder.params.num_scalars() + disc
}

fn params_differ(a: &MlpParams, b: &MlpParams) -> bool {
    a.tensors().iter().zip(b.tensors()).any(|(x, y)| x != &y)
}

/// Whether any encoder, decoder or discriminator parameter differs.
pub fn models_differ(a: &Autoencoder, b: &Autoencoder) -> bool {
    params_differ(&a.encoder.params, &b.encoder.params)
        || params_differ(&a.decoder.params, &b.decoder.params)
        || match (&a.discriminator, &b.discriminator) {
            (Some(x), Some(y)) => params_differ(&x.net.params, &y.net.params),
            _ => false,
        }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_uniform;

    fn small_arch(latent: usize) -> Architecture {
        Architecture {
            hidden: vec![16, 16],
            latent_dim: latent,
            discriminator_hidden: vec![8],
            dropout_rate: 0.2,
            leaky_slope: 0.2,
        }
    }

    fn toy_data(n: usize, d: usize, seed: u64) -> Tensor {
        sample_uniform(&mut Prng::new(seed), &[n, d], 0.2, 0.8).unwrap()
    }

    #[test]
    fn zero_sigma_corruption_is_identity() {
        let x = toy_data(4, 3, 1);
        let y = corrupt(&x, CorruptionSpec::new(0.0).unwrap(), &mut Prng::new(0)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn corruption_mean_recovers_input() {
        let x = Tensor::row_vector(&[0.1, 0.5, 0.9]).unwrap();
        let spec = CorruptionSpec::default();
        let mut rng = Prng::new(5);
        let mut acc = Tensor::zeros(x.shape());
        let n = 100_000;
        for _ in 0..n {
            acc.add_assign(&corrupt(&x, spec, &mut rng).unwrap()).unwrap();
        }
        for (a, v) in acc.data().iter().zip(x.data()) {
            assert!((a / n as f64 - v).abs() <= 0.01);
        }
    }

    #[test]
    fn corruption_is_seeded_and_unclamped() {
        let x = Tensor::full(&[1, 200], 0.95);
        let a = corrupt(&x, CorruptionSpec::default(), &mut Prng::new(9)).unwrap();
        let b = corrupt(&x, CorruptionSpec::default(), &mut Prng::new(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.data().iter().any(|&v| v > 1.0));
    }

    #[test]
    fn reconstruction_is_deterministic_and_in_range() {
        for kind in [ModelKind::Dae, ModelKind::Dvae, ModelKind::Daae] {
            let m = Autoencoder::new(kind, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
            let x = sample_uniform(&mut Prng::new(2), &[10, 3], -3.0, 3.0).unwrap();
            let a = m.reconstruct(&x).unwrap();
            assert_eq!(a, m.reconstruct(&x).unwrap());
            assert!(a.data().iter().all(|&v| v > 0.0 && v < 1.0));
            assert_ne!(a.row(0), a.row(1));
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = Autoencoder::new(ModelKind::Dae, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
        assert!(matches!(m.reconstruct(&Tensor::zeros(&[1, 4])), Err(Error::Shape { .. })));
    }

    #[test]
    fn from_parts_checks_wiring() {
        let dae = Autoencoder::new(ModelKind::Dae, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
        // a DAE encoder emits L values, a DVAE needs 2L
        assert!(Autoencoder::from_parts(
            ModelKind::Dvae,
            dae.encoder.clone(),
            dae.decoder.clone(),
            None,
            dae.corruption
        )
        .is_err());
        assert!(Autoencoder::from_parts(ModelKind::Daae, dae.encoder, dae.decoder, None, dae.corruption).is_err());
    }

    #[test]
    fn dae_step_changes_parameters() {
        let data = toy_data(16, 3, 3);
        let cfg = TrainConfig::default();
        let mut m = Autoencoder::new(ModelKind::Dae, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
        let before = m.clone();
        let mut opt = Optimizers::new(&m, cfg.adam).unwrap();
        let loss = dae_train_step(&mut m, &data, &cfg, &mut Prng::new(4), &mut opt).unwrap();
        assert!(loss > 0.0);
        assert!(models_differ(&before, &m));
    }

    #[test]
    fn dvae_kl_non_negative() {
        let data = toy_data(32, 3, 3);
        let cfg = TrainConfig::default();
        let mut m = Autoencoder::new(ModelKind::Dvae, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
        let mut opt = Optimizers::new(&m, cfg.adam).unwrap();
        let mut rng = Prng::new(4);
        for _ in 0..50 {
            let (_, kl) = dvae_train_step(&mut m, &data, &cfg, &mut rng, &mut opt).unwrap();
            assert!(kl >= 0.0);
        }
    }

    #[test]
    fn daae_step_is_reproducible() {
        let data = toy_data(32, 3, 3);
        let cfg = TrainConfig::default();
        let run = || {
            let mut m = Autoencoder::new(ModelKind::Daae, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
            let mut opt = Optimizers::new(&m, cfg.adam).unwrap();
            let mut rng = Prng::new(4);
            let losses: Vec<_> = (0..5)
                .map(|_| daae_train_step(&mut m, &data, &cfg, &mut rng, &mut opt).unwrap())
                .collect();
            (m, losses)
        };
        let (a, la) = run();
        let (b, lb) = run();
        assert_eq!(la, lb);
        assert!(!models_differ(&a, &b));
    }

    #[test]
    fn one_epoch_full_batch_is_one_step_per_phase() {
        let data = toy_data(20, 3, 7);
        let cfg = TrainConfig {
            epochs: 1,
            batch_size: 20,
            ..TrainConfig::default()
        };
        let mut m = Autoencoder::new(ModelKind::Daae, 3, &small_arch(2), CorruptionSpec::default(), &mut Prng::new(1)).unwrap();
        let mut opt = Optimizers::new(&m, cfg.adam).unwrap();
        let trace = train_model(&mut m, &mut opt, &data, &cfg, &mut Prng::new(2)).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(opt.encoder.step, 1);
        assert_eq!(opt.decoder.step, 1);
        assert_eq!(opt.discriminator.as_ref().unwrap().step, 1);
        assert_eq!(opt.encoder_adversarial.as_ref().unwrap().step, 1);
    }

    #[test]
    fn trace_length_matches_epochs_and_empty_rejected() {
        let data = toy_data(30, 2, 8);
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 8,
            ..TrainConfig::default()
        };
        let (_, trace) = train(ModelKind::Dae, &data, &small_arch(2), CorruptionSpec::default(), &cfg).unwrap();
        assert_eq!(trace.len(), 3);
        let zero = TrainConfig { epochs: 0, ..cfg.clone() };
        assert!(train(ModelKind::Dae, &data, &small_arch(2), CorruptionSpec::default(), &zero).is_err());
    }

    #[test]
    fn dataset_outside_unit_interval_rejected() {
        let data = Tensor::from_rows(&[vec![0.5, 1.5]]).unwrap();
        let cfg = TrainConfig { epochs: 1, ..TrainConfig::default() };
        let err = train(ModelKind::Dae, &data, &small_arch(2), CorruptionSpec::default(), &cfg).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("daae".parse::<ModelKind>().unwrap(), ModelKind::Daae);
        assert_eq!("mse".parse::<LossKind>().unwrap(), LossKind::Mse);
        assert!("vae".parse::<ModelKind>().is_err());
        for k in [ModelKind::Dae, ModelKind::Dvae, ModelKind::Daae] {
            assert_eq!(ModelKind::from_tag(k.tag()), Some(k));
            assert_eq!(k.to_string().parse::<ModelKind>().unwrap(), k);
        }
    }
}
