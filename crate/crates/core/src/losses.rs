//! Reconstruction losses and the generative-autoencoder regularizers.
//!
//! Every loss is a mean over all elements (reconstruction losses) or over the
//! batch (KL), and returns its gradient alongside the value.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Log arguments are clamped to `[CLAMP, 1 - CLAMP]`.
pub const CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Bce,
    Mse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossValue {
    pub value: f64,
    /// Gradient with respect to the reconstruction.
    pub grad: Tensor,
}

pub fn reconstruction_loss(kind: LossKind, target: &Tensor, reconstruction: &Tensor) -> Result<LossValue> {
    match kind {
        LossKind::Bce => bce_loss(target, reconstruction),
        LossKind::Mse => mse_loss(target, reconstruction),
    }
}

pub fn mse_loss(target: &Tensor, reconstruction: &Tensor) -> Result<LossValue> {
    if target.shape() != reconstruction.shape() {
        return Err(Error::shape("mse_loss", target.shape(), reconstruction.shape()));
    }
    let n = target.len() as f64;
    let diff = reconstruction.sub(target)?;
    let value = diff.data().iter().map(|d| d * d).sum::<f64>() / n;
    Ok(LossValue {
        value,
        grad: diff.scale(2.0 / n),
    })
}

fn clamp_prob(r: f64) -> f64 {
    r.clamp(CLAMP, 1.0 - CLAMP)
}

/// Binary cross-entropy `-[x ln r + (1-x) ln(1-r)]`, averaged over elements.
///
/// Targets may be any value in `[0, 1]`, not just hard labels. The gradient
/// per element is `-(x/r - (1-x)/(1-r)) / N` evaluated at the clamped `r`.
pub fn bce_loss(target: &Tensor, reconstruction: &Tensor) -> Result<LossValue> {
    if target.shape() != reconstruction.shape() {
        return Err(Error::shape("bce_loss", target.shape(), reconstruction.shape()));
    }
    if let Some(x) = target.data().iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("BCE target {x} outside [0, 1]")));
    }
    if reconstruction.data().iter().any(|r| r.is_nan()) {
        return Err(Error::Numeric("BCE reconstruction contains NaN".into()));
    }
    let n = target.len() as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(target.len());
    for (&x, &r) in target.data().iter().zip(reconstruction.data()) {
        let r = clamp_prob(r);
        value -= x * r.ln() + (1.0 - x) * (1.0 - r).ln();
        grad.push(-(x / r - (1.0 - x) / (1.0 - r)) / n);
    }
    Ok(LossValue {
        value: value / n,
        grad: Tensor::new(target.shape().to_vec(), grad)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlValue {
    pub value: f64,
    pub grad_mu: Tensor,
    pub grad_logvar: Tensor,
}

/// `KL(N(mu, exp(logvar)) || N(0, I))`, summed over latent dimensions and
/// averaged over the batch.
pub fn kl_to_standard_normal(mu: &Tensor, logvar: &Tensor) -> Result<KlValue> {
    if mu.shape() != logvar.shape() {
        return Err(Error::shape("kl_to_standard_normal", mu.shape(), logvar.shape()));
    }
    let batch = mu.rows() as f64;
    let mut value = 0.0;
    for (&m, &lv) in mu.data().iter().zip(logvar.data()) {
        value += 0.5 * (lv.exp() + m * m - 1.0 - lv);
    }
    Ok(KlValue {
        value: value / batch,
        grad_mu: mu.scale(1.0 / batch),
        grad_logvar: logvar.map(|lv| 0.5 * (lv.exp() - 1.0) / batch),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialLosses {
    /// `BCE(1, prior scores) + BCE(0, encoded scores)`.
    pub disc_loss: f64,
    /// Non-saturating encoder loss `BCE(1, encoded scores)`.
    pub enc_loss: f64,
    pub disc_grad_prior: Tensor,
    pub disc_grad_encoded: Tensor,
    pub enc_grad_encoded: Tensor,
}

/// Discriminator and encoder objectives of an adversarial autoencoder, given
/// post-sigmoid discriminator scores.
pub fn adversarial_losses(scores_on_prior: &Tensor, scores_on_encoded: &Tensor) -> Result<AdversarialLosses> {
    for s in scores_on_prior.data().iter().chain(scores_on_encoded.data()) {
        if !(0.0..=1.0).contains(s) {
            return Err(Error::Domain(format!("discriminator score {s} outside (0, 1)")));
        }
    }
    let real = bce_loss(&Tensor::full(scores_on_prior.shape(), 1.0), scores_on_prior)?;
    let fake = bce_loss(&Tensor::full(scores_on_encoded.shape(), 0.0), scores_on_encoded)?;
    let enc = bce_loss(&Tensor::full(scores_on_encoded.shape(), 1.0), scores_on_encoded)?;
    Ok(AdversarialLosses {
        disc_loss: real.value + fake.value,
        enc_loss: enc.value,
        disc_grad_prior: real.grad,
        disc_grad_encoded: fake.grad,
        enc_grad_encoded: enc.grad,
    })
}
