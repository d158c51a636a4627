//! Seeded random streams.
//!
//! ChaCha8 supplies the raw bits so that a seed produces the same stream on
//! every platform. Normal deviates come from `rand_distr`'s ziggurat sampler.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct Prng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` of `seed`; used to give parallel chains
    /// their own generators.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Prng {
            seed,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }
}

impl RngCore for Prng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// I.i.d. `N(0, sigma²)` draws.
pub fn sample_gaussian(rng: &mut Prng, shape: &[usize], sigma: f64) -> Result<Tensor> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Argument(format!(
            "sigma must be finite and non-negative, got {sigma}"
        )));
    }
    let mut t = Tensor::zeros(shape);
    if sigma > 0.0 {
        for v in t.data_mut() {
            *v = sigma * rng.standard_normal();
        }
    }
    Ok(t)
}

/// I.i.d. `U(lo, hi)` draws.
pub fn sample_uniform(rng: &mut Prng, shape: &[usize], lo: f64, hi: f64) -> Result<Tensor> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Argument(format!(
            "uniform bounds need lo < hi, got [{lo}, {hi})"
        )));
    }
    let mut t = Tensor::zeros(shape);
    let width = hi - lo;
    for v in t.data_mut() {
        *v = lo + width * rng.next_f64();
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_gives_zeros() {
        let mut rng = Prng::new(1);
        let t = sample_gaussian(&mut rng, &[3, 4], 0.0).unwrap();
        assert!(t.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negative_sigma_rejected() {
        let mut rng = Prng::new(1);
        assert!(matches!(
            sample_gaussian(&mut rng, &[2], -0.1),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn same_seed_same_tensor() {
        let a = sample_gaussian(&mut Prng::new(42), &[5, 5], 0.7).unwrap();
        let b = sample_gaussian(&mut Prng::new(42), &[5, 5], 0.7).unwrap();
        assert_eq!(a, b);
        let c = sample_uniform(&mut Prng::new(42), &[9], 0.0, 1.0).unwrap();
        let d = sample_uniform(&mut Prng::new(42), &[9], 0.0, 1.0).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn gaussian_variance_monte_carlo() {
        let t = sample_gaussian(&mut Prng::new(7), &[1_000_000], 0.5).unwrap();
        let mean = t.mean();
        let var = t.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t.len() as f64;
        assert!((0.2475..=0.2525).contains(&var), "variance {var}");
    }

    #[test]
    fn uniform_mean_and_range() {
        let t = sample_uniform(&mut Prng::new(11), &[1_000_000], 0.0, 1.0).unwrap();
        assert!(t.data().iter().all(|&v| (0.0..1.0).contains(&v)));
        let mean = t.mean();
        assert!((0.498..=0.502).contains(&mean), "mean {mean}");
    }

    #[test]
    fn uniform_rejects_empty_interval() {
        let mut rng = Prng::new(0);
        assert!(sample_uniform(&mut rng, &[1], 1.0, 1.0).is_err());
        assert!(sample_uniform(&mut rng, &[1], 2.0, 1.0).is_err());
    }

    #[test]
    fn streams_differ() {
        let a = Prng::with_stream(5, 0).next_u64();
        let b = Prng::with_stream(5, 1).next_u64();
        assert_ne!(a, b);
    }
}
