//! Iterated reconstruction chains.
//!
//! A chain repeatedly applies a reconstruction map, `x_{t+1} = R(x_t + η_t)`,
//! optionally injecting `η_t ~ N(0, τ² I)` before each application. Each step
//! of an optimal `R` is a gradient-ascent step of size `σ²` on `ln p`, so
//! chains drift toward likely data. Chains are batched: row `i` of every
//! state tensor is chain `i`.

use crate::error::{Error, Result};
use crate::oracle::GaussianMixture;
use crate::rng::{sample_gaussian, sample_uniform, Prng};
use crate::tensor::Tensor;

/// A map from data space back into data space, applied row-wise.
pub trait Reconstructor {
    fn data_dim(&self) -> usize;
    fn reconstruct(&self, x: &Tensor) -> Result<Tensor>;
}

/// A reconstructor whose decoder can also be driven from latent codes.
pub trait Generator: Reconstructor {
    fn latent_dim(&self) -> usize;
    fn decode(&self, z: &Tensor) -> Result<Tensor>;
}

/// Leaves its input untouched.
#[derive(Debug, Clone, Copy)]
pub struct IdentityMap {
    pub dim: usize,
}

impl Reconstructor for IdentityMap {
    fn data_dim(&self) -> usize {
        self.dim
    }

    fn reconstruct(&self, x: &Tensor) -> Result<Tensor> {
        Ok(x.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub steps: usize,
    /// Standard deviation of the noise added before each reconstruction.
    pub inject_sigma: f64,
    pub record_every: usize,
}

impl ChainConfig {
    pub fn new(steps: usize, inject_sigma: f64, record_every: usize) -> Result<Self> {
        let cfg = ChainConfig {
            steps,
            inject_sigma,
            record_every,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Argument("a chain needs at least one step".into()));
        }
        if self.record_every == 0 || self.record_every > self.steps {
            return Err(Error::Argument(format!(
                "record_every must lie in [1, {}], got {}",
                self.steps, self.record_every
            )));
        }
        if !(self.inject_sigma >= 0.0) || !self.inject_sigma.is_finite() {
            return Err(Error::Argument(format!(
                "inject_sigma must be ≥ 0, got {}",
                self.inject_sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    /// Step index of each recorded state; always starts at 0 and ends at T.
    pub steps: Vec<usize>,
    pub states: Vec<Tensor>,
    /// `‖x_{t+1} − x_t‖₂` per step (outer) and chain (inner).
    pub displacements: Vec<Vec<f64>>,
    /// True log-density of each recorded state, once attached.
    pub log_density: Option<Vec<Vec<f64>>>,
}

impl ChainTrace {
    pub fn initial(&self) -> &Tensor {
        &self.states[0]
    }

    pub fn last(&self) -> &Tensor {
        self.states.last().expect("trace always holds x_0")
    }

    pub fn num_chains(&self) -> usize {
        self.states[0].rows()
    }

    /// Recorded state at step `t`, if it was recorded.
    pub fn state_at(&self, t: usize) -> Option<&Tensor> {
        self.steps.iter().position(|&s| s == t).map(|i| &self.states[i])
    }

    pub fn attach_log_density(&mut self, gm: &GaussianMixture) {
        self.log_density = Some(
            self.states
                .iter()
                .map(|s| s.iter_rows().map(|r| gm.log_pdf(r)).collect())
                .collect(),
        );
    }
}

/// Runs `cfg.steps` reconstructions from `x0`, recording `x_0`, every
/// `record_every`-th state and `x_T`.
pub fn run_chain<R: Reconstructor + ?Sized>(
    model: &R,
    x0: &Tensor,
    cfg: &ChainConfig,
    mut rng: Option<&mut Prng>,
) -> Result<ChainTrace> {
    cfg.validate()?;
    if x0.shape().len() != 2 || x0.cols() != model.data_dim() {
        return Err(Error::shape("run_chain", x0.shape(), &[x0.rows(), model.data_dim()]));
    }
    if cfg.inject_sigma > 0.0 && rng.is_none() {
        return Err(Error::Argument("noise injection needs a random stream".into()));
    }
    if !x0.all_finite() {
        return Err(Error::Numeric("initial state is not finite".into()));
    }

    let mut trace = ChainTrace {
        steps: vec![0],
        states: vec![x0.clone()],
        displacements: Vec::with_capacity(cfg.steps),
        log_density: None,
    };
    let mut x = x0.clone();
    for t in 1..=cfg.steps {
        let input = match rng.as_deref_mut() {
            Some(rng) if cfg.inject_sigma > 0.0 => {
                x.add(&sample_gaussian(rng, x.shape(), cfg.inject_sigma)?)?
            }
            _ => x.clone(),
        };
        let next = model.reconstruct(&input)?;
        if next.shape() != x.shape() {
            return Err(Error::shape("reconstruction", next.shape(), x.shape()));
        }
        if !next.all_finite() {
            return Err(Error::Numeric(format!("chain state at step {t} is not finite")));
        }
        trace.displacements.push(
            next.iter_rows()
                .zip(x.iter_rows())
                .map(|(a, b)| a.iter().zip(b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
                .collect(),
        );
        x = next;
        if t % cfg.record_every == 0 || t == cfg.steps {
            trace.steps.push(t);
            trace.states.push(x.clone());
        }
    }
    Ok(trace)
}

/// Chains started from `U(0,1)` noise.
pub fn sample_from_noise<R: Reconstructor + ?Sized>(
    model: &R,
    batch: usize,
    cfg: &ChainConfig,
    rng: &mut Prng,
) -> Result<ChainTrace> {
    if batch == 0 {
        return Err(Error::Argument("batch must be ≥ 1".into()));
    }
    let x0 = sample_uniform(rng, &[batch, model.data_dim()], 0.0, 1.0)?;
    run_chain(model, &x0, cfg, Some(rng))
}

/// Chains started from decoded prior draws: `z ~ N(0, I)`, `x_0 = d(z)`.
pub fn refine_from_prior<G: Generator + ?Sized>(
    model: &G,
    batch: usize,
    cfg: &ChainConfig,
    rng: &mut Prng,
) -> Result<ChainTrace> {
    if batch == 0 {
        return Err(Error::Argument("batch must be ≥ 1".into()));
    }
    let z = sample_gaussian(rng, &[batch, model.latent_dim()], 1.0)?;
    let x0 = model.decode(&z)?;
    run_chain(model, &x0, cfg, Some(rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    /// Per recorded state (outer) and chain (inner).
    pub log_density: Vec<Vec<f64>>,
    pub displacements: Vec<Vec<f64>>,
    /// Most responsible mixture component per recorded state and chain.
    pub modes: Vec<Vec<usize>>,
    /// Mode changes along each chain.
    pub switches_per_chain: Vec<usize>,
    pub total_switches: usize,
    pub chains_with_switch: usize,
}

impl ChainSummary {
    /// `ln p(x_last) − ln p(x_0)` per chain.
    pub fn log_density_gain(&self) -> Vec<f64> {
        let first = &self.log_density[0];
        let last = self.log_density.last().expect("non-empty");
        last.iter().zip(first).map(|(b, a)| b - a).collect()
    }
}

/// Density, displacement and mode-membership series of a trace, measured
/// against the true mixture.
pub fn chain_diagnostics(trace: &ChainTrace, gm: &GaussianMixture) -> Result<ChainSummary> {
    if trace.states[0].cols() != gm.dim() {
        return Err(Error::shape("chain_diagnostics", trace.states[0].shape(), &[gm.dim()]));
    }
    let log_density: Vec<Vec<f64>> = match &trace.log_density {
        Some(ld) => ld.clone(),
        None => trace
            .states
            .iter()
            .map(|s| s.iter_rows().map(|r| gm.log_pdf(r)).collect())
            .collect(),
    };
    let modes: Vec<Vec<usize>> = trace
        .states
        .iter()
        .map(|s| s.iter_rows().map(|r| gm.mode_of(r)).collect())
        .collect();
    let chains = trace.num_chains();
    let switches_per_chain: Vec<usize> = (0..chains)
        .map(|c| modes.windows(2).filter(|w| w[0][c] != w[1][c]).count())
        .collect();
    Ok(ChainSummary {
        total_switches: switches_per_chain.iter().sum(),
        chains_with_switch: switches_per_chain.iter().filter(|&&n| n > 0).count(),
        switches_per_chain,
        log_density,
        displacements: trace.displacements.clone(),
        modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{OptimalReconstructor, Quadrature};

    fn single_oracle() -> OptimalReconstructor {
        OptimalReconstructor {
            mixture: GaussianMixture::one_d(&[1.0], &[0.5], &[0.1]).unwrap(),
            sigma: 0.1,
            quadrature: Quadrature::default(),
        }
    }

    #[test]
    fn identity_chain_is_constant() {
        let x0 = Tensor::from_rows(&[vec![0.2, 0.3], vec![0.9, 0.1]]).unwrap();
        let cfg = ChainConfig::new(5, 0.0, 1).unwrap();
        let trace = run_chain(&IdentityMap { dim: 2 }, &x0, &cfg, None).unwrap();
        assert_eq!(trace.states.len(), 6);
        assert!(trace.states.iter().all(|s| s == &x0));
        let gm = GaussianMixture::new(
            vec![0.5, 0.5],
            vec![vec![0.3, 0.3], vec![0.7, 0.7]],
            vec![vec![0.01, 0.01]; 2],
        )
        .unwrap();
        let summary = chain_diagnostics(&trace, &gm).unwrap();
        assert!(summary.displacements.iter().flatten().all(|&d| d == 0.0));
        assert_eq!(summary.total_switches, 0);
    }

    #[test]
    fn oracle_chain_contracts_geometrically() {
        let x0 = Tensor::from_rows(&[vec![0.9]]).unwrap();
        let cfg = ChainConfig::new(10, 0.0, 1).unwrap();
        let trace = run_chain(&single_oracle(), &x0, &cfg, None).unwrap();
        for (t, s) in trace.steps.iter().zip(&trace.states) {
            let expected = 0.5 + 0.4 * 0.5f64.powi(*t as i32);
            assert!((s.data()[0] - expected).abs() < 1e-9, "t={t}");
        }
        assert!((trace.last().data()[0] - 0.500_390_625).abs() < 1e-9);

        let summary = chain_diagnostics(&trace, &single_oracle().mixture).unwrap();
        let ld: Vec<f64> = summary.log_density.iter().map(|v| v[0]).collect();
        let peak = single_oracle().mixture.log_pdf(&[0.5]);
        for w in ld.windows(2) {
            assert!(w[1] > w[0] || peak - w[0] < 1e-6);
        }
    }

    #[test]
    fn single_step_records_two_states() {
        let x0 = Tensor::from_rows(&[vec![0.9]]).unwrap();
        let trace = run_chain(&single_oracle(), &x0, &ChainConfig::new(1, 0.0, 1).unwrap(), None).unwrap();
        assert_eq!(trace.steps, vec![0, 1]);
        assert_eq!(trace.displacements.len(), 1);
    }

    #[test]
    fn recording_includes_endpoints() {
        let x0 = Tensor::from_rows(&[vec![0.9]]).unwrap();
        let cfg = ChainConfig::new(7, 0.0, 3).unwrap();
        let trace = run_chain(&single_oracle(), &x0, &cfg, None).unwrap();
        assert_eq!(trace.steps, vec![0, 3, 6, 7]);
        assert_eq!(trace.displacements.len(), 7);
    }

    #[test]
    fn config_validation() {
        assert!(ChainConfig::new(0, 0.0, 1).is_err());
        assert!(ChainConfig::new(5, 0.0, 6).is_err());
        assert!(ChainConfig::new(5, -1.0, 1).is_err());
        let x0 = Tensor::zeros(&[1, 1]);
        let cfg = ChainConfig::new(2, 0.5, 1).unwrap();
        assert!(run_chain(&IdentityMap { dim: 1 }, &x0, &cfg, None).is_err());
    }

    #[test]
    fn noise_chains_start_in_unit_cube_and_are_seeded() {
        let cfg = ChainConfig::new(3, 0.0, 1).unwrap();
        let a = sample_from_noise(&IdentityMap { dim: 4 }, 50, &cfg, &mut Prng::new(3)).unwrap();
        let b = sample_from_noise(&IdentityMap { dim: 4 }, 50, &cfg, &mut Prng::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.initial().data().iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    struct Nan;
    impl Reconstructor for Nan {
        fn data_dim(&self) -> usize {
            1
        }
        fn reconstruct(&self, x: &Tensor) -> Result<Tensor> {
            Ok(x.map(|_| f64::NAN))
        }
    }

    #[test]
    fn non_finite_state_names_step() {
        let err = run_chain(&Nan, &Tensor::zeros(&[1, 1]), &ChainConfig::new(3, 0.0, 1).unwrap(), None)
            .unwrap_err();
        match err {
            Error::Numeric(msg) => assert!(msg.contains("step 1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_chain_ascends_and_noise_switches_modes() {
        let gm = GaussianMixture::one_d(&[0.5, 0.5], &[0.35, 0.65], &[0.05, 0.05]).unwrap();
        let oracle = OptimalReconstructor {
            mixture: gm.clone(),
            sigma: 0.05,
            quadrature: Quadrature::GaussHermite { nodes_per_dim: 32 },
        };
        let cfg = ChainConfig::new(20, 0.0, 1).unwrap();
        let trace = sample_from_noise(&oracle, 64, &cfg, &mut Prng::new(8)).unwrap();
        let summary = chain_diagnostics(&trace, &gm).unwrap();
        let gains = summary.log_density_gain();
        assert!(gains.iter().filter(|&&g| g > 0.0).count() >= 58);

        // wider jumps would leave the region where the smoothed density is representable
        let noisy = ChainConfig::new(50, 0.1, 1).unwrap();
        let trace = sample_from_noise(&oracle, 64, &noisy, &mut Prng::new(9)).unwrap();
        let summary = chain_diagnostics(&trace, &gm).unwrap();
        assert!(summary.chains_with_switch >= 1);
    }
}
