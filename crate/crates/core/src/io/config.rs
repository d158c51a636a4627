//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment. Mixture components are separated
//! by `;` and coordinates within a component by `,`, so a 2-D mean list reads
//! `0.3,0.3; 0.7,0.7`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::losses::LossKind;
use crate::models::{Architecture, CorruptionSpec, ModelKind, TrainConfig};
use crate::nn::AdamConfig;
use crate::oracle::{GaussianMixture, Quadrature};
use crate::sampler::ChainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Mixture1d,
    Mixture2d,
    Blobs8x8,
    IdxImages,
}

impl FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixture1d" => Ok(DatasetKind::Mixture1d),
            "mixture2d" => Ok(DatasetKind::Mixture2d),
            "blobs8x8" => Ok(DatasetKind::Blobs8x8),
            "idx_images" => Ok(DatasetKind::IdxImages),
            other => Err(format!("unknown dataset {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub loss: LossKind,
    pub sigma: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub regularizer_weight: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub hidden: Vec<usize>,
    /// Defaults to 8 for image data and 2 otherwise.
    pub latent_dim: Option<usize>,
    pub discriminator_hidden: Vec<usize>,
    pub dropout: f64,
    pub leaky_slope: f64,

    pub dataset: DatasetKind,
    pub dataset_n: usize,
    pub dataset_seed: u64,
    pub dataset_path: Option<PathBuf>,
    pub mixture_weights: Vec<f64>,
    pub mixture_means: Vec<Vec<f64>>,
    pub mixture_stds: Vec<Vec<f64>>,

    pub chain_steps: usize,
    pub inject_sigma: f64,
    pub record_every: usize,
    pub chain_batch: usize,
    pub chain_seed: u64,
    pub grid_cols: usize,

    pub sigmas: Vec<f64>,
    pub grid_points: usize,
    pub quad_nodes: usize,

    pub checkpoint: PathBuf,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        RunConfig {
            model: ModelKind::Dae,
            loss: LossKind::Bce,
            sigma: CorruptionSpec::default().sigma,
            epochs: 20,
            batch_size: 64,
            seed: 0,
            regularizer_weight: 1.0,
            learning_rate: adam.learning_rate,
            beta1: adam.beta1,
            beta2: adam.beta2,
            hidden: vec![128, 128],
            latent_dim: None,
            discriminator_hidden: vec![64, 64],
            dropout: 0.2,
            leaky_slope: 0.2,
            dataset: DatasetKind::Mixture1d,
            dataset_n: 10_000,
            dataset_seed: 1,
            dataset_path: None,
            mixture_weights: vec![0.5, 0.5],
            mixture_means: vec![vec![0.35], vec![0.65]],
            mixture_stds: vec![vec![0.05], vec![0.05]],
            chain_steps: 20,
            inject_sigma: 0.0,
            record_every: 1,
            chain_batch: 256,
            chain_seed: 2,
            grid_cols: 8,
            sigmas: vec![0.2, 0.1, 0.05, 0.02, 0.01],
            grid_points: 201,
            quad_nodes: 64,
            checkpoint: PathBuf::from("model.daeb"),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_num<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {value:?} as a number"))
}

fn parse_list<T: FromStr>(value: &str, sep: char) -> std::result::Result<Vec<T>, String> {
    value
        .split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_num)
        .collect()
}

fn parse_points(value: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| parse_list(p, ','))
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.apply_pair(line, i + 1)?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies one `key=value` pair; `line` is reported on error.
    pub fn apply_pair(&mut self, pair: &str, line: usize) -> Result<()> {
        let (key, value) = pair.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected key=value, found {pair:?}"),
        })?;
        self.set(key.trim(), value.trim())
            .map_err(|message| Error::Config { line, message })
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "model" => self.model = value.parse().map_err(|e: Error| e.to_string())?,
            "loss" => self.loss = value.parse().map_err(|e: Error| e.to_string())?,
            "sigma" => self.sigma = parse_num(value)?,
            "epochs" => self.epochs = parse_num(value)?,
            "batch_size" => self.batch_size = parse_num(value)?,
            "seed" => self.seed = parse_num(value)?,
            "regularizer_weight" => self.regularizer_weight = parse_num(value)?,
            "learning_rate" => self.learning_rate = parse_num(value)?,
            "beta1" => self.beta1 = parse_num(value)?,
            "beta2" => self.beta2 = parse_num(value)?,
            "hidden" => self.hidden = parse_list(value, ',')?,
            "latent_dim" => self.latent_dim = Some(parse_num(value)?),
            "discriminator_hidden" => self.discriminator_hidden = parse_list(value, ',')?,
            "dropout" => self.dropout = parse_num(value)?,
            "leaky_slope" => self.leaky_slope = parse_num(value)?,
            "dataset" => self.dataset = value.parse()?,
            "dataset_n" => self.dataset_n = parse_num(value)?,
            "dataset_seed" => self.dataset_seed = parse_num(value)?,
            "dataset_path" => self.dataset_path = Some(PathBuf::from(value)),
            "mixture_weights" => self.mixture_weights = parse_list(value, ';')?,
            "mixture_means" => self.mixture_means = parse_points(value)?,
            "mixture_stds" => self.mixture_stds = parse_points(value)?,
            "chain_steps" => self.chain_steps = parse_num(value)?,
            "inject_sigma" => self.inject_sigma = parse_num(value)?,
            "record_every" => self.record_every = parse_num(value)?,
            "chain_batch" => self.chain_batch = parse_num(value)?,
            "chain_seed" => self.chain_seed = parse_num(value)?,
            "grid_cols" => self.grid_cols = parse_num(value)?,
            "sigmas" => self.sigmas = parse_list(value, ',')?,
            "grid_points" => self.grid_points = parse_num(value)?,
            "quad_nodes" => self.quad_nodes = parse_num(value)?,
            "checkpoint" => self.checkpoint = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// The configured mixture. A single standard deviation per component
    /// applies to every coordinate.
    pub fn mixture(&self) -> Result<GaussianMixture> {
        let dim = self.mixture_means.first().map(Vec::len).unwrap_or(0);
        let variances = self
            .mixture_stds
            .iter()
            .map(|s| match s.as_slice() {
                [one] => Ok(vec![one * one; dim]),
                many if many.len() == dim => Ok(many.iter().map(|v| v * v).collect()),
                _ => Err(Error::Argument(format!("mixture_stds entry {s:?} does not match dimension {dim}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        GaussianMixture::new(self.mixture_weights.clone(), self.mixture_means.clone(), variances)
    }

    pub fn is_image_data(&self) -> bool {
        matches!(self.dataset, DatasetKind::Blobs8x8 | DatasetKind::IdxImages)
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            hidden: self.hidden.clone(),
            latent_dim: self
                .latent_dim
                .unwrap_or(if self.is_image_data() { 8 } else { 2 }),
            discriminator_hidden: self.discriminator_hidden.clone(),
            dropout_rate: self.dropout,
            leaky_slope: self.leaky_slope,
        }
    }

    pub fn corruption(&self) -> Result<CorruptionSpec> {
        CorruptionSpec::new(self.sigma)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            loss: self.loss,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
            regularizer_weight: self.regularizer_weight,
            adam: AdamConfig {
                learning_rate: self.learning_rate,
                beta1: self.beta1,
                beta2: self.beta2,
                ..AdamConfig::default()
            },
        }
    }

    pub fn chain_config(&self) -> Result<ChainConfig> {
        ChainConfig::new(self.chain_steps, self.inject_sigma, self.record_every)
    }

    pub fn quadrature(&self) -> Quadrature {
        Quadrature::GaussHermite {
            nodes_per_dim: self.quad_nodes,
        }
    }
}
