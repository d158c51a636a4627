//! The `dae` command line.
//!
//! Every subcommand reads a [`RunConfig`] from `--config` (or the defaults),
//! applies `--set key=value` overrides in order, and writes its artifacts
//! under `output_dir`. Exit codes: 0 success, 1 usage or configuration error,
//! 2 runtime failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{self, RunConfig};
use crate::models::{self, Autoencoder};
use crate::oracle::{self, GaussianMixture};
use crate::rng::Prng;
use crate::sampler::{self, ChainTrace};

#[derive(Debug, Parser)]
#[command(name = "dae", about = "Denoising autoencoders as score estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Run configuration file (key = value lines).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model and write a checkpoint plus loss.csv.
    Train(ConfigArgs),
    /// Run chains from uniform noise through a checkpoint.
    Sample(ConfigArgs),
    /// Run chains from decoded prior draws through a checkpoint.
    Refine(ConfigArgs),
    /// Compare a checkpoint's implied score with the mixture score.
    ScoreCheck(ConfigArgs),
    /// Tabulate the optimal reconstruction's score error as σ shrinks.
    OracleCheck(ConfigArgs),
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

/// Runs the command line given in `argv` (program name first) and returns
/// the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config(args: &ConfigArgs) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Io { .. } => Failure::Usage(e.to_string()),
            other => Failure::from(other),
        })?,
        None => RunConfig::default(),
    };
    for (i, pair) in args.overrides.iter().enumerate() {
        cfg.apply_pair(pair, i + 1).map_err(|e| match e {
            Error::Config { line, message } => {
                Failure::Usage(format!("--set #{line} ({pair}): {message}"))
            }
            other => Failure::from(other),
        })?;
    }
    Ok(cfg)
}

fn run(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Train(a) => train(&load_config(&a)?)?,
        Command::Sample(a) => chains(&load_config(&a)?, ChainStart::Noise)?,
        Command::Refine(a) => chains(&load_config(&a)?, ChainStart::Prior)?,
        Command::ScoreCheck(a) => score_check(&load_config(&a)?)?,
        Command::OracleCheck(a) => oracle_check(&load_config(&a)?)?,
    }
    Ok(())
}

fn output_dir(cfg: &RunConfig) -> Result<&Path> {
    let dir = cfg.output_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

fn train(cfg: &RunConfig) -> Result<()> {
    let dataset = io::load_dataset(cfg)?;
    let (model, losses) = models::train(
        cfg.model,
        &dataset.data,
        &cfg.architecture(),
        cfg.corruption()?,
        &cfg.train_config(),
    )?;
    if let Some(parent) = cfg.checkpoint.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    io::save_checkpoint(&model, &cfg.checkpoint)?;

    let rows: Vec<Vec<f64>> = losses
        .iter()
        .enumerate()
        .map(|(epoch, l)| vec![epoch as f64 + 1.0, l.reconstruction, l.regularizer, l.adversarial])
        .collect();
    let loss_path = output_dir(cfg)?.join("loss.csv");
    io::write_csv(&loss_path, &["epoch", "reconstruction", "regularizer", "adversarial"], &rows)?;

    let last = losses.last().expect("at least one epoch");
    println!(
        "trained {} ({} loss, sigma {}) on {} points for {} epochs",
        cfg.model,
        cfg.loss,
        cfg.sigma,
        dataset.data.rows(),
        cfg.epochs
    );
    println!("final reconstruction loss {:.6}", last.reconstruction);
    println!("checkpoint {}", cfg.checkpoint.display());
    println!("losses {}", loss_path.display());
    Ok(())
}

#[derive(Clone, Copy)]
enum ChainStart {
    Noise,
    Prior,
}

fn load_model(cfg: &RunConfig) -> Result<Autoencoder> {
    io::load_checkpoint(&cfg.checkpoint)
}

/// The configured mixture, when the dataset is mixture-valued and matches
/// the model's dimension.
fn reference_mixture(cfg: &RunConfig, dim: usize) -> Result<Option<GaussianMixture>> {
    if cfg.is_image_data() {
        return Ok(None);
    }
    let gm = cfg.mixture()?;
    Ok((gm.dim() == dim).then_some(gm))
}

fn trace_rows(trace: &ChainTrace) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for (k, (step, state)) in trace.steps.iter().zip(&trace.states).enumerate() {
        for (c, x) in state.iter_rows().enumerate() {
            let mut row = vec![*step as f64, c as f64];
            if let Some(ld) = &trace.log_density {
                row.push(ld[k][c]);
            }
            row.extend_from_slice(x);
            rows.push(row);
        }
    }
    rows
}

fn chains(cfg: &RunConfig, start: ChainStart) -> Result<()> {
    let model = load_model(cfg)?;
    let chain_cfg = cfg.chain_config()?;
    let mut rng = Prng::new(cfg.chain_seed);
    let mut trace = match start {
        ChainStart::Noise => sampler::sample_from_noise(&model, cfg.chain_batch, &chain_cfg, &mut rng)?,
        ChainStart::Prior => sampler::refine_from_prior(&model, cfg.chain_batch, &chain_cfg, &mut rng)?,
    };
    let prefix = match start {
        ChainStart::Noise => "sample",
        ChainStart::Prior => "refine",
    };
    let dir = output_dir(cfg)?;
    let gm = reference_mixture(cfg, model.data_dim())?;

    let mut header: Vec<String> = vec!["step".into(), "chain".into()];
    if let Some(gm) = &gm {
        trace.attach_log_density(gm);
        header.push("log_density".into());
    }
    header.extend((0..model.data_dim()).map(|i| format!("x{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let trace_path = dir.join(format!("{prefix}_trace.csv"));
    io::write_csv(&trace_path, &header, &trace_rows(&trace))?;
    println!("{} chains, {} steps", trace.num_chains(), chain_cfg.steps);
    println!("trace {}", trace_path.display());

    if let Some(gm) = &gm {
        let summary = sampler::chain_diagnostics(&trace, gm)?;
        let first = &summary.log_density[0];
        let last = summary.log_density.last().expect("non-empty");
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let gains = summary.log_density_gain();
        let improved = gains.iter().filter(|g| **g > 0.0).count();
        println!(
            "mean log density {:.4} -> {:.4}; {} of {} chains improved; {} mode switches",
            mean(first),
            mean(last),
            improved,
            gains.len(),
            summary.total_switches
        );
    }

    if cfg.is_image_data() {
        let width = io::load_dataset(cfg)?.image_width.expect("image data has a width");
        let shown = cfg.chain_batch.min(cfg.grid_cols * cfg.grid_cols);
        let idx: Vec<usize> = (0..shown).collect();
        for (name, state) in [("initial", trace.initial()), ("final", trace.last())] {
            let path = dir.join(format!("{prefix}_{name}.pgm"));
            io::write_pgm_grid(&path, &state.select_rows(&idx)?, width, cfg.grid_cols)?;
            println!("grid {}", path.display());
        }
    }
    Ok(())
}

fn score_check(cfg: &RunConfig) -> Result<()> {
    let model = load_model(cfg)?;
    let gm = cfg.mixture()?;
    let sigma = model.corruption.sigma;
    let grid = oracle::high_density_grid(&gm, 0.0, 1.0, cfg.grid_points);
    let field = oracle::score_field(&model, &gm, sigma, &grid)?;

    let d = gm.dim();
    let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    header.extend((0..d).map(|i| format!("estimate{i}")));
    header.extend((0..d).map(|i| format!("truth{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| {
            let mut r = field.points[i].clone();
            r.extend_from_slice(&field.estimates[i]);
            r.extend_from_slice(&field.truths[i]);
            r
        })
        .collect();
    let path = output_dir(cfg)?.join("score_field.csv");
    io::write_csv(&path, &header, &rows)?;

    println!("grid points {}", grid.len());
    println!("sigma {sigma}");
    println!("sign agreement {:.4}", field.sign_agreement());
    println!("correlation {:.4}", field.correlation());
    println!("max relative error {:.4}", field.max_relative_error());
    println!("field {}", path.display());
    Ok(())
}

fn oracle_check(cfg: &RunConfig) -> Result<()> {
    let gm = cfg.mixture()?;
    let grid = oracle::high_density_grid(&gm, 0.0, 1.0, cfg.grid_points);
    let study = oracle::limit_convergence_study(&gm, &cfg.sigmas, &grid, &cfg.quadrature())?;
    let rows: Vec<Vec<f64>> = study
        .rows
        .iter()
        .map(|r| vec![r.sigma, r.max_relative_error, r.mean_relative_error])
        .collect();
    let path = output_dir(cfg)?.join("oracle_study.csv");
    io::write_csv(&path, &["sigma", "max_relative_error", "mean_relative_error"], &rows)?;
    for r in &study.rows {
        println!("sigma {:<8} max {:.6} mean {:.6}", r.sigma, r.max_relative_error, r.mean_relative_error);
    }
    println!("monotone {}", study.monotone);
    println!("study {}", path.display());
    Ok(())
}
