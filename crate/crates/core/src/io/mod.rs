//! Datasets, checkpoints, configuration and exports.

mod checkpoint;
mod config;
mod dataset;
mod export;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, FORMAT_VERSION, MAGIC,
};
pub use config::{DatasetKind, RunConfig};
pub use dataset::{
    blob_image, encode_idx_images, generate_blobs8x8, generate_mixture_dataset, load_idx_images,
    parse_idx_images, BLOB_SIDE,
};
pub use export::{decode_pgm, encode_csv, encode_pgm_grid, write_csv, write_pgm_grid, Pgm};

use crate::error::{Error, Result};
use crate::rng::Prng;
use crate::tensor::Tensor;

/// Training data and, for image sets, the image width.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub data: Tensor,
    pub image_width: Option<usize>,
}

/// Builds or loads the dataset described by `cfg`.
pub fn load_dataset(cfg: &RunConfig) -> Result<LoadedDataset> {
    let mut rng = Prng::new(cfg.dataset_seed);
    match cfg.dataset {
        DatasetKind::Mixture1d | DatasetKind::Mixture2d => {
            let gm = cfg.mixture()?;
            let want = if cfg.dataset == DatasetKind::Mixture1d { 1 } else { 2 };
            if gm.dim() != want {
                return Err(Error::Argument(format!(
                    "dataset {:?} needs {want}-D mixture means, found {}-D",
                    cfg.dataset,
                    gm.dim()
                )));
            }
            Ok(LoadedDataset {
                data: generate_mixture_dataset(&gm, cfg.dataset_n, &mut rng)?,
                image_width: None,
            })
        }
        DatasetKind::Blobs8x8 => Ok(LoadedDataset {
            data: generate_blobs8x8(cfg.dataset_n, &mut rng)?,
            image_width: Some(BLOB_SIDE),
        }),
        DatasetKind::IdxImages => {
            let path = cfg
                .dataset_path
                .as_ref()
                .ok_or_else(|| Error::Argument("dataset idx_images requires dataset_path".into()))?;
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let data = parse_idx_images(&bytes)?;
            let cols = u32::from_be_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
            Ok(LoadedDataset {
                data,
                image_width: Some(cols),
            })
        }
    }
}
