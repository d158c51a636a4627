use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle::GaussianMixture;
use crate::rng::Prng;
use crate::tensor::Tensor;

pub const BLOB_SIDE: usize = 8;
const BLOB_PEAK: f64 = 0.9;
const BLOB_STD: f64 = 1.2;
/// Pixel noise standard deviation (variance 0.01).
const BLOB_NOISE_STD: f64 = 0.1;

/// `n` ancestral draws from `gm`, clipped to `[0, 1]`.
pub fn generate_mixture_dataset(gm: &GaussianMixture, n: usize, rng: &mut Prng) -> Result<Tensor> {
    if n == 0 {
        return Err(Error::Argument("dataset size must be ≥ 1".into()));
    }
    gm.check_unit_cube()?;
    let mut data = Vec::with_capacity(n * gm.dim());
    for _ in 0..n {
        let (_, x) = gm.sample(rng);
        data.extend(x.into_iter().map(|v| v.clamp(0.0, 1.0)));
    }
    Tensor::new(vec![n, gm.dim()], data)
}

/// A single 8×8 Gaussian blob centered at column `cx`, row `cy` (pixel
/// units), without noise.
pub fn blob_image(cx: f64, cy: f64) -> Vec<f64> {
    let mut img = Vec::with_capacity(BLOB_SIDE * BLOB_SIDE);
    for row in 0..BLOB_SIDE {
        for col in 0..BLOB_SIDE {
            let d2 = (row as f64 - cy).powi(2) + (col as f64 - cx).powi(2);
            img.push(BLOB_PEAK * (-d2 / (2.0 * BLOB_STD * BLOB_STD)).exp());
        }
    }
    img
}

/// Noisy 8×8 blob images with centers uniform in `[2, 5]²`.
pub fn generate_blobs8x8(n: usize, rng: &mut Prng) -> Result<Tensor> {
    if n == 0 {
        return Err(Error::Argument("dataset size must be ≥ 1".into()));
    }
    let mut data = Vec::with_capacity(n * BLOB_SIDE * BLOB_SIDE);
    for _ in 0..n {
        let cx = 2.0 + 3.0 * rng.next_f64();
        let cy = 2.0 + 3.0 * rng.next_f64();
        for v in blob_image(cx, cy) {
            data.push((v + BLOB_NOISE_STD * rng.standard_normal()).clamp(0.0, 1.0));
        }
    }
    Tensor::new(vec![n, BLOB_SIDE * BLOB_SIDE], data)
}

const IDX_IMAGE_MAGIC: [u8; 4] = [0x00, 0x00, 0x08, 0x03];

/// Decodes an unsigned-byte IDX image file (magic `0x00000803`) into an
/// `n × (rows·cols)` tensor scaled to `[0, 1]`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < 4 {
        return Err(Error::Format {
            offset: bytes.len(),
            message: "file shorter than the IDX magic".into(),
        });
    }
    if bytes[..4] != IDX_IMAGE_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("expected IDX image magic 00000803, found {:02x?}", &bytes[..4]),
        });
    }
    let mut dims = [0usize; 3];
    for (i, d) in dims.iter_mut().enumerate() {
        let at = 4 + 4 * i;
        let field = bytes.get(at..at + 4).ok_or(Error::Format {
            offset: bytes.len(),
            message: format!("header truncated in dimension {i}"),
        })?;
        *d = u32::from_be_bytes(field.try_into().expect("4 bytes")) as usize;
    }
    let [n, rows, cols] = dims;
    if n == 0 || rows == 0 || cols == 0 {
        return Err(Error::Format {
            offset: 4,
            message: format!("empty image dimensions {dims:?}"),
        });
    }
    let pixels = &bytes[16..];
    let needed = n * rows * cols;
    if pixels.len() < needed {
        return Err(Error::Format {
            offset: bytes.len(),
            message: format!("expected {needed} pixel bytes, found {}", pixels.len()),
        });
    }
    let data = pixels[..needed].iter().map(|&b| b as f64 / 255.0).collect();
    Tensor::new(vec![n, rows * cols], data)
}

pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_idx_images(&bytes)
}

/// Encodes raw pixel bytes as an IDX image file.
pub fn encode_idx_images(n: usize, rows: usize, cols: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    if pixels.len() != n * rows * cols {
        return Err(Error::shape("encode_idx_images", &[n, rows, cols], &[pixels.len()]));
    }
    let mut out = Vec::with_capacity(16 + pixels.len());
    out.extend_from_slice(&IDX_IMAGE_MAGIC);
    for d in [n, rows, cols] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(pixels);
    Ok(out)
}
