use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// CSV text with a header row and `\n` line endings.
pub fn encode_csv(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut out = header.join(",");
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::Argument(format!(
                "CSV row {i} has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_csv(header, rows)?).map_err(|e| Error::io(path, e))
}

/// Tiles `images` (one `height × width` image per row) into a binary PGM,
/// `grid_cols` images per grid row with 1-pixel black separators.
pub fn encode_pgm_grid(images: &Tensor, width: usize, grid_cols: usize) -> Result<Vec<u8>> {
    if grid_cols == 0 || width == 0 {
        return Err(Error::Argument("grid columns and image width must be ≥ 1".into()));
    }
    if images.cols() % width != 0 {
        return Err(Error::Argument(format!(
            "image length {} is not a multiple of width {width}",
            images.cols()
        )));
    }
    let height = images.cols() / width;
    let n = images.rows();
    let cols = grid_cols.min(n);
    let grid_rows = n.div_ceil(cols);
    let out_w = cols * width + (cols - 1);
    let out_h = grid_rows * height + (grid_rows - 1);

    let mut pixels = vec![0u8; out_w * out_h];
    for (k, img) in images.iter_rows().enumerate() {
        let (gr, gc) = (k / cols, k % cols);
        let (oy, ox) = (gr * (height + 1), gc * (width + 1));
        for y in 0..height {
            for x in 0..width {
                let v = img[y * width + x].clamp(0.0, 1.0);
                pixels[(oy + y) * out_w + ox + x] = (v * 255.0).round() as u8;
            }
        }
    }
    let mut out = format!("P5\n{out_w} {out_h}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    Ok(out)
}

pub fn write_pgm_grid(
    path: impl AsRef<Path>,
    images: &Tensor,
    width: usize,
    grid_cols: usize,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm_grid(images, width, grid_cols)?).map_err(|e| Error::io(path, e))
}

/// A decoded binary PGM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Parses a P5 file with maxval 255 and no comments.
pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format {
                offset: pos,
                message: "PGM header ended early".into(),
            });
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1; // single whitespace before the raster
    if fields[0] != "P5" {
        return Err(Error::Format {
            offset: 0,
            message: format!("expected P5, found {}", fields[0]),
        });
    }
    let parse = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Format {
            offset: 0,
            message: format!("bad PGM header field {s:?}"),
        })
    };
    let (width, height, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval != 255 {
        return Err(Error::Format {
            offset: 0,
            message: format!("unsupported maxval {maxval}"),
        });
    }
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() != width * height {
        return Err(Error::Format {
            offset: bytes.len(),
            message: format!("expected {} pixels, found {}", width * height, raster.len()),
        });
    }
    Ok(Pgm {
        width,
        height,
        pixels: raster.to_vec(),
    })
}
