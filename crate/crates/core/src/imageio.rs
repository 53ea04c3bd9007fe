//! RGB888 images as transaction databases of 4×4 patches.
//!
//! Each 4×4 block becomes one transaction of 384 bits. Blocks are enumerated
//! row-major over the image; inside a block pixels go row-major, each pixel
//! contributes R, G, B and each channel its 8 bits most significant first.
//! Column `24·(4·py + px) + 8·channel + bit` therefore holds bit `7 − bit` of
//! that channel.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{bool_product, BinaryMatrix};

pub const PATCH: usize = 4;
pub const BITS_PER_PIXEL: usize = 24;
pub const BITS_PER_TRANSACTION: usize = PATCH * PATCH * BITS_PER_PIXEL;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchImage {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if !width.is_multiple_of(PATCH) || !height.is_multiple_of(PATCH) {
        return Err(Error::Image(format!(
            "image size {width}x{height} is not a multiple of {PATCH}"
        )));
    }
    Ok(())
}

impl PatchImage {
    /// `rgb` holds `3·width·height` bytes, row-major.
    pub fn new(width: usize, height: usize, rgb: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if rgb.len() != 3 * width * height {
            return Err(Error::Image(format!(
                "expected {} bytes for {width}x{height}, got {}",
                3 * width * height,
                rgb.len()
            )));
        }
        Ok(PatchImage { width, height, rgb })
    }

    pub fn black(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; 3 * width * height])
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Result<Self> {
        Self::new(width, height, color.repeat(width * height))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let k = 3 * (y * self.width + x);
        [self.rgb[k], self.rgb[k + 1], self.rgb[k + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, color: [u8; 3]) {
        let k = 3 * (y * self.width + x);
        self.rgb[k..k + 3].copy_from_slice(&color);
    }

    pub fn as_rgb(&self) -> &[u8] {
        &self.rgb
    }

    fn blocks_x(&self) -> usize {
        self.width / PATCH
    }
}

/// Transaction database of the image's patches, `(w/4)(h/4) × 384`.
pub fn encode_image(img: &PatchImage) -> BinaryMatrix {
    let bw = img.blocks_x();
    let rows = bw * (img.height / PATCH);
    let mut data = vec![0u8; rows * BITS_PER_TRANSACTION];
    for (b, row) in data.chunks_mut(BITS_PER_TRANSACTION).enumerate() {
        let (x0, y0) = ((b % bw) * PATCH, (b / bw) * PATCH);
        for p in 0..PATCH * PATCH {
            let color = img.pixel(x0 + p % PATCH, y0 + p / PATCH);
            for (ch, value) in color.iter().enumerate() {
                for bit in 0..8 {
                    row[p * BITS_PER_PIXEL + ch * 8 + bit] = (value >> (7 - bit)) & 1;
                }
            }
        }
    }
    BinaryMatrix::from_vec(rows, BITS_PER_TRANSACTION, data).expect("bits are 0/1")
}

/// Inverse of [`encode_image`].
pub fn decode_matrix(m: &BinaryMatrix, width: usize, height: usize) -> Result<PatchImage> {
    check_dims(width, height)?;
    let bw = width / PATCH;
    let rows = bw * (height / PATCH);
    if m.shape() != (rows, BITS_PER_TRANSACTION) {
        return Err(Error::DimensionMismatch {
            op: "decode_matrix",
            left: m.shape(),
            right: (rows, BITS_PER_TRANSACTION),
        });
    }
    let mut img = PatchImage::black(width, height)?;
    for b in 0..rows {
        let row = m.row(b);
        let (x0, y0) = ((b % bw) * PATCH, (b / bw) * PATCH);
        for p in 0..PATCH * PATCH {
            let mut color = [0u8; 3];
            for (ch, value) in color.iter_mut().enumerate() {
                for bit in 0..8 {
                    *value |= row[p * BITS_PER_PIXEL + ch * 8 + bit] << (7 - bit);
                }
            }
            img.set_pixel(x0 + p % PATCH, y0 + p / PATCH, color);
        }
    }
    Ok(img)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendering {
    /// `(column, image)` for the selected tiles, largest first.
    pub tiles: Vec<(usize, PatchImage)>,
    pub reconstruction: PatchImage,
}

/// Columns of a tiling ordered by covered area `|Y_s|·|X_s|`, descending;
/// equal areas keep column order.
pub fn rank_tiles(x: &BinaryMatrix, y: &BinaryMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.cols()).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(x.col_sum(s) * y.col_sum(s)));
    order
}

/// Decodes the `top_k` largest tiles one by one plus the full Boolean product.
pub fn render_tiles(
    x: &BinaryMatrix,
    y: &BinaryMatrix,
    width: usize,
    height: usize,
    top_k: usize,
) -> Result<Rendering> {
    if x.rows() != BITS_PER_TRANSACTION || x.cols() != y.cols() {
        return Err(Error::DimensionMismatch {
            op: "render_tiles",
            left: x.shape(),
            right: y.shape(),
        });
    }
    let reconstruction = decode_matrix(&bool_product(y, x)?, width, height)?;
    let tiles = rank_tiles(x, y)
        .into_iter()
        .take(top_k)
        .map(|s| {
            let single = bool_product(&y.select_columns(&[s]), &x.select_columns(&[s]))?;
            Ok((s, decode_matrix(&single, width, height)?))
        })
        .collect::<Result<_>>()?;
    Ok(Rendering {
        tiles,
        reconstruction,
    })
}

pub fn load_png(path: impl AsRef<Path>) -> Result<PatchImage> {
    let img = image::open(path.as_ref())
        .map_err(|e| Error::Image(format!("{}: {e}", path.as_ref().display())))?
        .to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    PatchImage::new(w, h, img.into_raw())
}

pub fn save_png(path: impl AsRef<Path>, img: &PatchImage) -> Result<()> {
    let buf = image::RgbImage::from_raw(img.width as u32, img.height as u32, img.rgb.clone())
        .ok_or_else(|| Error::Image("buffer size mismatch".into()))?;
    buf.save_with_format(path.as_ref(), image::ImageFormat::Png)
        .map_err(|e| Error::Image(format!("{}: {e}", path.as_ref().display())))
}
