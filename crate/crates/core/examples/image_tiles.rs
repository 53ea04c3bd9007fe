//! Encodes a synthetic image into 4x4 patch transactions, factorizes it and
//! writes the largest tiles as PNGs.
//!
//! `cargo run --release --example image_tiles [out_dir]`

use std::path::PathBuf;

use paltiling::imageio::{decode_matrix, encode_image, render_tiles, save_png, PatchImage};
use paltiling::paltiling::{pal_tiling, PalConfig};

fn main() -> paltiling::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(
        || std::env::temp_dir().join("paltiling-tiles"),
        PathBuf::from,
    );
    let (w, h) = (64, 48);
    let mut img = PatchImage::black(w, h)?;
    for y in 0..h {
        for x in 0..w {
            let color = match ((x / 16) % 2, (y / 12) % 2) {
                (0, 0) => [255, 255, 255],
                (1, 0) => [200, 30, 30],
                (0, 1) => [30, 30, 200],
                _ => [0, 0, 0],
            };
            img.set_pixel(x, y, color);
        }
    }
    let d = encode_image(&img);
    assert_eq!(decode_matrix(&d, w, h)?, img);
    println!(
        "{} patches x {} bits, {} ones",
        d.rows(),
        d.cols(),
        d.count_ones()
    );

    let cfg = PalConfig {
        delta_r: 1,
        iterations: 1000,
        seed: 3,
        ..PalConfig::default()
    };
    let tiling = pal_tiling(&d, &cfg)?;
    println!("rank {}, stop {}", tiling.rank(), tiling.stop);

    let r = render_tiles(&tiling.x, &tiling.y, w, h, 4)?;
    std::fs::create_dir_all(&out)?;
    for (k, (col, tile)) in r.tiles.iter().enumerate() {
        save_png(out.join(format!("tile_{}.png", k + 1)), tile)?;
        println!("tile_{}.png <- column {col}", k + 1);
    }
    save_png(out.join("reconstruction.png"), &r.reconstruction)?;
    println!("wrote {}", out.display());
    Ok(())
}
