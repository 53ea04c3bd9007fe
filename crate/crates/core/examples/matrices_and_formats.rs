//! Boolean products, valuable rank and the text formats.

use paltiling::format::{read_sparse, write_dense, write_signed, write_sparse};
use paltiling::matrix::{
    bool_product, threshold, valuable_rank, BinaryMatrix, RealMatrix, SignedMatrix,
};

fn main() -> paltiling::Result<()> {
    // two overlapping tiles in a 4x5 matrix
    let y = BinaryMatrix::from_rows(&[&[1, 1], &[1, 0], &[0, 1], &[1, 0]]);
    let x = BinaryMatrix::from_rows(&[&[1, 0], &[0, 1], &[1, 1], &[0, 1], &[1, 1]]);
    let d = bool_product(&y, &x)?;
    print!("theta(Y X^T) in sparse row format:\n{}", write_sparse(&d));
    println!("valuable rank: {}", valuable_rank(&x, &y)?);

    let mut noisy = d.clone();
    noisy.set(1, 1, true);
    noisy.set(0, 0, false);
    let n = SignedMatrix::difference(&noisy, &d)?;
    print!("noise N = D' - theta(Y X^T):\n{}", write_signed(&n));

    let relaxed = RealMatrix::from_rows(&[&[0.9, 0.2], &[0.45, 0.7]]);
    print!("relaxed factor:\n{}", write_dense(&relaxed));
    print!(
        "thresholded at 0.5:\n{}",
        write_sparse(&threshold(&relaxed, 0.5))
    );

    assert_eq!(read_sparse(&write_sparse(&noisy))?, noisy);
    Ok(())
}
