//! Scoring a computed tiling against the planted one with optimal matching.

use paltiling::eval::{micro_f, relative_cost};
use paltiling::matrix::BinaryMatrix;
use paltiling::objectives::DiscreteCost;

fn block(
    rows: usize,
    cols: usize,
    r: std::ops::Range<usize>,
    c: std::ops::Range<usize>,
) -> (BinaryMatrix, BinaryMatrix) {
    let x = BinaryMatrix::from_fn(cols, 1, |i, _| c.contains(&i));
    let y = BinaryMatrix::from_fn(rows, 1, |j, _| r.contains(&j));
    (x, y)
}

fn hstack(a: &BinaryMatrix, b: &BinaryMatrix) -> BinaryMatrix {
    BinaryMatrix::from_fn(a.rows(), a.cols() + b.cols(), |i, s| {
        if s < a.cols() {
            a.get(i, s)
        } else {
            b.get(i, s - a.cols())
        }
    })
}

fn main() -> paltiling::Result<()> {
    let (x1, y1) = block(10, 10, 0..4, 0..5);
    let (x2, y2) = block(10, 10, 5..10, 4..9);
    let (xs, ys) = (hstack(&x1, &x2), hstack(&y1, &y2));

    // computed tiles in the other order, one of them shrunk by a row
    let (c1, d1) = block(10, 10, 6..10, 4..9);
    let (xt, yt) = (hstack(&c1, &x1), hstack(&d1, &y1));

    let r = micro_f(&xs, &ys, &xt, &yt)?;
    println!("sigma = {:?}", r.sigma);
    println!(
        "precision {:.3}, recall {:.3}, F {:.3}",
        r.precision, r.recall, r.f_measure
    );

    let d = paltiling::matrix::bool_product(&ys, &xs)?;
    for cost in [DiscreteCost::Rss, DiscreteCost::L1, DiscreteCost::Ct] {
        println!(
            "{cost:?}: computed {:.1}%",
            relative_cost(cost, &xt, &yt, &d)?
        );
    }
    Ok(())
}
