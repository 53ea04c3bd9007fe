//! PANPAL and PRIMP on one small matrix: discrete costs, relaxed objectives,
//! gradients and Lipschitz moduli.

use paltiling::matrix::{BinaryMatrix, RealMatrix};
use paltiling::objectives::{ct_data_bound, f_ct, f_l1, f_rss, CostModel, ModelKind};

fn main() -> paltiling::Result<()> {
    let d = BinaryMatrix::from_rows(&[&[1, 1, 1, 0], &[1, 1, 1, 1], &[0, 1, 1, 1]]);
    let x = BinaryMatrix::from_rows(&[&[1, 0], &[1, 1], &[1, 1], &[0, 1]]);
    let y = BinaryMatrix::from_rows(&[&[1, 0], &[1, 1], &[0, 1]]);
    let ct = f_ct(&x, &y, &d)?;
    println!(
        "f_rss = {}, f_l1 = {}",
        f_rss(&x, &y, &d)?,
        f_l1(&x, &y, &d)?
    );
    println!(
        "f_ct = {:.3} nats (data {:.3} <= bound {:.3}, model {:.3})",
        ct.total,
        ct.data_bits,
        ct_data_bound(&x, &y, &d)?,
        ct.model_bits
    );

    let xr = RealMatrix::from_rows(&[&[1.0, 0.1], &[0.9, 0.9], &[0.9, 0.9], &[0.1, 1.0]]);
    let yr = RealMatrix::from_rows(&[&[1.0, 0.0], &[0.6, 0.6], &[0.0, 1.0]]);
    for kind in [ModelKind::Panpal, ModelKind::Primp] {
        let model = CostModel::new(kind, &d)?;
        let gx = model.grad_x(&xr, &yr, &d)?;
        println!(
            "{kind}: F = {:.4}, |grad_X F| = {:.4}, M_X = {:.3}, M_Y = {:.3}",
            model.relaxed_objective(&xr, &yr, &d)?,
            gx.frobenius(),
            model.lipschitz_x(&yr),
            model.lipschitz_y(&xr)
        );
    }
    Ok(())
}
