//! The hat penalty and its proximal map, which push relaxed entries to 0 or 1.

use paltiling::matrix::RealMatrix;
use paltiling::penalty::{lambda_penalty, phi, prox_lambda, prox_phi, ProxParams};

fn main() -> paltiling::Result<()> {
    println!(
        "{:>6} {:>8} {:>10} {:>10}",
        "x", "Lambda", "prox a=.05", "prox a=.3"
    );
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        println!(
            "{x:>6.2} {:>8.2} {:>10.3} {:>10.3}",
            lambda_penalty(x).finite().unwrap(),
            prox_lambda(x, 0.05),
            prox_lambda(x, 0.3)
        );
    }
    println!(
        "Lambda(1.5) infeasible: {}",
        lambda_penalty(1.5).is_infeasible()
    );

    let m = RealMatrix::from_rows(&[&[0.1, 0.45, 0.55], &[0.8, -0.2, 1.3]]);
    let p = prox_phi(&m, ProxParams::new(0.1)?);
    println!(
        "phi before: {:?}, after: {:?}",
        phi(&m).finite(),
        phi(&p).finite()
    );
    println!("{:?}", p.as_slice());
    Ok(())
}
